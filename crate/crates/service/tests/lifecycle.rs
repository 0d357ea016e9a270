//! Job lifecycle over a live local server: submit, poll, results, error
//! surfaces, FIFO order and durability across restarts.

use std::path::Path;
use std::time::{Duration, Instant};

use qready_service::{JobState, Service, ServiceConfig};
use reqwest::StatusCode;
use serde_json::{json, Value};
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

/// Canonical toy QUBO: energies 0, 1, 1, 0; the minimum is 0.
const TOY: &str = "2 3\n1 1 1\n1 2 -2\n2 2 1\n";

struct Server {
    base: String,
    stop: Option<oneshot::Sender<()>>,
    task: JoinHandle<()>,
}

impl Server {
    async fn start(config: ServiceConfig) -> Server {
        let service = Service::start(config).unwrap();
        let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
        let base = format!("http://{}", listener.local_addr().unwrap());
        let (tx, rx) = oneshot::channel();
        let task = tokio::spawn(async move {
            service.serve(listener, async { rx.await.ok(); }).await.unwrap();
        });
        Server { base, stop: Some(tx), task }
    }

    async fn shutdown(mut self) {
        self.stop.take().unwrap().send(()).ok();
        self.task.await.unwrap();
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }
}

fn config(dir: &Path) -> ServiceConfig {
    ServiceConfig { default_time_limit: 0.3, ..ServiceConfig::new(dir) }
}

async fn submit(client: &reqwest::Client, server: &Server, body: Value) -> (StatusCode, Value) {
    let resp = client.post(server.url("/v1/jobs")).json(&body).send().await.unwrap();
    let status = resp.status();
    (status, resp.json().await.unwrap())
}

async fn submit_ok(client: &reqwest::Client, server: &Server, body: Value) -> String {
    let (status, value) = submit(client, server, body).await;
    assert_eq!(status, StatusCode::ACCEPTED, "{value}");
    value["job_id"].as_str().unwrap().to_string()
}

fn state_of(record: &Value) -> JobState {
    serde_json::from_value(record["state"].clone()).unwrap()
}

/// Polls until the job is terminal, returning every state observed.
async fn wait(client: &reqwest::Client, server: &Server, id: &str) -> (Vec<JobState>, Value) {
    let deadline = Instant::now() + Duration::from_secs(20);
    let mut seen = Vec::new();
    loop {
        let record: Value = client.get(server.url(&format!("/v1/jobs/{id}"))).send().await.unwrap().json().await.unwrap();
        let state = state_of(&record);
        if seen.last() != Some(&state) {
            seen.push(state);
        }
        if state.is_terminal() {
            return (seen, record);
        }
        assert!(Instant::now() < deadline, "job {id} did not finish");
        tokio::time::sleep(Duration::from_millis(20)).await;
    }
}

fn assert_monotone(states: &[JobState]) {
    assert!(states.windows(2).all(|w| w[0] < w[1] && w[0].can_become(w[1])), "{states:?}");
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn toy_job_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let server = Server::start(config(dir.path())).await;
    let client = reqwest::Client::new();

    let health: Value = client.get(server.url("/v1/health")).send().await.unwrap().json().await.unwrap();
    assert_eq!(health["status"], "ok");
    assert_eq!(health["workers"], 1);

    let id = submit_ok(&client, &server, json!({ "instance": TOY, "format": "qubo", "params": { "seed": 1 } })).await;
    let (states, record) = wait(&client, &server, &id).await;
    assert_monotone(&states);
    assert_eq!(states.last(), Some(&JobState::Completed));
    assert!(record.get("sample_set").is_none() && record.get("samples").is_none());
    assert_eq!(record["summary"]["best_energy"], 0.0);
    assert_eq!(record["params"]["time_limit"], 0.3);

    let resp = client.get(server.url(&format!("/v1/jobs/{id}/results"))).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    let results: Value = resp.json().await.unwrap();
    assert_eq!(results["schema_version"], 1);
    let samples = results["sample_set"]["samples"].as_array().unwrap();
    // all four states of two variables are 1-flip minima or incumbents at most
    assert!(!samples.is_empty() && samples.len() <= 4);
    let keys: Vec<(f64, String)> =
        samples.iter().map(|s| (s["energy"].as_f64().unwrap(), s["bits"].as_str().unwrap().to_string())).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "sorted and distinct: {keys:?}");
    assert_eq!(keys[0].0, 0.0);
    let zeros = keys.iter().filter(|k| k.0 == 0.0).count();
    assert_eq!(results["analytics"]["elite_count"], zeros);
    let pairs: u64 = results["analytics"]["histogram"]["counts"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(pairs as usize, zeros * (zeros - 1) / 2);
    assert_eq!(results["analytics"]["dendrogram"]["leaf_order"].as_array().unwrap().len(), zeros);

    server.shutdown().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn error_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let server = Server::start(ServiceConfig { max_body_bytes: 4096, ..config(dir.path()) }).await;
    let client = reqwest::Client::new();

    let (status, body) = submit(&client, &server, json!({ "instance": "2 2\n1 2 1" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let message = body["error"].as_str().unwrap();
    assert!(message.contains("declared 2 entries, found 1") && message.contains("line 2"), "{message}");

    let (status, body) = submit(&client, &server, json!({ "instance": "2 1\n1 x 1\n" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(body["error"].as_str().unwrap().starts_with("line 2"), "{body}");

    let (status, _) = submit(&client, &server, json!({ "catalog_name": "g999999" })).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, _) = submit(&client, &server, json!({ "instance": TOY, "catalog_name": "g000989" })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, body) = submit(&client, &server, json!({ "instance": TOY, "params": { "time_limit": -1 } })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
    let (status, _) = submit(&client, &server, json!({ "instance": TOY, "params": { "bogus": 1 } })).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let big = format!("2 1\n1 2 1\n#{}\n", "x".repeat(8192));
    let resp = client.post(server.url("/v1/jobs")).body(big).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::PAYLOAD_TOO_LARGE);

    for path in ["/v1/jobs/nope", "/v1/jobs/nope/results"] {
        let resp = client.get(server.url(path)).send().await.unwrap();
        assert_eq!(resp.status(), StatusCode::NOT_FOUND, "{path}");
    }

    // a long job keeps results unavailable
    let id = submit_ok(&client, &server, json!({ "instance": TOY, "params": { "time_limit": 3.0 } })).await;
    let resp = client.get(server.url(&format!("/v1/jobs/{id}/results"))).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::CONFLICT);
    let body: Value = resp.json().await.unwrap();
    assert!(matches!(body["state"].as_str(), Some("queued" | "running")), "{body}");

    server.shutdown().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn raw_text_submission_with_query_params() {
    let dir = tempfile::tempdir().unwrap();
    let server = Server::start(config(dir.path())).await;
    let client = reqwest::Client::new();
    let resp = client
        .post(server.url("/v1/jobs?format=maxcut&time_limit=0.2&seed=4"))
        .header("content-type", "text/plain")
        .body("3 3\n1 2 1\n2 3 1\n1 3 1\n")
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), StatusCode::ACCEPTED);
    let id = resp.json::<Value>().await.unwrap()["job_id"].as_str().unwrap().to_string();
    let (_, record) = wait(&client, &server, &id).await;
    assert_eq!(record["instance"]["sense"], "maximize");
    // a triangle's maximum cut is 2
    assert_eq!(record["summary"]["best_objective"], 2.0);
    assert_eq!(record["params"]["seed"], 4);
    server.shutdown().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn single_worker_runs_jobs_in_submission_order() {
    let dir = tempfile::tempdir().unwrap();
    let server = Server::start(config(dir.path())).await;
    let client = reqwest::Client::new();
    let mut ids = Vec::new();
    for seed in 0..4 {
        let body = json!({ "instance": TOY, "params": { "time_limit": 0.15, "seed": seed } });
        ids.push(submit_ok(&client, &server, body).await);
    }
    let mut spans = Vec::new();
    for id in &ids {
        let (_, record) = wait(&client, &server, id).await;
        spans.push((record["started_at"].as_f64().unwrap(), record["finished_at"].as_f64().unwrap()));
    }
    for w in spans.windows(2) {
        // FIFO and never two at once
        assert!(w[0].1 <= w[1].0, "{spans:?}");
    }
    server.shutdown().await;
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn jobs_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let client = reqwest::Client::new();

    let first = Server::start(config(dir.path())).await;
    let done = submit_ok(&client, &first, json!({ "instance": TOY })).await;
    let (_, before) = wait(&client, &first, &done).await;
    let results_before: Value =
        client.get(first.url(&format!("/v1/jobs/{done}/results"))).send().await.unwrap().json().await.unwrap();
    // one job still running and one waiting behind it when the server stops
    let running = submit_ok(&client, &first, json!({ "instance": TOY, "params": { "time_limit": 5.0 } })).await;
    let waiting = submit_ok(&client, &first, json!({ "instance": TOY })).await;
    let deadline = Instant::now() + Duration::from_secs(5);
    loop {
        let r: Value = client.get(first.url(&format!("/v1/jobs/{running}"))).send().await.unwrap().json().await.unwrap();
        if state_of(&r) == JobState::Running {
            break;
        }
        assert!(Instant::now() < deadline);
        tokio::time::sleep(Duration::from_millis(10)).await;
    }
    first.shutdown().await;

    let second = Server::start(config(dir.path())).await;
    let after: Value = client.get(second.url(&format!("/v1/jobs/{done}"))).send().await.unwrap().json().await.unwrap();
    assert_eq!(after, before);
    let results_after: Value =
        client.get(second.url(&format!("/v1/jobs/{done}/results"))).send().await.unwrap().json().await.unwrap();
    assert_eq!(results_after, results_before);

    let interrupted: Value =
        client.get(second.url(&format!("/v1/jobs/{running}"))).send().await.unwrap().json().await.unwrap();
    assert_eq!(state_of(&interrupted), JobState::Failed);
    assert!(interrupted["error"].as_str().unwrap().contains("restart"));
    let resp = client.get(second.url(&format!("/v1/jobs/{running}/results"))).send().await.unwrap();
    assert_eq!(resp.status(), StatusCode::CONFLICT);

    let (states, record) = wait(&client, &second, &waiting).await;
    assert_monotone(&states);
    assert_eq!(state_of(&record), JobState::Completed);
    second.shutdown().await;
}
