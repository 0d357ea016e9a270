//! HTTP handlers. Errors are JSON bodies of the form `{"error": "..."}`.

use std::sync::atomic::Ordering;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::BytesRejection;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use qready_core::harness::resolve_instance_path;
use qready_core::io::{parse_instance_str, InstanceFormat};
use qready_core::results::InstanceSummary;
use qready_core::{SamplerParams, Sense};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::job::{now, JobRecord, JobState};
use crate::AppState;

pub(crate) fn router(state: Arc<AppState>) -> Router {
    let limit = state.config.max_body_bytes;
    Router::new()
        .route("/v1/health", get(health))
        .route("/v1/jobs", post(submit))
        .route("/v1/jobs/{id}", get(status))
        .route("/v1/jobs/{id}/results", get(results))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state)
}

pub(crate) struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError { status, message: message.into() }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

async fn health(State(state): State<Arc<AppState>>) -> Json<Value> {
    let counts = state.counts();
    let count = |s| counts.get(&s).copied().unwrap_or(0);
    Json(json!({
        "status": if state.stopping.load(Ordering::SeqCst) { "stopping" } else { "ok" },
        "workers": state.config.workers.max(1),
        "queued": count(JobState::Queued),
        "running": count(JobState::Running),
        "completed": count(JobState::Completed),
        "failed": count(JobState::Failed),
    }))
}

/// JSON submission body. Exactly one of `instance` and `catalog_name`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubmitBody {
    instance: Option<String>,
    catalog_name: Option<String>,
    format: Option<InstanceFormat>,
    #[serde(default)]
    params: Option<Value>,
}

/// Query parameters for raw-text submissions.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TextQuery {
    format: Option<InstanceFormat>,
    time_limit: Option<f64>,
    seed: Option<u64>,
    max_samples: Option<usize>,
}

struct Submission {
    text: String,
    format: InstanceFormat,
    catalog_name: Option<String>,
    params: Value,
}

fn is_json(headers: &HeaderMap) -> bool {
    headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.trim_start().starts_with("application/json"))
}

fn read_submission(state: &AppState, headers: &HeaderMap, query: TextQuery, body: Bytes) -> Result<Submission, ApiError> {
    if !is_json(headers) {
        let text = String::from_utf8(body.to_vec()).map_err(|_| ApiError::bad_request("instance text is not UTF-8"))?;
        let mut params = serde_json::Map::new();
        if let Some(t) = query.time_limit {
            params.insert("time_limit".into(), json!(t));
        }
        if let Some(s) = query.seed {
            params.insert("seed".into(), json!(s));
        }
        if let Some(m) = query.max_samples {
            params.insert("max_samples".into(), json!(m));
        }
        return Ok(Submission { text, format: query.format.unwrap_or_default(), catalog_name: None, params: Value::Object(params) });
    }

    let parsed: SubmitBody =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("invalid request body: {e}")))?;
    let params = parsed.params.unwrap_or_else(|| json!({}));
    match (parsed.instance, parsed.catalog_name) {
        (Some(text), None) => Ok(Submission { text, format: parsed.format.unwrap_or_default(), catalog_name: None, params }),
        (None, Some(name)) => {
            if state.config.catalog.get(&name).is_none() {
                return Err(ApiError::new(StatusCode::NOT_FOUND, format!("unknown catalog instance '{name}'")));
            }
            let path = resolve_instance_path(&name, state.config.instances_dir.as_deref()).ok_or_else(|| {
                ApiError::new(StatusCode::NOT_FOUND, format!("no instance file for catalog entry '{name}' on this server"))
            })?;
            let text = std::fs::read_to_string(&path)
                .map_err(|e| ApiError::internal(format!("cannot read {}: {e}", path.display())))?;
            Ok(Submission { text, format: parsed.format.unwrap_or(InstanceFormat::Maxcut), catalog_name: Some(name), params })
        }
        _ => Err(ApiError::bad_request("provide exactly one of 'instance' and 'catalog_name'")),
    }
}

fn resolve_params(state: &AppState, mut params: Value) -> Result<SamplerParams, ApiError> {
    let Value::Object(map) = &mut params else {
        return Err(ApiError::bad_request("'params' must be a JSON object"));
    };
    map.entry("time_limit").or_insert(json!(state.config.default_time_limit));
    let params: SamplerParams =
        serde_json::from_value(params).map_err(|e| ApiError::bad_request(format!("invalid params: {e}")))?;
    params.validate().map_err(|e| ApiError::bad_request(e.to_string()))?;
    Ok(params)
}

async fn submit(
    State(state): State<Arc<AppState>>,
    query: Result<Query<TextQuery>, axum::extract::rejection::QueryRejection>,
    headers: HeaderMap,
    body: Result<Bytes, BytesRejection>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let body = body.map_err(|e| ApiError::new(e.status(), e.body_text()))?;
    let Query(query) = query.map_err(|e| ApiError::bad_request(e.body_text()))?;
    let submission = read_submission(&state, &headers, query, body)?;
    let params = resolve_params(&state, submission.params)?;

    let (text, format, catalog_name) = (submission.text, submission.format, submission.catalog_name);
    let sense = catalog_name.as_deref().and_then(|n| state.config.catalog.get(n)).map(|e| e.sense);
    let (text, summary) = tokio::task::spawn_blocking(move || {
        let mut q = parse_instance_str(&text, format).map_err(|e| ApiError::bad_request(e.to_string()))?;
        // qubo files for maximization sources carry objective coefficients
        if format == InstanceFormat::Qubo && sense == Some(Sense::Maximize) {
            q = q.negated();
        }
        Ok::<_, ApiError>((text, InstanceSummary::of("submitted", &q)))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;

    let job_id = uuid::Uuid::new_v4().simple().to_string();
    let summary = InstanceSummary { name: catalog_name.clone().unwrap_or_else(|| summary.name.clone()), ..summary };
    let record = JobRecord {
        job_id: job_id.clone(),
        sequence: state.next_sequence.fetch_add(1, Ordering::SeqCst),
        state: JobState::Queued,
        submitted_at: now(),
        started_at: None,
        finished_at: None,
        format,
        catalog_name,
        instance: summary,
        params,
        summary: None,
        error: None,
    };
    state.store.save_instance(&job_id, &text).map_err(|e| ApiError::internal(e.to_string()))?;
    state.insert(record).map_err(|e| ApiError::internal(e.to_string()))?;
    state.queue.send(job_id.clone()).map_err(|_| ApiError::internal("job queue is closed"))?;
    Ok((StatusCode::ACCEPTED, Json(json!({ "job_id": job_id }))))
}

fn find(state: &AppState, id: &str) -> Result<JobRecord, ApiError> {
    state.record(id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown job '{id}'")))
}

async fn status(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<JobRecord>, ApiError> {
    find(&state, &id).map(Json)
}

async fn results(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let record = find(&state, &id)?;
    if record.state != JobState::Completed {
        let mut message = format!("job '{id}' is {}", record.state.as_str());
        if let Some(e) = &record.error {
            message.push_str(&format!(": {e}"));
        }
        return Ok((StatusCode::CONFLICT, Json(json!({ "error": message, "state": record.state })))
            .into_response());
    }
    let store = state.store.clone();
    let loaded = tokio::task::spawn_blocking(move || store.load_results(&id))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
        .map_err(|e| ApiError::internal(e.to_string()))?;
    let results = loaded.ok_or_else(|| ApiError::internal("results missing for a completed job"))?;
    Ok(Json(results).into_response())
}
