//! Asynchronous HTTP job service around the qready sampler.
//!
//! Clients submit an instance, poll the job, and fetch samples plus elite
//! analytics once it completes:
//!
//! | method | path                  | success |
//! |--------|-----------------------|---------|
//! | POST   | `/v1/jobs`            | 202 `{job_id}` |
//! | GET    | `/v1/jobs/{id}`       | 200 job record without samples |
//! | GET    | `/v1/jobs/{id}/results` | 200 samples and analytics, 409 until completed |
//! | GET    | `/v1/health`          | 200 |
//!
//! Solves run on a bounded worker pool (one job at a time by default) in
//! submission order. Job state lives in a [`FileStore`] and survives
//! restarts: queued jobs are queued again and jobs that were running are
//! marked failed.

mod api;
pub mod job;
pub mod store;
mod worker;

use std::collections::HashMap;
use std::future::Future;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use axum::Router;
use qready_core::io::Catalog;
use tokio::net::TcpListener;
use tokio::sync::mpsc;
use tokio::task::JoinHandle;

pub use job::{JobAnalytics, JobRecord, JobResults, JobState, ResultSummary};
pub use store::{FileStore, JobStore, StoreError};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub data_dir: PathBuf,
    /// Jobs solved concurrently.
    pub workers: usize,
    /// Largest accepted request body, in bytes.
    pub max_body_bytes: usize,
    /// Applied when a submission does not set `time_limit`.
    pub default_time_limit: f64,
    pub catalog: Catalog,
    /// Where catalog-name submissions look for instance files.
    pub instances_dir: Option<PathBuf>,
}

impl ServiceConfig {
    pub fn new(data_dir: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            data_dir: data_dir.into(),
            workers: 1,
            max_body_bytes: 64 * 1024 * 1024,
            default_time_limit: 60.0,
            catalog: Catalog::builtin(),
            instances_dir: None,
        }
    }
}

pub(crate) struct AppState {
    config: ServiceConfig,
    store: Arc<dyn JobStore>,
    jobs: Mutex<HashMap<String, JobRecord>>,
    queue: mpsc::UnboundedSender<String>,
    next_sequence: AtomicU64,
    stopping: AtomicBool,
}

impl AppState {
    pub(crate) fn record(&self, id: &str) -> Option<JobRecord> {
        self.jobs.lock().expect("job table poisoned").get(id).cloned()
    }

    /// Applies `update` if the state change it makes is allowed, then
    /// persists the record. Returns the updated record.
    pub(crate) fn transition(
        &self,
        id: &str,
        next: JobState,
        update: impl FnOnce(&mut JobRecord),
    ) -> Result<JobRecord, String> {
        let mut jobs = self.jobs.lock().expect("job table poisoned");
        let record = jobs.get_mut(id).ok_or_else(|| format!("unknown job {id}"))?;
        if !record.state.can_become(next) {
            return Err(format!("job {id} cannot move from {:?} to {next:?}", record.state));
        }
        let mut updated = record.clone();
        updated.state = next;
        update(&mut updated);
        self.store.save_record(&updated).map_err(|e| e.to_string())?;
        *record = updated.clone();
        Ok(updated)
    }

    pub(crate) fn insert(&self, record: JobRecord) -> Result<(), StoreError> {
        self.store.save_record(&record)?;
        self.jobs.lock().expect("job table poisoned").insert(record.job_id.clone(), record);
        Ok(())
    }

    pub(crate) fn counts(&self) -> HashMap<JobState, usize> {
        let mut counts = HashMap::new();
        for r in self.jobs.lock().expect("job table poisoned").values() {
            *counts.entry(r.state).or_insert(0) += 1;
        }
        counts
    }
}

/// A started service: the job table, the store and the worker tasks.
pub struct Service {
    state: Arc<AppState>,
    workers: Vec<JoinHandle<()>>,
}

impl Service {
    /// Opens the store, restores jobs and starts the workers. Must be
    /// called inside a Tokio runtime.
    pub fn start(config: ServiceConfig) -> Result<Self, StoreError> {
        let store = Arc::new(FileStore::open(&config.data_dir)?);
        Self::start_with_store(config, store)
    }

    pub fn start_with_store(config: ServiceConfig, store: Arc<dyn JobStore>) -> Result<Self, StoreError> {
        let mut records = store.load_records()?;
        records.sort_by_key(|r| r.sequence);
        let (tx, rx) = mpsc::unbounded_channel();
        let next_sequence = records.last().map_or(0, |r| r.sequence + 1);
        let mut jobs = HashMap::new();
        for mut record in records {
            match record.state {
                JobState::Queued => {
                    tx.send(record.job_id.clone()).expect("receiver alive");
                }
                JobState::Running => {
                    record.state = JobState::Failed;
                    record.finished_at = Some(job::now());
                    record.error = Some("interrupted by a service restart".into());
                    store.save_record(&record)?;
                }
                JobState::Completed | JobState::Failed => {}
            }
            jobs.insert(record.job_id.clone(), record);
        }
        let workers = config.workers.max(1);
        let state = Arc::new(AppState {
            config,
            store,
            jobs: Mutex::new(jobs),
            queue: tx,
            next_sequence: AtomicU64::new(next_sequence),
            stopping: AtomicBool::new(false),
        });
        let rx = Arc::new(tokio::sync::Mutex::new(rx));
        let workers = (0..workers).map(|_| tokio::spawn(worker::run(state.clone(), rx.clone()))).collect();
        Ok(Service { state, workers })
    }

    pub fn router(&self) -> Router {
        api::router(self.state.clone())
    }

    /// Stops taking jobs off the queue. A solve already in progress is left
    /// to finish but its outcome is not recorded, so the job reads as
    /// interrupted on the next start.
    pub fn stop(&self) {
        self.state.stopping.store(true, Ordering::SeqCst);
        for w in &self.workers {
            w.abort();
        }
    }

    /// Serves HTTP on `listener` until `shutdown` resolves, then stops.
    pub async fn serve(self, listener: TcpListener, shutdown: impl Future<Output = ()> + Send + 'static) -> std::io::Result<()> {
        let app = self.router();
        let result = axum::serve(listener, app).with_graceful_shutdown(shutdown).await;
        self.stop();
        result
    }
}

impl Drop for Service {
    fn drop(&mut self) {
        self.stop();
    }
}
