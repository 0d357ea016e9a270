//! Worker tasks: pull job ids in FIFO order and solve on blocking threads.

use std::sync::atomic::Ordering;
use std::sync::Arc;

use qready_core::analytics::{diversity_report, Linkage, DEFAULT_ELITE_TOLERANCE};
use qready_core::io::{parse_instance_str, InstanceFormat};
use qready_core::results::SCHEMA_VERSION;
use qready_core::{sample, SamplerParams, Sense};
use tokio::sync::{mpsc, Mutex};

use crate::job::{now, JobAnalytics, JobResults, JobState, ResultSummary};
use crate::AppState;

pub(crate) async fn run(state: Arc<AppState>, queue: Arc<Mutex<mpsc::UnboundedReceiver<String>>>) {
    loop {
        let next = queue.lock().await.recv().await;
        let Some(id) = next else { return };
        if state.stopping.load(Ordering::SeqCst) {
            return;
        }
        let Ok(record) = state.transition(&id, JobState::Running, |r| r.started_at = Some(now())) else {
            continue;
        };
        let store = state.store.clone();
        let outcome = tokio::task::spawn_blocking(move || {
            let text = store.load_instance(&record.job_id).map_err(|e| e.to_string())?;
            solve(&record.job_id, &text, record.format, record.instance.sense, &record.params)
        })
        .await
        .unwrap_or_else(|e| Err(format!("solver panicked: {e}")));
        if state.stopping.load(Ordering::SeqCst) {
            return;
        }
        let finished = match outcome.and_then(|res| state.store.save_results(&res).map(|_| res).map_err(|e| e.to_string())) {
            Ok(res) => state.transition(&id, JobState::Completed, |r| {
                r.finished_at = Some(now());
                r.summary = Some(res.summary);
            }),
            Err(message) => state.transition(&id, JobState::Failed, |r| {
                r.finished_at = Some(now());
                r.error = Some(message);
            }),
        };
        if let Err(e) = finished {
            eprintln!("qready-service: {e}");
        }
    }
}

fn solve(
    job_id: &str,
    text: &str,
    format: InstanceFormat,
    sense: Sense,
    params: &SamplerParams,
) -> Result<JobResults, String> {
    let mut q = parse_instance_str(text, format).map_err(|e| e.to_string())?;
    if q.sense() != sense {
        q = q.negated();
    }
    let set = sample(&q, params).map_err(|e| e.to_string())?;
    let best = set.best().ok_or("sampler returned no samples")?;
    let summary = ResultSummary {
        best_energy: best.energy,
        best_objective: q.sense().to_native(best.energy),
        num_samples: set.len(),
        first_found_time: set.first_found_time(),
        end_time: set.end_time(),
    };
    let div = diversity_report(&set, DEFAULT_ELITE_TOLERANCE, Linkage::default()).map_err(|e| e.to_string())?;
    let analytics = JobAnalytics {
        tolerance: div.tolerance,
        reference_energy: div.reference_energy,
        elite_count: div.elite_count,
        histogram: div.histogram,
        histogram_stats: div.histogram_stats,
        dendrogram: div.dendrogram,
    };
    Ok(JobResults { job_id: job_id.to_string(), schema_version: SCHEMA_VERSION, summary, sample_set: set, analytics })
}
