//! Job records and the payloads served for them.

use std::time::{SystemTime, UNIX_EPOCH};

use qready_core::analytics::{Dendrogram, HistogramStats, PairHistogram};
use qready_core::io::InstanceFormat;
use qready_core::results::InstanceSummary;
use qready_core::{SampleSet, SamplerParams};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Queued,
    Running,
    Completed,
    Failed,
}

impl JobState {
    /// Allowed moves: queued → running → completed | failed. A queued job
    /// may also fail directly (e.g. it could not be restored).
    pub fn can_become(self, next: JobState) -> bool {
        matches!(
            (self, next),
            (JobState::Queued, JobState::Running)
                | (JobState::Queued, JobState::Failed)
                | (JobState::Running, JobState::Completed)
                | (JobState::Running, JobState::Failed)
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            JobState::Queued => "queued",
            JobState::Running => "running",
            JobState::Completed => "completed",
            JobState::Failed => "failed",
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, JobState::Completed | JobState::Failed)
    }
}

/// Headline numbers of a finished job.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultSummary {
    pub best_energy: f64,
    /// Best energy in the instance's native sense.
    pub best_objective: f64,
    pub num_samples: usize,
    pub first_found_time: f64,
    pub end_time: f64,
}

/// Everything the status endpoint reports; samples live elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub job_id: String,
    /// Submission order, used to restore FIFO order after a restart.
    pub sequence: u64,
    pub state: JobState,
    /// Seconds since the Unix epoch.
    pub submitted_at: f64,
    pub started_at: Option<f64>,
    pub finished_at: Option<f64>,
    pub format: InstanceFormat,
    pub catalog_name: Option<String>,
    pub instance: InstanceSummary,
    pub params: SamplerParams,
    pub summary: Option<ResultSummary>,
    pub error: Option<String>,
}

/// Elite analytics computed once when a job completes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobAnalytics {
    pub tolerance: f64,
    pub reference_energy: f64,
    pub elite_count: usize,
    pub histogram: PairHistogram,
    pub histogram_stats: Option<HistogramStats>,
    pub dendrogram: Dendrogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobResults {
    pub job_id: String,
    pub schema_version: u32,
    pub summary: ResultSummary,
    pub sample_set: SampleSet,
    pub analytics: JobAnalytics,
}

pub fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transitions_only_move_forward() {
        use JobState::*;
        assert!(Queued.can_become(Running));
        assert!(Running.can_become(Completed));
        assert!(Running.can_become(Failed));
        assert!(!Running.can_become(Queued));
        assert!(!Completed.can_become(Running));
        assert!(!Failed.can_become(Completed));
        assert!(!Queued.can_become(Completed));
    }

    #[test]
    fn states_serialize_lowercase() {
        assert_eq!(serde_json::to_string(&JobState::Completed).unwrap(), "\"completed\"");
    }
}
