use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::energy_tolerance;
use crate::sampler::{Sample, SampleSet};

/// Default relative tolerance for elite membership.
pub const DEFAULT_ELITE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("tolerance must be finite and positive, got {0}")]
    InvalidTolerance(f64),
    #[error("reference energy is zero; the relative delta is undefined (use the absolute delta)")]
    ZeroReference,
    #[error("solutions have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

/// Samples whose energy is within `tolerance · max(1, |best|)` of the best.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliteSet {
    pub members: Vec<Sample>,
    pub reference_energy: f64,
    pub tolerance: f64,
}

impl EliteSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub fn elite_filter(set: &SampleSet, tolerance: f64) -> Result<EliteSet, AnalyticsError> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(AnalyticsError::InvalidTolerance(tolerance));
    }
    let reference = set.best_energy().ok_or(AnalyticsError::EmptySampleSet)?;
    let bound = energy_tolerance(reference, tolerance);
    // samples are sorted by energy, so members form a prefix
    let members = set
        .samples()
        .iter()
        .take_while(|s| (s.energy - reference).abs() <= bound)
        .cloned()
        .collect();
    Ok(EliteSet { members, reference_energy: reference, tolerance })
}

/// `(reference − candidate) / |reference|` under minimization: positive
/// means the candidate is better, negative means the reference is.
pub fn relative_delta_energy(reference: f64, candidate: f64) -> Result<f64, AnalyticsError> {
    if reference == 0.0 {
        return Err(AnalyticsError::ZeroReference);
    }
    Ok((reference - candidate) / reference.abs())
}
