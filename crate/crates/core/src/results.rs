//! Versioned JSON results file written by `solve` and read by `analyze`.
//!
//! Bit vectors are serialized as strings of '0'/'1'.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::{QuboInstance, Sense};
use crate::sampler::{SampleSet, SamplerParams};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub name: String,
    pub num_variables: usize,
    pub num_nonzeros: usize,
    pub density: f64,
    pub sense: Sense,
}

impl InstanceSummary {
    pub fn of(name: impl Into<String>, q: &QuboInstance) -> Self {
        InstanceSummary {
            name: name.into(),
            num_variables: q.num_variables(),
            num_nonzeros: q.num_nonzeros(),
            density: q.density(),
            sense: q.sense(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub schema_version: u32,
    pub instance: InstanceSummary,
    pub params: SamplerParams,
    pub sample_set: SampleSet,
}

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid results JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
}

impl ResultsFile {
    pub fn new(instance: InstanceSummary, params: SamplerParams, sample_set: SampleSet) -> Self {
        ResultsFile { schema_version: SCHEMA_VERSION, instance, params, sample_set }
    }

    pub fn from_json(text: &str) -> Result<Self, ResultsError> {
        let file: ResultsFile = serde_json::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(ResultsError::Version(file.schema_version));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("results serialize")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ResultsError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ResultsError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ResultsError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json())
            .map_err(|source| ResultsError::Io { path: path.display().to_string(), source })
    }
}
