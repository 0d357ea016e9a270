//! Job persistence.
//!
//! [`JobStore`] is the seam for other backends. [`FileStore`] keeps one
//! directory with three files per job:
//!
//! - `<id>.json`: the [`JobRecord`], rewritten on every state change
//! - `<id>.instance`: the submitted instance text
//! - `<id>.results.json`: samples and analytics, once completed
//!
//! Writes go to a temporary file first and are renamed into place, so a
//! crash never leaves a truncated record.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::job::{JobRecord, JobResults};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("job store I/O on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("corrupt job file {path}: {source}")]
    Corrupt {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub trait JobStore: Send + Sync {
    fn save_record(&self, record: &JobRecord) -> Result<(), StoreError>;
    fn save_instance(&self, job_id: &str, text: &str) -> Result<(), StoreError>;
    fn save_results(&self, results: &JobResults) -> Result<(), StoreError>;
    fn load_instance(&self, job_id: &str) -> Result<String, StoreError>;
    fn load_results(&self, job_id: &str) -> Result<Option<JobResults>, StoreError>;
    /// All stored records, in no particular order.
    fn load_records(&self) -> Result<Vec<JobRecord>, StoreError>;
}

#[derive(Debug, Clone)]
pub struct FileStore {
    dir: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.display().to_string(), source }
}

impl FileStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(FileStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn write_atomic(&self, file: &str, body: &[u8]) -> Result<(), StoreError> {
        let path = self.dir.join(file);
        let tmp = self.dir.join(format!(".{file}.tmp"));
        fs::write(&tmp, body).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))
    }

    fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, StoreError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|source| StoreError::Corrupt { path: path.display().to_string(), source })
    }
}

impl JobStore for FileStore {
    fn save_record(&self, record: &JobRecord) -> Result<(), StoreError> {
        let body = serde_json::to_vec_pretty(record).expect("records serialize");
        self.write_atomic(&format!("{}.json", record.job_id), &body)
    }

    fn save_instance(&self, job_id: &str, text: &str) -> Result<(), StoreError> {
        self.write_atomic(&format!("{job_id}.instance"), text.as_bytes())
    }

    fn save_results(&self, results: &JobResults) -> Result<(), StoreError> {
        let body = serde_json::to_vec(results).expect("results serialize");
        self.write_atomic(&format!("{}.results.json", results.job_id), &body)
    }

    fn load_instance(&self, job_id: &str) -> Result<String, StoreError> {
        let path = self.dir.join(format!("{job_id}.instance"));
        fs::read_to_string(&path).map_err(io_err(&path))
    }

    fn load_results(&self, job_id: &str) -> Result<Option<JobResults>, StoreError> {
        let path = self.dir.join(format!("{job_id}.results.json"));
        if !path.exists() {
            return Ok(None);
        }
        Self::read_json(&path).map(Some)
    }

    fn load_records(&self) -> Result<Vec<JobRecord>, StoreError> {
        let mut records = Vec::new();
        for entry in fs::read_dir(&self.dir).map_err(io_err(&self.dir))? {
            let path = entry.map_err(io_err(&self.dir))?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else { continue };
            if name.starts_with('.') || !name.ends_with(".json") || name.ends_with(".results.json") {
                continue;
            }
            records.push(Self::read_json(&path)?);
        }
        Ok(records)
    }
}
