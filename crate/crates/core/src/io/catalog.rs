//! The benchmark instance catalog.
//!
//! CSV schema: `name,num_variables,num_nonzeros,density,best_known_energy,sense`
//! with an optional trailing `hardness_disputed` column. `best_known_energy`
//! is empty when no reference value is recorded and is stored in the
//! instance's native sense.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qubo::{density, Sense};

const BUILTIN_CATALOG: &str = include_str!("../../data/mqlib_catalog.csv");

/// Allowed gap between a row's printed density and the recomputed one.
pub const DENSITY_TOLERANCE: f64 = 0.00005;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub num_variables: usize,
    pub num_nonzeros: usize,
    pub density: f64,
    pub best_known_energy: Option<f64>,
    pub sense: Sense,
    /// Listed as hard but solved best-known by more than one heuristic.
    #[serde(default)]
    pub hardness_disputed: bool,
}

impl CatalogEntry {
    /// Best-known value converted to the minimization convention.
    pub fn best_known_min_energy(&self) -> Option<f64> {
        self.best_known_energy.map(|v| self.sense.to_energy(v))
    }
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("cannot read catalog {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("catalog schema mismatch: {0}")]
    Schema(String),
    #[error("catalog row '{name}': density {listed} disagrees with recomputed {computed:.6}")]
    Density { name: String, listed: f64, computed: f64 },
    #[error("catalog has duplicate instance name '{0}'")]
    Duplicate(String),
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

const REQUIRED_COLUMNS: [&str; 6] =
    ["name", "num_variables", "num_nonzeros", "density", "best_known_energy", "sense"];

impl Catalog {
    /// The 45-instance catalog shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_reader(BUILTIN_CATALOG.as_bytes()).expect("built-in catalog is valid")
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, CatalogError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| CatalogError::Schema(e.to_string()))?.clone();
        let names: Vec<&str> = headers.iter().collect();
        if names.len() < REQUIRED_COLUMNS.len() || names[..REQUIRED_COLUMNS.len()] != REQUIRED_COLUMNS {
            return Err(CatalogError::Schema(format!(
                "expected header starting with {}, found {}",
                REQUIRED_COLUMNS.join(","),
                names.join(",")
            )));
        }

        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for row in rdr.deserialize::<CatalogEntry>() {
            let entry = row.map_err(|e| CatalogError::Schema(e.to_string()))?;
            let computed = density(entry.num_variables, entry.num_nonzeros)
                .map_err(|e| CatalogError::Schema(format!("row '{}': {e}", entry.name)))?;
            if (computed - entry.density).abs() > DENSITY_TOLERANCE {
                return Err(CatalogError::Density { name: entry.name, listed: entry.density, computed });
            }
            if !seen.insert(entry.name.clone()) {
                return Err(CatalogError::Duplicate(entry.name));
            }
            entries.push(entry);
        }
        Ok(Catalog { entries })
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Loads and validates a catalog CSV from disk.
pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|source| CatalogError::Io { path: path.display().to_string(), source })?;
    Catalog::from_reader(std::io::BufReader::new(file))
}
