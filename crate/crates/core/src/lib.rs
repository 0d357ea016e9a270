//! Classical QUBO sampling with a quantum-ready decomposition seam.
//!
//! - [`qubo`]: the QUBO model, exact and incremental energies
//! - [`maxcut`]: Max-Cut graphs and their QUBO reduction
//! - [`io`]: MQlib-style instance files and the instance catalog
//! - [`sampler`]: multi-start tabu search
//! - [`decompose`]: subQUBO clamping with pluggable inner samplers
//! - [`analytics`]: relative delta energy, elite sets, diversity
//! - [`harness`]: repeated benchmark runs and report emission

pub mod analytics;
pub mod decompose;
pub mod error;
pub mod harness;
pub mod io;
pub mod maxcut;
pub mod qubo;
pub mod results;
pub mod sampler;

pub use error::{QuboError, SolveError};
pub use maxcut::{from_maxcut, MaxCutGraph};
pub use qubo::{density, energies_close, energy_tolerance, Entry, QuboInstance, Sense, Solution};
pub use sampler::{sample, QualityBias, Sample, SampleSet, SamplerParams, Setting, TracePoint};
