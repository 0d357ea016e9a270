//! Tabu-search sampler producing energy-ordered sample sets.

mod heap;
pub mod params;
pub(crate) mod pool;
pub(crate) mod tabu;

pub use params::{QualityBias, SamplerParams, Setting};
pub use pool::{Sample, SampleSet, TracePoint};
pub use tabu::{sample, SPARSE_DENSITY};

/// SplitMix64 step; derives independent per-stream seeds from one seed.
pub(crate) fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
