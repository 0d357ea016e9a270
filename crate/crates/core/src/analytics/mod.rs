//! Quality and diversity measures over sample sets: relative delta energy,
//! elite extraction, Hamming distance matrices, pair histograms and
//! hierarchical clustering.

pub mod cluster;
pub mod distance;
pub mod elite;

pub use cluster::{hierarchical_cluster, Dendrogram, Linkage, Merge};
pub use distance::{hamming, pair_histogram, DistanceMatrix, HistogramStats, PairHistogram};
pub use elite::{elite_filter, relative_delta_energy, AnalyticsError, EliteSet, DEFAULT_ELITE_TOLERANCE};

use serde::{Deserialize, Serialize};

use crate::sampler::SampleSet;

/// Everything the diversity views need for one sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub tolerance: f64,
    pub reference_energy: f64,
    pub elite_count: usize,
    pub num_variables: usize,
    pub histogram: PairHistogram,
    pub histogram_stats: Option<HistogramStats>,
    pub dendrogram: Dendrogram,
    /// Distances between elite members, in elite (energy) order.
    #[serde(skip)]
    pub distances: Option<DistanceMatrix>,
}

/// Runs elite filtering, distances, histogram and clustering in one pass.
pub fn diversity_report(set: &SampleSet, tolerance: f64, linkage: Linkage) -> Result<DiversityReport, AnalyticsError> {
    let elite = elite_filter(set, tolerance)?;
    let solutions: Vec<_> = elite.members.iter().map(|s| &s.bits).collect();
    let distances = DistanceMatrix::from_solutions(&solutions)?;
    let histogram = pair_histogram(&distances);
    let dendrogram = hierarchical_cluster(&distances, linkage);
    Ok(DiversityReport {
        tolerance,
        reference_energy: elite.reference_energy,
        elite_count: elite.len(),
        num_variables: distances.num_bits(),
        histogram_stats: histogram.stats(),
        histogram,
        dendrogram,
        distances: Some(distances),
    })
}
