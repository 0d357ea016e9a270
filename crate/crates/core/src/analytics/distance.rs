//! Pairwise Hamming distances and their histogram.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::elite::AnalyticsError;
use crate::qubo::Solution;

/// Number of positions where `a` and `b` differ.
pub fn hamming(a: &Solution, b: &Solution) -> Result<u32, AnalyticsError> {
    if a.len() != b.len() {
        return Err(AnalyticsError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.as_slice().iter().zip(b.as_slice()).filter(|(x, y)| x != y).count() as u32)
}

fn pack(bits: &[u8]) -> Vec<u64> {
    bits.chunks(64)
        .map(|chunk| chunk.iter().enumerate().fold(0u64, |w, (k, &b)| w | (u64::from(b) << k)))
        .collect()
}

/// Symmetric `k × k` matrix of Hamming distances between solutions of
/// `num_bits` variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    size: usize,
    num_bits: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub fn from_solutions(solutions: &[&Solution]) -> Result<Self, AnalyticsError> {
        let k = solutions.len();
        let num_bits = solutions.first().map_or(0, |s| s.len());
        if let Some(bad) = solutions.iter().find(|s| s.len() != num_bits) {
            return Err(AnalyticsError::LengthMismatch(num_bits, bad.len()));
        }
        let packed: Vec<Vec<u64>> = solutions.iter().map(|s| pack(s.as_slice())).collect();
        let rows: Vec<Vec<u32>> = (0..k)
            .into_par_iter()
            .map(|a| {
                (0..k)
                    .map(|b| packed[a].iter().zip(&packed[b]).map(|(x, y)| (x ^ y).count_ones()).sum())
                    .collect()
            })
            .collect();
        Ok(DistanceMatrix { size: k, num_bits, data: rows.concat() })
    }

    /// Builds a matrix from explicit distances (row-major, `size × size`).
    pub fn from_raw(size: usize, num_bits: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), size * size, "distance data must be size × size");
        DistanceMatrix { size, num_bits, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.data[a * self.size + b]
    }

    /// Distance divided by the number of variables.
    pub fn normalized(&self, a: usize, b: usize) -> f64 {
        if self.num_bits == 0 {
            0.0
        } else {
            f64::from(self.get(a, b)) / self.num_bits as f64
        }
    }

    pub fn row(&self, a: usize) -> &[u32] {
        &self.data[a * self.size..(a + 1) * self.size]
    }

    /// The matrix with rows and columns permuted into `order`.
    pub fn reordered(&self, order: &[usize]) -> DistanceMatrix {
        let data = order.iter().flat_map(|&a| order.iter().map(move |&b| self.get(a, b))).collect();
        DistanceMatrix { size: order.len(), num_bits: self.num_bits, data }
    }

    /// CSV with a header of column indices, one row per solution.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index");
        for b in 0..self.size {
            out.push_str(&format!(",{b}"));
        }
        out.push('\n');
        for a in 0..self.size {
            out.push_str(&a.to_string());
            for d in self.row(a) {
                out.push_str(&format!(",{d}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Count of unordered solution pairs per Hamming distance.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PairHistogram {
    pub counts: BTreeMap<u32, u64>,
}

/// Mean, variance and skewness of the pair-distance distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramStats {
    pub pairs: u64,
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
}

impl PairHistogram {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn stats(&self) -> Option<HistogramStats> {
        let pairs = self.total();
        if pairs == 0 {
            return None;
        }
        let n = pairs as f64;
        let mean = self.counts.iter().map(|(&d, &c)| f64::from(d) * c as f64).sum::<f64>() / n;
        let moment = |p: i32| self.counts.iter().map(|(&d, &c)| (f64::from(d) - mean).powi(p) * c as f64).sum::<f64>() / n;
        let variance = moment(2);
        let skewness = if variance > 0.0 { moment(3) / variance.powf(1.5) } else { 0.0 };
        Some(HistogramStats { pairs, mean, variance, skewness })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("distance,pairs\n");
        for (d, c) in &self.counts {
            out.push_str(&format!("{d},{c}\n"));
        }
        out
    }
}

/// Histogram over the strict upper triangle of `m`.
pub fn pair_histogram(m: &DistanceMatrix) -> PairHistogram {
    let mut counts = BTreeMap::new();
    for a in 0..m.size() {
        for b in a + 1..m.size() {
            *counts.entry(m.get(a, b)).or_insert(0) += 1;
        }
    }
    PairHistogram { counts }
}
