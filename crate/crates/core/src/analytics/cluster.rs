//! Agglomerative hierarchical clustering on a distance matrix.
//!
//! Leaves are clusters `0..k`; the cluster created by merge `m` gets id
//! `k + m`. Each step merges the closest pair of active clusters, ties
//! broken by the smaller `(cluster_a, cluster_b)` id pair.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::distance::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Linkage {
    Single,
    #[default]
    Average,
    Complete,
}

impl FromStr for Linkage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(Linkage::Single),
            "average" => Ok(Linkage::Average),
            "complete" => Ok(Linkage::Complete),
            other => Err(format!("unknown linkage '{other}' (expected single, average or complete)")),
        }
    }
}

impl fmt::Display for Linkage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Linkage::Single => "single",
            Linkage::Average => "average",
            Linkage::Complete => "complete",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub cluster_a: usize,
    pub cluster_b: usize,
    pub height: f64,
    pub new_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub linkage: Linkage,
    pub merges: Vec<Merge>,
    /// Leaves in left-to-right order of the final tree.
    pub leaf_order: Vec<usize>,
}

impl Dendrogram {
    pub fn num_leaves(&self) -> usize {
        self.leaf_order.len()
    }

    pub fn heights(&self) -> Vec<f64> {
        self.merges.iter().map(|m| m.height).collect()
    }
}

/// Naive O(k³) agglomeration with Lance–Williams distance updates.
pub fn hierarchical_cluster(m: &DistanceMatrix, linkage: Linkage) -> Dendrogram {
    let k = m.size();
    if k == 0 {
        return Dendrogram { linkage, merges: Vec::new(), leaf_order: Vec::new() };
    }
    let mut dist: Vec<f64> = (0..k * k).map(|idx| f64::from(m.get(idx / k, idx % k))).collect();
    // slot -> (cluster id, size) while active
    let mut slots: Vec<Option<(usize, usize)>> = (0..k).map(|i| Some((i, 1))).collect();
    let mut merges = Vec::with_capacity(k - 1);

    for step in 0..k - 1 {
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for s in 0..k {
            let Some((id_s, _)) = slots[s] else { continue };
            for t in s + 1..k {
                let Some((id_t, _)) = slots[t] else { continue };
                let d = dist[s * k + t];
                let (a, b) = (id_s.min(id_t), id_s.max(id_t));
                let better = match best {
                    None => true,
                    Some((bd, ba, bb, _, _)) => d < bd || (d == bd && (a, b) < (ba, bb)),
                };
                if better {
                    best = Some((d, a, b, s, t));
                }
            }
        }
        let (height, a, b, s, t) = best.expect("at least two active clusters");
        let (_, size_s) = slots[s].expect("active");
        let (_, size_t) = slots[t].expect("active");
        let new_size = size_s + size_t;

        for u in 0..k {
            if u == s || u == t || slots[u].is_none() {
                continue;
            }
            let (du_s, du_t) = (dist[u * k + s], dist[u * k + t]);
            let merged = match linkage {
                Linkage::Single => du_s.min(du_t),
                Linkage::Complete => du_s.max(du_t),
                Linkage::Average => (size_s as f64 * du_s + size_t as f64 * du_t) / new_size as f64,
            };
            dist[u * k + s] = merged;
            dist[s * k + u] = merged;
        }
        slots[s] = Some((k + step, new_size));
        slots[t] = None;
        merges.push(Merge { cluster_a: a, cluster_b: b, height, new_size });
    }

    let leaf_order = leaf_order(k, &merges);
    Dendrogram { linkage, merges, leaf_order }
}

fn leaf_order(k: usize, merges: &[Merge]) -> Vec<usize> {
    let mut order = Vec::with_capacity(k);
    let root = if merges.is_empty() { 0 } else { k + merges.len() - 1 };
    let mut stack = vec![root];
    while let Some(id) = stack.pop() {
        if id < k {
            order.push(id);
        } else {
            let m = merges[id - k];
            stack.push(m.cluster_b);
            stack.push(m.cluster_a);
        }
    }
    order
}
