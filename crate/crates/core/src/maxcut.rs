//! Max-Cut graphs and their reduction to minimization QUBOs.
//!
//! Cutting edge `(u, v, w)` contributes `w·(x_u + x_v − 2·x_u·x_v)`, so
//! negating gives diagonal terms `−Σ w` per vertex and `+2w` per edge.

use std::collections::HashSet;

use crate::error::QuboError;
use crate::qubo::{QuboInstance, Sense, Solution};

#[derive(Debug, Clone, PartialEq)]
pub struct MaxCutGraph {
    num_vertices: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl MaxCutGraph {
    /// Builds a graph, normalizing each edge to `u < v`.
    ///
    /// Self-loops, duplicate edges (in either orientation), out-of-range
    /// endpoints and non-finite weights are rejected.
    pub fn new<I>(num_vertices: usize, edges: I) -> Result<Self, QuboError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (u, v, w) in edges {
            for index in [u, v] {
                if index >= num_vertices {
                    return Err(QuboError::IndexOutOfRange { index, num_variables: num_vertices });
                }
            }
            if u == v {
                return Err(QuboError::InvalidInput(format!("self-loop on vertex {u}")));
            }
            if !w.is_finite() {
                return Err(QuboError::NonFinite { i: u, j: v });
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(QuboError::InvalidInput(format!("duplicate edge ({a}, {b})")));
            }
            out.push((a, b, w));
        }
        Ok(MaxCutGraph { num_vertices, edges: out })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    /// Total weight of edges whose endpoints lie on different sides.
    pub fn cut_value(&self, side: &Solution) -> Result<f64, QuboError> {
        if side.len() != self.num_vertices {
            return Err(QuboError::Dimension { expected: self.num_vertices, actual: side.len() });
        }
        Ok(self
            .edges
            .iter()
            .filter(|&&(u, v, _)| side.get(u) != side.get(v))
            .map(|&(_, _, w)| w)
            .sum())
    }
}

/// Minimization QUBO whose energy is the negated cut value.
pub fn from_maxcut(graph: &MaxCutGraph) -> QuboInstance {
    let terms = graph
        .edges
        .iter()
        .flat_map(|&(u, v, w)| [(u, u, -w), (v, v, -w), (u, v, 2.0 * w)]);
    QuboInstance::from_entries(graph.num_vertices, terms, Sense::Maximize)
        .expect("graph invariants guarantee a valid QUBO")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle() {
        let g = MaxCutGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let q = from_maxcut(&g);
        for i in 0..3 {
            assert_eq!(q.get(i, i), -2.0);
        }
        assert_eq!(q.get(0, 1), 2.0);
        assert_eq!(q.get(1, 2), 2.0);
        assert_eq!(q.sense(), Sense::Maximize);
        assert_eq!(q.energy(&Solution::from_bits([1, 0, 0])).unwrap(), -2.0);
    }

    #[test]
    fn single_edge() {
        let g = MaxCutGraph::new(2, [(1, 0, 5.0)]).unwrap();
        let q = from_maxcut(&g);
        assert_eq!(q.get(0, 0), -5.0);
        assert_eq!(q.get(1, 1), -5.0);
        assert_eq!(q.get(0, 1), 10.0);
        assert_eq!(q.energy(&Solution::from_bits([1, 0])).unwrap(), -5.0);
    }

    #[test]
    fn empty_graph() {
        let q = from_maxcut(&MaxCutGraph::new(4, []).unwrap());
        assert_eq!(q.num_nonzeros(), 0);
        assert_eq!(q.energy(&Solution::from_bits([1, 0, 1, 1])).unwrap(), 0.0);
    }

    #[test]
    fn rejects_invalid_graphs() {
        assert!(MaxCutGraph::new(2, [(1, 1, 1.0)]).is_err());
        assert!(MaxCutGraph::new(2, [(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(MaxCutGraph::new(2, [(0, 2, 1.0)]).is_err());
    }
}
