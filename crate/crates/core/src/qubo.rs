//! QUBO data model with exact and incremental energy evaluation.
//!
//! The energy of an assignment `x` is `Σ_{i ≤ j} Q_ij · x_i · x_j` over the
//! stored upper-triangular coefficients. Everything is minimization;
//! problems that were maximized at their source are negated on ingest and
//! remember their original direction in [`Sense`].

use std::borrow::Borrow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::QuboError;

/// Optimization direction of the problem a QUBO was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

impl Sense {
    /// Converts a minimization energy back into the source problem's objective.
    pub fn to_native(self, energy: f64) -> f64 {
        match self {
            Sense::Minimize => energy,
            Sense::Maximize => -energy,
        }
    }

    /// Converts a native objective value into a minimization energy.
    pub fn to_energy(self, native: f64) -> f64 {
        self.to_native(native)
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        })
    }
}

impl std::str::FromStr for Sense {
    type Err = QuboError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "minimize" | "min" => Ok(Sense::Minimize),
            "maximize" | "max" => Ok(Sense::Maximize),
            other => Err(QuboError::InvalidInput(format!("unknown sense '{other}'"))),
        }
    }
}

/// A binary assignment, one byte per variable holding 0 or 1.
///
/// Ordering is lexicographic on the bits, which is what the sample pool uses
/// to break energy ties.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution(Vec<u8>);

impl Solution {
    pub fn zeros(n: usize) -> Self {
        Solution(vec![0; n])
    }

    /// Builds a solution from 0/1 values; any non-zero byte is treated as 1.
    pub fn from_bits<I: IntoIterator<Item = u8>>(bits: I) -> Self {
        Solution(bits.into_iter().map(|b| u8::from(b != 0)).collect())
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        Solution(bits.into_iter().map(u8::from).collect())
    }

    /// Parses a string of '0'/'1' characters.
    pub fn from_bit_string(s: &str) -> Result<Self, QuboError> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(QuboError::InvalidInput(format!(
                    "bit strings may only contain '0' and '1', found '{other}'"
                ))),
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(Solution)
    }

    pub fn to_bit_string(&self) -> String {
        self.0.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: u8) {
        self.0[i] = u8::from(bit != 0);
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.0[i] ^= 1;
    }

    /// Returns a copy with bit `i` flipped.
    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.flip(i);
        out
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

impl Borrow<[u8]> for Solution {
    fn borrow(&self) -> &[u8] {
        &self.0
    }
}

impl From<Vec<u8>> for Solution {
    fn from(bits: Vec<u8>) -> Self {
        Solution::from_bits(bits)
    }
}

/// One stored upper-triangular coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

/// Per-variable neighbor lists in compressed row form.
#[derive(Debug, Clone, Default)]
struct Adjacency {
    diagonal: Vec<f64>,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    weights: Vec<f64>,
}

/// Sparse upper-triangular QUBO over `num_variables` binary variables.
///
/// Immutable after construction. The neighbor index used by
/// [`QuboInstance::flip_delta`] is built once here, so the instance can be
/// shared across sampler threads by reference.
#[derive(Debug, Clone)]
pub struct QuboInstance {
    num_variables: usize,
    entries: Vec<Entry>,
    // entries[row_offsets[i]..row_offsets[i + 1]] are the entries with first index i
    row_offsets: Vec<usize>,
    sense: Sense,
    adjacency: Adjacency,
}

impl QuboInstance {
    /// Builds an instance from `(i, j, value)` triples.
    ///
    /// Pairs with `i > j` are folded onto `(j, i)` and repeated pairs are
    /// summed, so a full symmetric matrix may be passed directly. Entries
    /// that sum to zero are dropped.
    pub fn from_entries<I>(num_variables: usize, entries: I, sense: Sense) -> Result<Self, QuboError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut raw: Vec<(usize, usize, f64)> = Vec::new();
        for (i, j, value) in entries {
            for index in [i, j] {
                if index >= num_variables {
                    return Err(QuboError::IndexOutOfRange { index, num_variables });
                }
            }
            if !value.is_finite() {
                return Err(QuboError::NonFinite { i, j });
            }
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            raw.push((a, b, value));
        }
        // stable sort keeps the input order of duplicates, so folding is deterministic
        raw.sort_by_key(|x| (x.0, x.1));

        let mut folded: Vec<Entry> = Vec::with_capacity(raw.len());
        for (i, j, value) in raw {
            match folded.last_mut() {
                Some(last) if last.i == i && last.j == j => last.value += value,
                _ => folded.push(Entry { i, j, value }),
            }
        }
        folded.retain(|e| e.value != 0.0);
        if let Some(e) = folded.iter().find(|e| !e.value.is_finite()) {
            return Err(QuboError::NonFinite { i: e.i, j: e.j });
        }
        Ok(Self::from_canonical(num_variables, folded, sense))
    }

    /// An instance with no coefficients; every assignment has energy 0.
    pub fn empty(num_variables: usize, sense: Sense) -> Self {
        Self::from_canonical(num_variables, Vec::new(), sense)
    }

    // `entries` must already be sorted, unique, in range and non-zero.
    fn from_canonical(num_variables: usize, entries: Vec<Entry>, sense: Sense) -> Self {
        let mut row_offsets = vec![0usize; num_variables + 1];
        for e in &entries {
            row_offsets[e.i + 1] += 1;
        }
        for i in 0..num_variables {
            row_offsets[i + 1] += row_offsets[i];
        }
        let adjacency = build_adjacency(num_variables, &entries);
        QuboInstance { num_variables, entries, row_offsets, sense, adjacency }
    }

    pub fn num_variables(&self) -> usize {
        self.num_variables
    }

    /// Number of stored (non-zero) coefficients, diagonal included.
    pub fn num_nonzeros(&self) -> usize {
        self.entries.len()
    }

    /// Number of stored off-diagonal coefficients.
    pub fn num_interactions(&self) -> usize {
        self.adjacency.neighbors.len() / 2
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn with_sense(mut self, sense: Sense) -> Self {
        self.sense = sense;
        self
    }

    /// Negates every coefficient and flips the sense.
    ///
    /// A coefficient file written for a maximization objective becomes a
    /// minimization QUBO whose native values are the original objective.
    pub fn negated(&self) -> Self {
        let entries = self.entries.iter().map(|e| Entry { value: -e.value, ..*e }).collect();
        let sense = match self.sense {
            Sense::Minimize => Sense::Maximize,
            Sense::Maximize => Sense::Minimize,
        };
        Self::from_canonical(self.num_variables, entries, sense)
    }

    /// Stored entries in `(i, j)` order.
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Coefficient for the pair `(i, j)` in either order, 0 if absent.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        if b >= self.num_variables {
            return 0.0;
        }
        let row = &self.entries[self.row_offsets[a]..self.row_offsets[a + 1]];
        row.binary_search_by(|e| e.j.cmp(&b)).map(|k| row[k].value).unwrap_or(0.0)
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.adjacency.diagonal[i]
    }

    /// Off-diagonal neighbors of `i` with their coupling coefficients.
    pub fn neighbors(&self, i: usize) -> impl ExactSizeIterator<Item = (usize, f64)> + '_ {
        let range = self.adjacency.offsets[i]..self.adjacency.offsets[i + 1];
        self.adjacency.neighbors[range.clone()]
            .iter()
            .zip(&self.adjacency.weights[range])
            .map(|(&j, &w)| (j as usize, w))
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency.offsets[i + 1] - self.adjacency.offsets[i]
    }

    /// Off-diagonal density: interactions over `n(n-1)/2`.
    pub fn density(&self) -> f64 {
        density(self.num_variables, self.num_interactions()).unwrap_or(0.0)
    }

    fn check_len(&self, x: &Solution) -> Result<(), QuboError> {
        if x.len() != self.num_variables {
            return Err(QuboError::Dimension { expected: self.num_variables, actual: x.len() });
        }
        Ok(())
    }

    /// Energy of `x`, summed over stored entries in canonical order.
    pub fn energy(&self, x: &Solution) -> Result<f64, QuboError> {
        self.check_len(x)?;
        Ok(self.energy_unchecked(x.as_slice()))
    }

    pub(crate) fn energy_unchecked(&self, bits: &[u8]) -> f64 {
        let mut total = 0.0;
        for (i, &bit) in bits.iter().enumerate() {
            if bit == 0 {
                continue;
            }
            for e in &self.entries[self.row_offsets[i]..self.row_offsets[i + 1]] {
                if bits[e.j] == 1 {
                    total += e.value;
                }
            }
        }
        total
    }

    /// `energy(flip(x, i)) - energy(x)` in O(deg(i)).
    pub fn flip_delta(&self, x: &Solution, i: usize) -> Result<f64, QuboError> {
        self.check_len(x)?;
        if i >= self.num_variables {
            return Err(QuboError::IndexOutOfRange { index: i, num_variables: self.num_variables });
        }
        Ok(self.flip_delta_unchecked(x.as_slice(), i))
    }

    #[inline]
    pub(crate) fn flip_delta_unchecked(&self, bits: &[u8], i: usize) -> f64 {
        let mut field = self.adjacency.diagonal[i];
        let range = self.adjacency.offsets[i]..self.adjacency.offsets[i + 1];
        for (&j, &w) in self.adjacency.neighbors[range.clone()].iter().zip(&self.adjacency.weights[range]) {
            if bits[j as usize] == 1 {
                field += w;
            }
        }
        if bits[i] == 0 {
            field
        } else {
            -field
        }
    }

    /// Raw neighbor slices for the sampler's inner loop.
    #[inline]
    pub(crate) fn neighbor_slices(&self, i: usize) -> (&[u32], &[f64]) {
        let range = self.adjacency.offsets[i]..self.adjacency.offsets[i + 1];
        (&self.adjacency.neighbors[range.clone()], &self.adjacency.weights[range])
    }
}

fn build_adjacency(n: usize, entries: &[Entry]) -> Adjacency {
    let mut diagonal = vec![0.0; n];
    let mut counts = vec![0usize; n + 1];
    for e in entries {
        if e.i == e.j {
            diagonal[e.i] = e.value;
        } else {
            counts[e.i + 1] += 1;
            counts[e.j + 1] += 1;
        }
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let offsets = counts.clone();
    let total = offsets[n];
    let mut neighbors = vec![0u32; total];
    let mut weights = vec![0.0; total];
    let mut cursor = counts;
    for e in entries.iter().filter(|e| e.i != e.j) {
        for (from, to) in [(e.i, e.j), (e.j, e.i)] {
            let slot = cursor[from];
            neighbors[slot] = to as u32;
            weights[slot] = e.value;
            cursor[from] += 1;
        }
    }
    Adjacency { diagonal, offsets, neighbors, weights }
}

/// Ratio of off-diagonal nonzeros to the `n(n-1)/2` possible pairs.
pub fn density(n: usize, nnz: usize) -> Result<f64, QuboError> {
    if n < 2 {
        return Err(QuboError::InvalidInput(format!("density needs at least 2 variables, got {n}")));
    }
    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
    Ok(nnz as f64 / pairs)
}

/// Absolute tolerance for comparing energies against `reference`.
///
/// Anchored at `max(1, |reference|)` so both tiny and very large energies
/// get a meaningful bound.
#[inline]
pub fn energy_tolerance(reference: f64, relative: f64) -> f64 {
    relative * reference.abs().max(1.0)
}

#[inline]
pub fn energies_close(a: f64, b: f64, relative: f64) -> bool {
    (a - b).abs() <= energy_tolerance(b, relative)
}
