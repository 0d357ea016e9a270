//! Seeded instance generators shared by the benchmarks.

use qready_core::{QuboInstance, Sense, Solution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random integer QUBO with every diagonal term and roughly `density` of
/// the off-diagonal pairs.
pub fn random_qubo(seed: u64, n: usize, density: f64) -> QuboInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for i in 0..n {
        entries.push((i, i, f64::from(rng.random_range(-10i32..=10))));
        for j in i + 1..n {
            if rng.random_bool(density) {
                entries.push((i, j, f64::from(rng.random_range(-10i32..=10))));
            }
        }
    }
    QuboInstance::from_entries(n, entries, Sense::Minimize).expect("generated entries are in range")
}

pub fn random_solutions(seed: u64, count: usize, n: usize) -> Vec<Solution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| Solution::from_bools((0..n).map(|_| rng.random_bool(0.5)))).collect()
}
