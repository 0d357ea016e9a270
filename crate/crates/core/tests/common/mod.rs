//! Brute-force oracles shared by the integration tests. They work on raw
//! triplets and never call the incremental code under test.
#![allow(dead_code)]

use qready_core::{QuboInstance, Sense, Solution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Raw `(i, j, value)` triplets, possibly with `i > j` and repeats.
pub type Triplets = Vec<(usize, usize, f64)>;

pub fn random_triplets(rng: &mut impl Rng, n: usize, density: f64, integer: bool) -> Triplets {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            if i == j || rng.random_bool(density) {
                let v = if integer {
                    f64::from(rng.random_range(-10i32..=10))
                } else {
                    rng.random_range(-5.0..5.0)
                };
                // half the off-diagonal terms arrive as lower-triangle entries
                let (a, b) = if i != j && rng.random_bool(0.5) { (j, i) } else { (i, j) };
                out.push((a, b, v));
            }
        }
    }
    out
}

pub fn build(n: usize, t: &Triplets) -> QuboInstance {
    QuboInstance::from_entries(n, t.iter().copied(), Sense::Minimize).unwrap()
}

pub fn random_qubo(seed: u64, n: usize, density: f64) -> (QuboInstance, Triplets) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_triplets(&mut rng, n, density, true);
    (build(n, &t), t)
}

/// Energy straight from the triplets.
pub fn naive_energy(t: &Triplets, x: &[u8]) -> f64 {
    t.iter().map(|&(i, j, v)| v * f64::from(x[i]) * f64::from(x[j])).sum()
}

pub fn bits_of(mask: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((mask >> i) & 1) as u8).collect()
}

/// Exhaustive minimum over all `2^n` assignments.
pub fn brute_force_min(n: usize, t: &Triplets) -> f64 {
    (0..1u64 << n).map(|m| naive_energy(t, &bits_of(m, n))).fold(f64::INFINITY, f64::min)
}

/// Every assignment with its energy, for tiny instances.
pub fn all_states(n: usize, t: &Triplets) -> Vec<(Solution, f64)> {
    (0..1u64 << n)
        .map(|m| {
            let bits = bits_of(m, n);
            let e = naive_energy(t, &bits);
            (Solution::from_bits(bits), e)
        })
        .collect()
}
