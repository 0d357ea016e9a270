//! SubQUBO decomposition.
//!
//! Variables outside a chosen subset are clamped to the incumbent, their
//! couplings folded into the subset's diagonal, and the resulting small
//! QUBO is handed to an [`InnerSampler`]. The inner sampler is the seam
//! where a hardware-backed solver can replace the classical one.

use std::sync::atomic::AtomicBool;
use std::time::{Duration, Instant};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QuboError, SolveError};
use crate::qubo::{QuboInstance, Sense, Solution};
use crate::sampler::pool::SamplePool;
use crate::sampler::tabu::StopRule;
use crate::sampler::{derive_seed, sample, QualityBias, SampleSet, SamplerParams, Setting};

/// A clamped subproblem over `variables`.
///
/// For every assignment `y` of the subset,
/// `energy(sub_q, y) + offset == energy(q, x ⊕ y)`.
#[derive(Debug, Clone)]
pub struct SubProblem {
    pub variables: Vec<usize>,
    pub sub_q: QuboInstance,
    pub offset: f64,
}

impl SubProblem {
    /// Writes the sub-assignment `y` into a copy of `x`.
    pub fn compose(&self, x: &Solution, y: &Solution) -> Solution {
        let mut out = x.clone();
        for (k, &v) in self.variables.iter().enumerate() {
            out.set(v, y.get(k));
        }
        out
    }
}

fn validate_subset(n: usize, subset: &[usize]) -> Result<Vec<Option<usize>>, QuboError> {
    if subset.is_empty() {
        return Err(QuboError::InvalidInput("subset must not be empty".into()));
    }
    let mut position = vec![None; n];
    for (k, &v) in subset.iter().enumerate() {
        if v >= n {
            return Err(QuboError::IndexOutOfRange { index: v, num_variables: n });
        }
        if position[v].replace(k).is_some() {
            return Err(QuboError::InvalidInput(format!("variable {v} listed twice in subset")));
        }
    }
    Ok(position)
}

fn sub_entries(q: &QuboInstance, x: &Solution, subset: &[usize], position: &[Option<usize>]) -> Vec<(usize, usize, f64)> {
    let mut entries = Vec::new();
    for (k, &s) in subset.iter().enumerate() {
        let mut linear = q.diagonal(s);
        for (j, w) in q.neighbors(s) {
            match position[j] {
                Some(m) if j > s => entries.push((k, m, w)),
                Some(_) => {}
                None => {
                    if x.get(j) == 1 {
                        linear += w;
                    }
                }
            }
        }
        entries.push((k, k, linear));
    }
    entries
}

/// Clamps everything outside `subset` to `x`.
///
/// The offset is summed directly over the entries that avoid the subset,
/// which costs O(nnz).
pub fn clamp_subproblem(q: &QuboInstance, x: &Solution, subset: &[usize]) -> Result<SubProblem, QuboError> {
    if x.len() != q.num_variables() {
        return Err(QuboError::Dimension { expected: q.num_variables(), actual: x.len() });
    }
    let position = validate_subset(q.num_variables(), subset)?;
    let entries = sub_entries(q, x, subset, &position);
    let sub_q = QuboInstance::from_entries(subset.len(), entries, Sense::Minimize)?;
    let offset = q
        .entries()
        .iter()
        .filter(|e| position[e.i].is_none() && position[e.j].is_none())
        .filter(|e| x.get(e.i) == 1 && x.get(e.j) == 1)
        .map(|e| e.value)
        .sum();
    Ok(SubProblem { variables: subset.to_vec(), sub_q, offset })
}

/// Like [`clamp_subproblem`] but derives the offset from the known energy
/// of `x` in O(Σ deg) instead of O(nnz).
fn clamp_with_energy(q: &QuboInstance, x: &Solution, x_energy: f64, subset: &[usize]) -> SubProblem {
    let position = validate_subset(q.num_variables(), subset).expect("subset built internally");
    let entries = sub_entries(q, x, subset, &position);
    let sub_q = QuboInstance::from_entries(subset.len(), entries, Sense::Minimize).expect("finite coefficients");
    let y = Solution::from_bits(subset.iter().map(|&s| x.get(s)));
    let offset = x_energy - sub_q.energy_unchecked(y.as_slice());
    SubProblem { variables: subset.to_vec(), sub_q, offset }
}

/// Picks `k` variables: the `⌈k/2⌉` with the largest `|flip_delta|`, then
/// `⌊k/2⌋` others uniformly at random.
pub fn select_subset(q: &QuboInstance, x: &Solution, k: usize, rng: &mut impl Rng) -> Result<Vec<usize>, QuboError> {
    let n = q.num_variables();
    if k == 0 || k > n {
        return Err(QuboError::InvalidInput(format!("subset size {k} must lie in [1, {n}]")));
    }
    if x.len() != n {
        return Err(QuboError::Dimension { expected: n, actual: x.len() });
    }
    let mut impact: Vec<(f64, usize)> =
        (0..n).map(|i| (q.flip_delta_unchecked(x.as_slice(), i).abs(), i)).collect();
    let top = k.div_ceil(2);
    // largest impact first, lower index on ties
    let cmp = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
    if top < n {
        impact.select_nth_unstable_by(top - 1, cmp);
    }
    let mut chosen: Vec<usize> = impact[..top].iter().map(|&(_, i)| i).collect();
    chosen.sort_unstable();

    let rest: Vec<usize> = impact[top..].iter().map(|&(_, i)| i).collect();
    let extra = k - top;
    for idx in index::sample(rng, rest.len(), extra) {
        chosen.push(rest[idx]);
    }
    Ok(chosen)
}

/// A solver for subproblems. Implementations must return samples valid for
/// the QUBO they were given.
pub trait InnerSampler: Send + Sync {
    /// Largest subproblem this sampler accepts.
    fn capacity(&self) -> usize;

    fn solve(&self, sub_q: &QuboInstance, budget: Duration, seed: u64) -> Result<SampleSet, SolveError>;
}

/// Tabu search as the inner sampler.
#[derive(Debug, Clone)]
pub struct TabuInner {
    pub params: SamplerParams,
    pub capacity: usize,
}

impl Default for TabuInner {
    fn default() -> Self {
        TabuInner {
            params: SamplerParams {
                max_samples: 16,
                num_starts: Setting::Fixed(1),
                quality_bias: QualityBias::Speed,
                max_moves: Some(4000),
                stagnation_restart: Setting::Fixed(400),
                ..Default::default()
            },
            capacity: usize::MAX,
        }
    }
}

impl InnerSampler for TabuInner {
    fn capacity(&self) -> usize {
        self.capacity
    }

    fn solve(&self, sub_q: &QuboInstance, budget: Duration, seed: u64) -> Result<SampleSet, SolveError> {
        let params = SamplerParams { time_limit: budget.as_secs_f64().max(1e-3), seed, ..self.params.clone() };
        sample(sub_q, &params)
    }
}

/// Exhaustive enumeration; only for small subproblems.
#[derive(Debug, Clone)]
pub struct ExhaustiveInner {
    pub max_samples: usize,
}

impl Default for ExhaustiveInner {
    fn default() -> Self {
        ExhaustiveInner { max_samples: 16 }
    }
}

impl ExhaustiveInner {
    pub const MAX_VARIABLES: usize = 20;
}

impl InnerSampler for ExhaustiveInner {
    fn capacity(&self) -> usize {
        Self::MAX_VARIABLES
    }

    fn solve(&self, sub_q: &QuboInstance, _budget: Duration, _seed: u64) -> Result<SampleSet, SolveError> {
        let n = sub_q.num_variables();
        if n == 0 || n > Self::MAX_VARIABLES {
            return Err(SolveError::Other(format!(
                "exhaustive sampler handles 1..={} variables, got {n}",
                Self::MAX_VARIABLES
            )));
        }
        let clock = Instant::now();
        let pool = SamplePool::new(sub_q, self.max_samples.max(1), clock);
        // Gray-code walk: one flip per step
        let mut x = Solution::zeros(n);
        let mut energy = 0.0;
        pool.offer(x.as_slice(), energy);
        for step in 1u64..(1u64 << n) {
            let i = step.trailing_zeros() as usize;
            energy += sub_q.flip_delta_unchecked(x.as_slice(), i);
            x.flip(i);
            if pool.might_accept(energy) {
                if let Some(exact) = pool.offer(x.as_slice(), energy) {
                    energy = exact;
                }
            }
        }
        let end = pool.elapsed();
        Ok(pool.into_sample_set(end))
    }
}

/// Outer-loop settings for [`solve_large`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposeOptions {
    pub subsize: usize,
    /// Wall-clock slice handed to each inner call.
    pub inner_time_slice: Duration,
    /// Deterministic cap on outer iterations.
    pub max_iterations: Option<u64>,
    /// Seed the incumbent with one short tabu pass instead of a random draw.
    pub tabu_warm_start: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            subsize: 64,
            inner_time_slice: Duration::from_millis(200),
            max_iterations: None,
            tabu_warm_start: false,
        }
    }
}

/// Solves `q` by repeated clamping and inner solves.
///
/// A sub-solution is adopted only when it changes the incumbent and does
/// not raise its energy, so the incumbent energy never increases.
pub fn solve_large(
    q: &QuboInstance,
    params: &SamplerParams,
    inner: &dyn InnerSampler,
    options: &DecomposeOptions,
) -> Result<SampleSet, SolveError> {
    solve_large_observed(q, params, inner, options, &mut |_| {})
}

pub(crate) fn solve_large_observed(
    q: &QuboInstance,
    params: &SamplerParams,
    inner: &dyn InnerSampler,
    options: &DecomposeOptions,
    on_iteration: &mut dyn FnMut(f64),
) -> Result<SampleSet, SolveError> {
    params.validate()?;
    let n = q.num_variables();
    if n == 0 {
        return Err(QuboError::InvalidInput("instance has no variables".into()).into());
    }
    if options.subsize == 0 {
        return Err(SolveError::InvalidParams("subsize must be positive".into()));
    }
    let subsize = options.subsize.min(n).min(inner.capacity());
    let clock = Instant::now();
    let pool = SamplePool::new(q, params.max_samples, clock);
    let stop = AtomicBool::new(false);
    let rule = StopRule { params, stop: &stop };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let remaining = |pool: &SamplePool<'_>| Duration::from_secs_f64((params.time_limit - pool.elapsed()).max(0.0));

    let mut incumbent = if options.tabu_warm_start {
        let warm = SamplerParams {
            time_limit: (params.time_limit * 0.1).max(1e-3),
            num_starts: Setting::Fixed(1),
            max_samples: 1,
            seed: derive_seed(params.seed, u64::MAX),
            max_moves: Some((20 * n) as u64),
            ..params.clone()
        };
        sample(q, &warm)?.into_samples().swap_remove(0).bits
    } else {
        Solution::from_bools((0..n).map(|_| rng.random_bool(0.5)))
    };
    let mut incumbent_energy = pool.offer(incumbent.as_slice(), f64::NEG_INFINITY).unwrap_or_else(|| q.energy_unchecked(incumbent.as_slice()));

    let mut iteration = 0u64;
    loop {
        if rule.should_stop(&pool) || options.max_iterations.is_some_and(|m| iteration >= m) {
            break;
        }
        let single_pass = subsize == n;
        let subset: Vec<usize> =
            if single_pass { (0..n).collect() } else { select_subset(q, &incumbent, subsize, &mut rng)? };
        let sub = clamp_with_energy(q, &incumbent, incumbent_energy, &subset);
        let budget = if single_pass { remaining(&pool) } else { options.inner_time_slice.min(remaining(&pool)) };
        let result = inner
            .solve(&sub.sub_q, budget, derive_seed(params.seed, iteration + 1))
            .map_err(|e| SolveError::Inner { iteration, source: Box::new(e) })?;

        let mut best: Option<(Solution, f64)> = None;
        for s in result.samples() {
            let full = sub.compose(&incumbent, &s.bits);
            let approx = s.energy + sub.offset;
            let energy = pool.offer(full.as_slice(), approx).unwrap_or(approx);
            if best.as_ref().is_none_or(|(_, e)| energy < *e) {
                best = Some((full, energy));
            }
        }
        if let Some((candidate, _)) = best {
            if candidate != incumbent {
                let exact = q.energy_unchecked(candidate.as_slice());
                if exact <= incumbent_energy {
                    incumbent = candidate;
                    incumbent_energy = exact;
                }
            }
        }
        on_iteration(incumbent_energy);
        iteration += 1;
        if single_pass {
            break;
        }
    }

    let end_time = pool.elapsed();
    Ok(pool.into_sample_set(end_time))
}
