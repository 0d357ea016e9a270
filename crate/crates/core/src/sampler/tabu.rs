//! Multi-start tabu search over single-bit flips.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::heap::DeltaHeap;
use super::params::{QualityBias, SamplerParams};
use super::pool::{SamplePool, SampleSet};
use super::derive_seed;
use crate::error::{QuboError, SolveError};
use crate::qubo::{QuboInstance, Solution};

/// Below this off-diagonal density moves are picked from a delta heap
/// instead of a full scan.
pub const SPARSE_DENSITY: f64 = 0.01;

/// How often (in moves) the clock and stop conditions are checked.
const CHECK_INTERVAL: u64 = 64;

/// Search state of one tabu walk.
///
/// `delta[i]` always equals `flip_delta(q, current, i)` between moves.
pub(crate) struct TabuState<'q> {
    q: &'q QuboInstance,
    pub(crate) current: Solution,
    pub(crate) current_energy: f64,
    pub(crate) delta: Vec<f64>,
    tabu_until: Vec<u64>,
    pub(crate) move_counter: u64,
    heap: Option<DeltaHeap>,
}

impl<'q> TabuState<'q> {
    pub(crate) fn new(q: &'q QuboInstance, start: Solution, use_heap: bool) -> Self {
        let n = q.num_variables();
        let mut state = TabuState {
            q,
            current: start,
            current_energy: 0.0,
            delta: vec![0.0; n],
            tabu_until: vec![0; n],
            move_counter: 0,
            heap: None,
        };
        state.reset_deltas();
        if use_heap {
            state.heap = Some(DeltaHeap::new(&state.delta));
        }
        state
    }

    /// Moves to a new starting point, recomputing everything from scratch.
    pub(crate) fn restart(&mut self, start: Solution) {
        self.current = start;
        self.tabu_until.iter_mut().for_each(|t| *t = 0);
        self.move_counter = 0;
        self.reset_deltas();
        if self.heap.is_some() {
            self.heap = Some(DeltaHeap::new(&self.delta));
        }
    }

    fn reset_deltas(&mut self) {
        let bits = self.current.as_slice();
        for (i, d) in self.delta.iter_mut().enumerate() {
            *d = self.q.flip_delta_unchecked(bits, i);
        }
        self.current_energy = self.q.energy_unchecked(bits);
    }

    #[inline]
    fn is_tabu(&self, i: usize) -> bool {
        self.tabu_until[i] > self.move_counter
    }

    /// Smallest flip delta over all variables, tabu or not.
    pub(crate) fn min_delta(&self) -> f64 {
        match &self.heap {
            Some(h) => h.min_key().unwrap_or(0.0),
            None => self.delta.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Best admissible move: the lowest delta among non-tabu variables and
    /// tabu variables whose flip would beat `global_best` (aspiration).
    /// When everything is blocked, the variable released soonest is used.
    pub(crate) fn select_move(&self, global_best: f64, rng: &mut impl Rng) -> usize {
        let admissible = |i: usize, d: f64| !self.is_tabu(i) || self.current_energy + d < global_best;
        let chosen = match &self.heap {
            Some(h) => h.first_accepted(admissible),
            None => {
                let mut best: Option<(usize, f64)> = None;
                let mut ties = 0u32;
                for (i, &d) in self.delta.iter().enumerate() {
                    if !admissible(i, d) {
                        continue;
                    }
                    match best {
                        Some((_, bd)) if d > bd => {}
                        Some((_, bd)) if d == bd => {
                            ties += 1;
                            if rng.random_range(0..ties) == 0 {
                                best = Some((i, d));
                            }
                        }
                        _ => {
                            best = Some((i, d));
                            ties = 1;
                        }
                    }
                }
                best.map(|(i, _)| i)
            }
        };
        chosen.unwrap_or_else(|| {
            (0..self.delta.len()).min_by_key(|&i| (self.tabu_until[i], i)).expect("non-empty instance")
        })
    }

    /// Flips `i`, updates the neighbors' deltas in O(deg(i)) and makes `i`
    /// tabu for the next `tenure` moves.
    pub(crate) fn apply(&mut self, i: usize, tenure: u64) {
        let d = self.delta[i];
        let direction = if self.current.get(i) == 0 { 1.0 } else { -1.0 };
        self.current.flip(i);
        self.current_energy += d;
        self.delta[i] = -d;
        if let Some(h) = self.heap.as_mut() {
            h.update(i, -d);
        }
        let (neighbors, weights) = self.q.neighbor_slices(i);
        let bits = self.current.as_slice();
        for (&j, &w) in neighbors.iter().zip(weights) {
            let j = j as usize;
            let sign = if bits[j] == 0 { 1.0 } else { -1.0 };
            self.delta[j] += sign * w * direction;
            if let Some(h) = self.heap.as_mut() {
                h.update(j, self.delta[j]);
            }
        }
        self.move_counter += 1;
        self.tabu_until[i] = self.move_counter + tenure;
    }
}

fn random_solution(n: usize, rng: &mut impl Rng) -> Solution {
    Solution::from_bools((0..n).map(|_| rng.random_bool(0.5)))
}

/// Shared stop conditions for all workers of one sampling run.
pub(crate) struct StopRule<'a> {
    pub(crate) params: &'a SamplerParams,
    pub(crate) stop: &'a AtomicBool,
}

impl StopRule<'_> {
    pub(crate) fn should_stop(&self, pool: &SamplePool<'_>) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        let done = pool.elapsed() >= self.params.time_limit
            || (self.params.quality_bias == QualityBias::Speed
                && pool.seconds_since_improvement() >= self.params.no_progress_fraction * self.params.time_limit);
        if done {
            self.stop.store(true, Ordering::Relaxed);
        }
        done
    }
}

/// Jittered tenure: `base` ±25%, capped so some variable is always free.
fn draw_tenure(base: usize, n: usize, rng: &mut impl Rng) -> u64 {
    let jittered = (base as f64 * rng.random_range(0.75..=1.25)).round() as usize;
    jittered.min(n.saturating_sub(1) / 2) as u64
}

/// One tabu walk with restarts, feeding `pool` until a stop condition fires.
pub(crate) fn run_single_start(
    q: &QuboInstance,
    params: &SamplerParams,
    start_seed: u64,
    pool: &SamplePool<'_>,
    rule: &StopRule<'_>,
) -> u64 {
    let n = q.num_variables();
    let mut rng = ChaCha8Rng::seed_from_u64(start_seed);
    let base_tenure = params.resolved_tenure(n);
    let stagnation = params.resolved_stagnation(n);
    let use_heap = q.density() < SPARSE_DENSITY;

    let mut state = TabuState::new(q, random_solution(n, &mut rng), use_heap);
    let mut incumbent = state.current_energy;
    if let Some(exact) = pool.offer(state.current.as_slice(), state.current_energy) {
        state.current_energy = exact;
    }
    let mut since_improvement = 0u64;
    let mut moves = 0u64;

    loop {
        if moves.is_multiple_of(CHECK_INTERVAL) && rule.should_stop(pool) {
            break;
        }
        if params.max_moves.is_some_and(|m| moves >= m) {
            break;
        }

        // a 1-flip local minimum is worth keeping even if it is not a new best
        if state.min_delta() >= 0.0 && pool.might_accept(state.current_energy) {
            if let Some(exact) = pool.offer(state.current.as_slice(), state.current_energy) {
                state.current_energy = exact;
            }
        }

        let i = state.select_move(pool.best_energy(), &mut rng);
        let tenure = draw_tenure(base_tenure, n, &mut rng);
        state.apply(i, tenure);
        moves += 1;

        if state.current_energy < incumbent {
            incumbent = state.current_energy;
            since_improvement = 0;
            if let Some(exact) = pool.offer(state.current.as_slice(), state.current_energy) {
                state.current_energy = exact;
            }
        } else {
            since_improvement += 1;
            if since_improvement >= stagnation {
                state.restart(random_solution(n, &mut rng));
                incumbent = state.current_energy;
                since_improvement = 0;
                if let Some(exact) = pool.offer(state.current.as_slice(), state.current_energy) {
                    state.current_energy = exact;
                }
            }
        }
    }
    moves
}

/// Samples `q` with `num_starts` concurrent tabu walks sharing one pool.
pub fn sample(q: &QuboInstance, params: &SamplerParams) -> Result<SampleSet, SolveError> {
    params.validate()?;
    if q.num_variables() == 0 {
        return Err(QuboError::InvalidInput("instance has no variables".into()).into());
    }
    let clock = Instant::now();
    let pool = SamplePool::new(q, params.max_samples, clock);
    let stop = AtomicBool::new(false);
    let rule = StopRule { params, stop: &stop };
    let starts = params.resolved_starts();

    std::thread::scope(|scope| {
        for k in 1..starts {
            let (pool, rule) = (&pool, &rule);
            scope.spawn(move || run_single_start(q, params, derive_seed(params.seed, k as u64), pool, rule));
        }
        run_single_start(q, params, derive_seed(params.seed, 0), &pool, &rule);
        stop.store(true, Ordering::Relaxed);
    });

    let end_time = pool.elapsed();
    Ok(pool.into_sample_set(end_time))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::Sense;
    use rand::Rng;

    fn random_instance(n: usize, density: f64, seed: u64) -> QuboInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i..n {
                if i == j || rng.random_bool(density) {
                    entries.push((i, j, rng.random_range(-10.0..10.0)));
                }
            }
        }
        QuboInstance::from_entries(n, entries, Sense::Minimize).unwrap()
    }

    #[test]
    fn delta_cache_tracks_random_flips() {
        for (seed, use_heap) in [(1, false), (2, true), (3, false), (4, true)] {
            let q = random_instance(40, 0.3, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut state = TabuState::new(&q, random_solution(40, &mut rng), use_heap);
            for _ in 0..500 {
                let i = rng.random_range(0..40);
                state.apply(i, 0);
            }
            for i in 0..40 {
                let fresh = q.flip_delta(&state.current, i).unwrap();
                assert!((state.delta[i] - fresh).abs() <= 1e-9 * fresh.abs().max(1.0));
            }
            let exact = q.energy(&state.current).unwrap();
            assert!((state.current_energy - exact).abs() <= 1e-9 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn escapes_local_minimum_with_least_worsening_flip() {
        // x = 0 is a local minimum: every flip costs its diagonal
        let q = QuboInstance::from_entries(3, [(0, 0, 3.0), (1, 1, 1.0), (2, 2, 2.0)], Sense::Minimize).unwrap();
        for use_heap in [false, true] {
            let state = TabuState::new(&q, Solution::zeros(3), use_heap);
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            assert!(state.min_delta() >= 0.0);
            assert_eq!(state.select_move(0.0, &mut rng), 1);
        }
    }

    #[test]
    fn tabu_moves_are_skipped_unless_they_aspire() {
        let q = QuboInstance::from_entries(3, [(0, 0, -5.0), (1, 1, -1.0), (2, 2, 2.0)], Sense::Minimize).unwrap();
        for use_heap in [false, true] {
            let mut state = TabuState::new(&q, Solution::zeros(3), use_heap);
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            // flip 0 and straight back, leaving 0 tabu at energy 0
            state.apply(0, 5);
            state.tabu_until[0] = 0;
            state.apply(0, 5);
            assert_eq!(state.current_energy, 0.0);
            // incumbent -5 already known: flipping 0 only ties it, so it stays tabu
            assert_eq!(state.select_move(-5.0, &mut rng), 1);
            // incumbent -4: flipping 0 reaches -5 and aspiration overrides tabu
            assert_eq!(state.select_move(-4.0, &mut rng), 0);
        }
    }

    #[test]
    fn all_tabu_falls_back_to_earliest_release() {
        let q = QuboInstance::from_entries(2, [(0, 0, 1.0), (1, 1, 1.0)], Sense::Minimize).unwrap();
        let mut state = TabuState::new(&q, Solution::zeros(2), false);
        state.apply(0, 10);
        state.apply(1, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(state.select_move(f64::NEG_INFINITY, &mut rng), 0);
    }

    #[test]
    fn tenure_jitter_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let t = draw_tenure(100, 10_000, &mut rng);
            assert!((75..=125).contains(&t), "{t}");
        }
        assert_eq!(draw_tenure(10, 1, &mut rng), 0);
        assert!(draw_tenure(10, 5, &mut rng) <= 2);
    }
}
