//! Samples, sample sets and the shared pool the search threads feed.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::qubo::{energy_tolerance, QuboInstance, Solution};

impl Serialize for Solution {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bit_string())
    }
}

impl<'de> Deserialize<'de> for Solution {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Solution::from_bit_string(&text).map_err(serde::de::Error::custom)
    }
}

/// One assignment with its energy and the time it entered the pool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub bits: Solution,
    pub energy: f64,
    /// Seconds since sampling started.
    pub found_at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub time: f64,
    pub energy: f64,
}

fn sample_order(a: &Sample, b: &Sample) -> Ordering {
    a.energy.total_cmp(&b.energy).then_with(|| a.bits.cmp(&b.bits))
}

/// Energy-ordered, bit-distinct pool of samples plus search timing.
///
/// Samples are sorted by energy, ties broken by lexicographic bits.
/// `first_found_time` is when the best energy first appeared and
/// `end_time` is when the search loop exited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSampleSet")]
pub struct SampleSet {
    samples: Vec<Sample>,
    first_found_time: f64,
    end_time: f64,
    best_energy_trace: Vec<TracePoint>,
}

#[derive(Deserialize)]
struct RawSampleSet {
    samples: Vec<Sample>,
    first_found_time: f64,
    end_time: f64,
    #[serde(default)]
    best_energy_trace: Vec<TracePoint>,
}

impl TryFrom<RawSampleSet> for SampleSet {
    type Error = String;

    fn try_from(raw: RawSampleSet) -> Result<Self, Self::Error> {
        if let Some(s) = raw.samples.iter().find(|s| !s.energy.is_finite()) {
            return Err(format!("sample {} has a non-finite energy", s.bits.to_bit_string()));
        }
        Ok(SampleSet::new(raw.samples, raw.first_found_time, raw.end_time, raw.best_energy_trace))
    }
}

impl SampleSet {
    /// Sorts and deduplicates `samples` (first occurrence of a bit vector wins).
    pub fn new(
        samples: Vec<Sample>,
        first_found_time: f64,
        end_time: f64,
        best_energy_trace: Vec<TracePoint>,
    ) -> Self {
        let mut seen = HashSet::new();
        let mut samples: Vec<Sample> = samples.into_iter().filter(|s| seen.insert(s.bits.clone())).collect();
        samples.sort_by(sample_order);
        SampleSet { samples, first_found_time, end_time, best_energy_trace }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    pub fn best_energy(&self) -> Option<f64> {
        self.best().map(|s| s.energy)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first_found_time(&self) -> f64 {
        self.first_found_time
    }

    pub fn end_time(&self) -> f64 {
        self.end_time
    }

    pub fn best_energy_trace(&self) -> &[TracePoint] {
        &self.best_energy_trace
    }

    pub fn into_samples(self) -> Vec<Sample> {
        self.samples
    }

    /// Drops samples beyond `max` (the worst ones).
    pub fn truncate(&mut self, max: usize) {
        self.samples.truncate(max);
    }
}

#[derive(Debug, Clone)]
struct PoolKey {
    energy: f64,
    bits: Solution,
}

impl PartialEq for PoolKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for PoolKey {}

impl Ord for PoolKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.energy.total_cmp(&other.energy).then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for PoolKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Default)]
struct PoolState {
    ranked: BTreeMap<PoolKey, f64>,
    members: HashSet<Solution>,
    trace: Vec<TracePoint>,
}

/// Thread-safe pool capped at `max_samples`.
///
/// Energies are recomputed from scratch on insertion, so drift in a
/// caller's incremental bookkeeping never reaches the output. The best
/// energy and admission threshold are mirrored in atomics so hot loops can
/// read them without locking.
pub(crate) struct SamplePool<'q> {
    q: &'q QuboInstance,
    clock: Instant,
    max_samples: usize,
    state: Mutex<PoolState>,
    threshold: AtomicU64,
    best: AtomicU64,
    last_improvement_nanos: AtomicU64,
}

impl<'q> SamplePool<'q> {
    pub(crate) fn new(q: &'q QuboInstance, max_samples: usize, clock: Instant) -> Self {
        SamplePool {
            q,
            clock,
            max_samples,
            state: Mutex::new(PoolState::default()),
            threshold: AtomicU64::new(f64::INFINITY.to_bits()),
            best: AtomicU64::new(f64::INFINITY.to_bits()),
            last_improvement_nanos: AtomicU64::new(0),
        }
    }

    pub(crate) fn elapsed(&self) -> f64 {
        self.clock.elapsed().as_secs_f64()
    }

    pub(crate) fn best_energy(&self) -> f64 {
        f64::from_bits(self.best.load(AtomicOrdering::Acquire))
    }

    /// Seconds since the last global improvement (or since start).
    pub(crate) fn seconds_since_improvement(&self) -> f64 {
        let last = self.last_improvement_nanos.load(AtomicOrdering::Acquire) as f64 * 1e-9;
        self.elapsed() - last
    }

    /// Cheap pre-check: could a state with roughly this energy get in?
    #[inline]
    pub(crate) fn might_accept(&self, approx_energy: f64) -> bool {
        let threshold = f64::from_bits(self.threshold.load(AtomicOrdering::Relaxed));
        threshold.is_infinite() || approx_energy <= threshold + energy_tolerance(threshold, 1e-9)
    }

    /// Offers an assignment. Returns its exact energy when it was computed.
    pub(crate) fn offer(&self, bits: &[u8], approx_energy: f64) -> Option<f64> {
        if !self.might_accept(approx_energy) {
            return None;
        }
        if self.state.lock().expect("pool lock poisoned").members.contains(bits) {
            return None;
        }
        let exact = self.q.energy_unchecked(bits);
        self.insert(bits, exact);
        Some(exact)
    }

    fn insert(&self, bits: &[u8], energy: f64) {
        let mut state = self.state.lock().expect("pool lock poisoned");
        if state.members.contains(bits) {
            return;
        }
        let key = PoolKey { energy, bits: Solution::from(bits.to_vec()) };
        if state.ranked.len() >= self.max_samples {
            let worst = state.ranked.keys().next_back().expect("full pool is non-empty");
            if key >= *worst {
                return;
            }
        }
        let now = self.elapsed();
        state.members.insert(key.bits.clone());
        state.ranked.insert(key, now);
        while state.ranked.len() > self.max_samples {
            let (evicted, _) = state.ranked.pop_last().expect("non-empty");
            state.members.remove(&evicted.bits);
        }
        if state.ranked.len() >= self.max_samples {
            let worst = state.ranked.keys().next_back().expect("non-empty").energy;
            self.threshold.store(worst.to_bits(), AtomicOrdering::Relaxed);
        }
        if energy < self.best_energy() {
            self.best.store(energy.to_bits(), AtomicOrdering::Release);
            self.last_improvement_nanos.store((now * 1e9) as u64, AtomicOrdering::Release);
            state.trace.push(TracePoint { time: now, energy });
        }
    }

    pub(crate) fn into_sample_set(self, end_time: f64) -> SampleSet {
        let state = self.state.into_inner().expect("pool lock poisoned");
        let samples: Vec<Sample> = state
            .ranked
            .into_iter()
            .map(|(key, found_at)| Sample { bits: key.bits, energy: key.energy, found_at })
            .collect();
        let first_found_time = state.trace.last().map_or(0.0, |p| p.time);
        SampleSet {
            samples,
            first_found_time,
            end_time: end_time.max(first_found_time),
            best_energy_trace: state.trace,
        }
    }
}
