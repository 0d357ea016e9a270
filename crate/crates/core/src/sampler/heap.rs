//! Indexed binary min-heap over per-variable flip deltas.
//!
//! Used for sparse instances, where a flip touches only a handful of
//! deltas and a full O(n) scan per move would dominate.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

#[derive(Debug, Clone)]
pub(crate) struct DeltaHeap {
    // heap of variable ids
    heap: Vec<u32>,
    // position of each variable inside `heap`
    pos: Vec<u32>,
    keys: Vec<f64>,
}

#[derive(Clone, Copy, PartialEq)]
struct Probe {
    key: f64,
    var: u32,
    slot: u32,
}

impl Eq for Probe {}

impl Ord for Probe {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key).then(self.var.cmp(&other.var))
    }
}

impl PartialOrd for Probe {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl DeltaHeap {
    pub(crate) fn new(keys: &[f64]) -> Self {
        let n = keys.len();
        let mut h = DeltaHeap {
            heap: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
            keys: keys.to_vec(),
        };
        for slot in (0..n / 2).rev() {
            h.sift_down(slot);
        }
        h
    }

    #[inline]
    fn less(&self, a: u32, b: u32) -> bool {
        let (ka, kb) = (self.keys[a as usize], self.keys[b as usize]);
        ka < kb || (ka == kb && a < b)
    }

    #[inline]
    fn swap(&mut self, s: usize, t: usize) {
        self.heap.swap(s, t);
        self.pos[self.heap[s] as usize] = s as u32;
        self.pos[self.heap[t] as usize] = t as u32;
    }

    fn sift_up(&mut self, mut slot: usize) {
        while slot > 0 {
            let parent = (slot - 1) / 2;
            if self.less(self.heap[slot], self.heap[parent]) {
                self.swap(slot, parent);
                slot = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut slot: usize) {
        let n = self.heap.len();
        loop {
            let (l, r) = (2 * slot + 1, 2 * slot + 2);
            let mut best = slot;
            if l < n && self.less(self.heap[l], self.heap[best]) {
                best = l;
            }
            if r < n && self.less(self.heap[r], self.heap[best]) {
                best = r;
            }
            if best == slot {
                break;
            }
            self.swap(slot, best);
            slot = best;
        }
    }

    pub(crate) fn update(&mut self, var: usize, key: f64) {
        let old = self.keys[var];
        self.keys[var] = key;
        let slot = self.pos[var] as usize;
        if key < old {
            self.sift_up(slot);
        } else if key > old {
            self.sift_down(slot);
        }
    }

    pub(crate) fn min_key(&self) -> Option<f64> {
        self.heap.first().map(|&v| self.keys[v as usize])
    }

    /// Visits variables in ascending `(key, var)` order and returns the
    /// first one accepted by `accept`. Cost grows with the number of
    /// rejected variables, not with the heap size.
    pub(crate) fn first_accepted(&self, mut accept: impl FnMut(usize, f64) -> bool) -> Option<usize> {
        let root = *self.heap.first()?;
        let mut frontier = BinaryHeap::new();
        frontier.push(Reverse(Probe { key: self.keys[root as usize], var: root, slot: 0 }));
        while let Some(Reverse(p)) = frontier.pop() {
            if accept(p.var as usize, p.key) {
                return Some(p.var as usize);
            }
            for child in [2 * p.slot as usize + 1, 2 * p.slot as usize + 2] {
                if let Some(&var) = self.heap.get(child) {
                    frontier.push(Reverse(Probe { key: self.keys[var as usize], var, slot: child as u32 }));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn ordered_traversal_matches_sort(
            keys in prop::collection::vec(-50i32..50, 1..60),
            updates in prop::collection::vec((0usize..60, -50i32..50), 0..40),
            skip in 0usize..60,
        ) {
            let mut keys: Vec<f64> = keys.into_iter().map(f64::from).collect();
            let mut heap = DeltaHeap::new(&keys);
            for (var, key) in updates {
                let var = var % keys.len();
                keys[var] = f64::from(key);
                heap.update(var, f64::from(key));
            }
            let mut order: Vec<usize> = (0..keys.len()).collect();
            order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
            prop_assert_eq!(heap.min_key(), Some(keys[order[0]]));

            // reject the first `skip` variables in order; the next one must come back
            let mut visited = 0;
            let got = heap.first_accepted(|_, _| { visited += 1; visited > skip });
            prop_assert_eq!(got, order.get(skip).copied());
        }
    }
}
