//! Diversity analytics: histogram mass, elite tolerance, dendrogram
//! monotonicity, permutation equivariance and cluster separation.

use std::collections::BTreeSet;

use proptest::prelude::*;
use qready_core::analytics::{
    diversity_report, elite_filter, hamming, hierarchical_cluster, pair_histogram, relative_delta_energy,
    Dendrogram, DistanceMatrix, Linkage,
};
use qready_core::{Sample, SampleSet, Solution};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LINKAGES: [Linkage; 3] = [Linkage::Single, Linkage::Average, Linkage::Complete];

fn solutions() -> impl Strategy<Value = Vec<Solution>> {
    (1usize..70, 1usize..40).prop_flat_map(|(bits, k)| {
        proptest::collection::vec(proptest::collection::vec(0u8..=1, bits).prop_map(Solution::from_bits), k)
    })
}

fn matrix(xs: &[Solution]) -> DistanceMatrix {
    DistanceMatrix::from_solutions(&xs.iter().collect::<Vec<_>>()).unwrap()
}

/// Each merge as (leaf set, height), with leaves relabelled through `label`.
fn clusters(d: &Dendrogram, label: &[usize]) -> Vec<(BTreeSet<usize>, u64)> {
    let k = d.num_leaves();
    let mut members: Vec<BTreeSet<usize>> = (0..k).map(|i| BTreeSet::from([label[i]])).collect();
    let mut out = Vec::new();
    for m in &d.merges {
        let joined: BTreeSet<usize> = members[m.cluster_a].union(&members[m.cluster_b]).copied().collect();
        members.push(joined.clone());
        out.push((joined, m.height.to_bits()));
    }
    out.sort();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn histogram_mass_is_pair_count(xs in solutions()) {
        let k = xs.len() as u64;
        let m = matrix(&xs);
        prop_assert_eq!(pair_histogram(&m).total(), k * (k - 1) / 2);
        for a in 0..xs.len() {
            prop_assert_eq!(m.get(a, a), 0);
            for b in 0..xs.len() {
                prop_assert_eq!(m.get(a, b), hamming(&xs[a], &xs[b]).unwrap());
                prop_assert_eq!(m.get(a, b), m.get(b, a));
            }
        }
    }

    #[test]
    fn merge_heights_never_decrease(xs in solutions()) {
        let m = matrix(&xs);
        for linkage in LINKAGES {
            let d = hierarchical_cluster(&m, linkage);
            prop_assert_eq!(d.merges.len(), xs.len() - 1);
            prop_assert!(d.heights().windows(2).all(|w| w[0] <= w[1]), "{:?}", d.heights());
            let mut leaves = d.leaf_order.clone();
            leaves.sort_unstable();
            prop_assert_eq!(leaves, (0..xs.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn single_linkage_is_permutation_equivariant(xs in solutions(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..xs.len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let permuted: Vec<Solution> = perm.iter().map(|&p| xs[p].clone()).collect();
        let (a, b) = (matrix(&xs), matrix(&permuted));
        prop_assert_eq!(pair_histogram(&a), pair_histogram(&b));
        // single linkage heights are the minimum spanning tree weights
        let mut ha = hierarchical_cluster(&a, Linkage::Single).heights();
        let mut hb = hierarchical_cluster(&b, Linkage::Single).heights();
        ha.sort_by(f64::total_cmp);
        hb.sort_by(f64::total_cmp);
        prop_assert_eq!(ha, hb);
    }

    #[test]
    fn tie_free_trees_are_permutation_equivariant(k in 2usize..25, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // wide random distances make equal linkage values vanishingly unlikely
        let mut data = vec![0u32; k * k];
        for a in 0..k {
            for b in a + 1..k {
                let d = rng.random_range(1u32 << 20..1u32 << 30);
                data[a * k + b] = d;
                data[b * k + a] = d;
            }
        }
        let original = DistanceMatrix::from_raw(k, 4096, data);
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut rng);
        let permuted = original.reordered(&perm);
        for linkage in [Linkage::Single, Linkage::Complete] {
            let identity: Vec<usize> = (0..k).collect();
            prop_assert_eq!(
                clusters(&hierarchical_cluster(&original, linkage), &identity),
                clusters(&hierarchical_cluster(&permuted, linkage), &perm)
            );
        }
        let ha = hierarchical_cluster(&original, Linkage::Average);
        let hb = hierarchical_cluster(&permuted, Linkage::Average);
        let (ca, cb) = (clusters(&ha, &(0..k).collect::<Vec<_>>()), clusters(&hb, &perm));
        let sets = |c: &[(BTreeSet<usize>, u64)]| c.iter().map(|(s, _)| s.clone()).collect::<Vec<_>>();
        prop_assert_eq!(sets(&ca), sets(&cb));
        for ((_, x), (_, y)) in ca.iter().zip(&cb) {
            let (x, y) = (f64::from_bits(*x), f64::from_bits(*y));
            prop_assert!((x - y).abs() <= 1e-9 * x.abs());
        }
    }
}

fn set_of(energies: &[f64], bits: usize) -> SampleSet {
    let samples = energies
        .iter()
        .enumerate()
        .map(|(k, &e)| Sample {
            bits: Solution::from_bools((0..bits).map(|b| (k >> b) & 1 == 1)),
            energy: e,
            found_at: 0.0,
        })
        .collect();
    SampleSet::new(samples, 0.0, 1.0, Vec::new())
}

#[test]
fn elite_uses_relative_tolerance_of_the_best() {
    let set = set_of(&[-1000.0, -1000.0 + 0.0009, -1000.0 + 0.0011, -900.0], 4);
    assert_eq!(elite_filter(&set, 1e-6).unwrap().len(), 2);
    // |best| < 1 falls back to an absolute tolerance
    let small = set_of(&[-0.5, -0.5 + 9e-7, -0.5 + 2e-6], 4);
    assert_eq!(elite_filter(&small, 1e-6).unwrap().len(), 2);
    assert!(elite_filter(&set, 0.0).is_err());
    assert!(elite_filter(&SampleSet::new(Vec::new(), 0.0, 0.0, Vec::new()), 1e-6).is_err());
}

#[test]
fn relative_delta_energy_sign_and_scale() {
    assert!((relative_delta_energy(-100.0, -101.0).unwrap() - 0.01).abs() < 1e-15);
    assert!((relative_delta_energy(-100.0, -99.0).unwrap() + 0.01).abs() < 1e-15);
    assert_eq!(relative_delta_energy(-100.0, -100.0).unwrap(), 0.0);
    assert!(relative_delta_energy(0.0, -1.0).is_err());
}

#[test]
fn two_blobs_split_at_the_top_of_the_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb10b);
    let n = 800;
    let a: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let b: Vec<bool> = a.iter().enumerate().map(|(i, &v)| if i < 400 { !v } else { v }).collect();
    let mut members = Vec::new();
    for center in [&a, &b] {
        for k in 0..10 {
            // one flip per member keeps pairs within a blob at distance <= 2
            let mut x = center.clone();
            x[400 + k] = !x[400 + k];
            members.push(Solution::from_bools(x));
        }
    }
    let m = matrix(&members);
    for i in 0..20 {
        for j in 0..20 {
            let same = (i < 10) == (j < 10);
            if same {
                assert!(m.get(i, j) <= 2);
            } else {
                assert!(m.get(i, j) >= 350);
            }
        }
    }
    let d = hierarchical_cluster(&m, Linkage::Single);
    let top = d.merges.last().unwrap();
    assert!(top.height >= 350.0, "final height {}", top.height);
    assert!(d.merges[..d.merges.len() - 1].iter().all(|g| g.height <= 2.0));
    for linkage in LINKAGES {
        assert!(hierarchical_cluster(&m, linkage).merges.last().unwrap().height >= 350.0);
    }
}

#[test]
fn diversity_report_restricts_to_elite() {
    let set = set_of(&[-10.0, -10.0, -10.0, -9.0], 3);
    let report = diversity_report(&set, 1e-6, Linkage::Average).unwrap();
    assert_eq!(report.elite_count, 3);
    assert_eq!(report.histogram.total(), 3);
    assert_eq!(report.dendrogram.merges.len(), 2);
}
