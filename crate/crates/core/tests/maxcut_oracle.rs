//! Max-Cut reduction checked exhaustively on small random graphs.

mod common;

use common::bits_of;
use qready_core::io::{parse_instance_str, InstanceFormat};
use qready_core::{from_maxcut, sample, MaxCutGraph, SamplerParams, Sense, Setting, Solution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_graph(rng: &mut impl Rng, v: usize) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for a in 0..v {
        for b in a + 1..v {
            if rng.random_bool(0.5) {
                edges.push((a, b, f64::from(rng.random_range(-5i32..=9))));
            }
        }
    }
    edges
}

fn cut(edges: &[(usize, usize, f64)], x: &[u8]) -> f64 {
    edges.iter().filter(|&&(a, b, _)| x[a] != x[b]).map(|e| e.2).sum()
}

#[test]
fn qubo_energy_is_negated_cut_for_every_assignment() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x3a1c);
    for _ in 0..100 {
        let v = rng.random_range(1..=12);
        let edges = random_graph(&mut rng, v);
        let graph = MaxCutGraph::new(v, edges.clone()).unwrap();
        let q = from_maxcut(&graph);
        assert_eq!(q.sense(), Sense::Maximize);
        let mut best_cut = f64::NEG_INFINITY;
        let mut best_energy = f64::INFINITY;
        for mask in 0..1u64 << v {
            let x = bits_of(mask, v);
            let c = cut(&edges, &x);
            let e = q.energy(&Solution::from_bits(x.clone())).unwrap();
            // integer weights: exact equality
            assert_eq!(-e, c);
            assert_eq!(graph.cut_value(&Solution::from_bits(x)).unwrap(), c);
            best_cut = best_cut.max(c);
            best_energy = best_energy.min(e);
        }
        assert_eq!(best_cut, -best_energy);
    }
}

#[test]
fn tabu_finds_the_maximum_cut() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x77);
    for round in 0..20 {
        let v = rng.random_range(2..=12);
        let edges = random_graph(&mut rng, v);
        let q = from_maxcut(&MaxCutGraph::new(v, edges.clone()).unwrap());
        let best = (0..1u64 << v).map(|m| cut(&edges, &bits_of(m, v))).fold(f64::NEG_INFINITY, f64::max);
        let params = SamplerParams {
            time_limit: 2.0,
            seed: round,
            num_starts: Setting::Fixed(1),
            max_moves: Some(5_000),
            ..Default::default()
        };
        let set = sample(&q, &params).unwrap();
        assert_eq!(q.sense().to_native(set.best_energy().unwrap()), best, "round {round}");
    }
}

#[test]
fn maxcut_file_parses_to_the_same_qubo() {
    let text = "3 3\n1 2 1\n2 3 2\n1 3 -1\n";
    let q = parse_instance_str(text, InstanceFormat::Maxcut).unwrap();
    let direct = from_maxcut(&MaxCutGraph::new(3, vec![(0, 1, 1.0), (1, 2, 2.0), (0, 2, -1.0)]).unwrap());
    assert_eq!(q.entries(), direct.entries());
    // {1} against {0, 2} cuts both positive edges
    assert_eq!(q.energy(&Solution::from_bits([0, 1, 0])).unwrap(), -3.0);
}
