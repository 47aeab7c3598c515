mod common;

use common::{small_network, Oracle};
use nornet::sampling::{sample_world, sample_world_with, seeded_rng};

const N: usize = 40_000;

#[test]
fn empirical_marginals_track_exact_ones() {
    for seed in [3u64, 17, 40] {
        let net = small_network(seed, 0.3);
        let oracle = Oracle::new(&net);
        let mut rng = seeded_rng(seed);
        let mut counts = vec![0usize; net.len()];
        for _ in 0..N {
            let w = sample_world_with(&net, &mut rng);
            for (k, n) in net.nodes().iter().enumerate() {
                if w.get(n.id.as_str()) == Some(true) {
                    counts[k] += 1;
                }
            }
        }
        for (k, n) in net.nodes().iter().enumerate() {
            let p = oracle.marginal(n.id.as_str());
            let freq = counts[k] as f64 / N as f64;
            let bound = 4.0 * (p * (1.0 - p) / N as f64).sqrt() + 1e-12;
            assert!(
                (freq - p).abs() <= bound,
                "seed {seed} node {}: {freq} vs {p}",
                n.id
            );
        }
    }
}

#[test]
fn seeded_worlds_are_reproducible_and_total() {
    let net = small_network(9, 0.5);
    for seed in 0..20 {
        let a = sample_world(&net, seed);
        assert_eq!(a, sample_world(&net, seed));
        assert_eq!(a.len(), net.len());
    }
}
