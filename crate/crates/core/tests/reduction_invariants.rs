mod common;

use common::{small_network, Oracle};
use nornet::experiment::{generate_network, GeneratorConfig};
use nornet::format::{parse_network, serialize_network};
use nornet::reduction::{level_reduce, param_count};
use nornet::{validate, NodeKind};
use proptest::prelude::*;

fn one_to_one(seed: u64, chain: f64) -> GeneratorConfig {
    GeneratorConfig {
        fan_in: 1..=1,
        fan_out: 1..=1,
        ips_chain_prob: chain,
        ips_leak: Some(0.0..=0.0),
        leak: 0.0..=0.1,
        ..GeneratorConfig::sized(2, 3, 5, seed)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn reduced_networks_are_valid_two_level(seed in 0u64..10_000, chain in 0.0f64..0.8) {
        let net = small_network(seed, chain);
        let r = level_reduce(&net).unwrap();
        prop_assert!(validate(&r.reduced).is_empty());
        prop_assert_eq!(r.reduced.ips_nodes().count(), 0);
        prop_assert_eq!(r.reduced.diseases().count(), net.diseases().count());
        prop_assert_eq!(r.reduced.findings().count(), net.findings().count());
        prop_assert_eq!(r.param_count_original, param_count(&net));
        prop_assert_eq!(r.param_count_reduced, param_count(&r.reduced));
        prop_assert_eq!(r.eliminated_ips_order.len(), net.ips_nodes().count());
        for d in net.diseases() {
            prop_assert_eq!(r.reduced.node(d.id.as_str()), Some(d));
        }
    }

    #[test]
    fn provenance_recomposes_every_reduced_eta(seed in 0u64..10_000, chain in 0.0f64..0.8) {
        let net = small_network(seed, chain);
        let r = level_reduce(&net).unwrap();
        let is_ips = |id: &nornet::NodeId| net.node(id.as_str()).unwrap().kind == NodeKind::Ips;
        let chained = net.edges().iter().any(|e| is_ips(&e.src) && is_ips(&e.dst));
        prop_assert_eq!(r.provenance.len(), r.reduced.edges().len());
        for p in &r.provenance {
            let mut absent = 1.0;
            for (path, &c) in p.source_paths.iter().zip(&p.composed_etas) {
                prop_assert_eq!(path.first(), Some(&p.src));
                prop_assert_eq!(path.last(), Some(&p.dst));
                let product: f64 = path.windows(2).map(|w| net.eta(w[0].as_str(), w[1].as_str()).unwrap()).product();
                prop_assert!((product - c).abs() < 1e-15);
                for mid in &path[1..path.len() - 1] {
                    prop_assert_eq!(net.node(mid.as_str()).unwrap().kind, NodeKind::Ips);
                }
                absent *= 1.0 - c;
            }
            // Merging before composing along IPS chains never exceeds the
            // path-wise merge, and matches it when no IPS feeds another.
            let eta = r.reduced.eta(p.src.as_str(), p.dst.as_str()).unwrap();
            prop_assert!(eta <= 1.0 - absent + 1e-12);
            if !chained {
                prop_assert!((eta - (1.0 - absent)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_to_one_zero_leak_reduction_is_exact(seed in 0u64..10_000, chain in 0.0f64..0.8, values in any::<u32>()) {
        let net = generate_network(&one_to_one(seed, chain)).unwrap();
        let reduced = level_reduce(&net).unwrap().reduced;
        let (full, two) = (Oracle::new(&net), Oracle::new(&reduced));
        let ids: Vec<String> = net.findings().map(|f| f.id.to_string()).collect();
        let evidence: Vec<(&str, bool)> = ids.iter().enumerate().map(|(k, s)| (s.as_str(), values >> k & 1 == 1)).collect();
        if full.mass(&evidence) > 0.0 {
            let a = full.posteriors(&evidence);
            let b = two.posteriors(&evidence);
            for (id, p) in &a {
                prop_assert!((p - b[id]).abs() < 1e-10, "{id}: {p} vs {}", b[id]);
            }
        }
    }

    #[test]
    fn reduction_is_idempotent(seed in 0u64..10_000) {
        let once = level_reduce(&small_network(seed, 0.4)).unwrap().reduced;
        let twice = level_reduce(&once).unwrap();
        prop_assert_eq!(&twice.reduced, &once);
        prop_assert_eq!(serialize_network(&twice.reduced), serialize_network(&once));
        prop_assert_eq!(parse_network(&serialize_network(&once)).unwrap(), once);
    }
}

#[test]
fn ips_leak_breaks_exactness() {
    let cfg = GeneratorConfig {
        ips_leak: Some(0.2..=0.2),
        ..one_to_one(5, 0.0)
    };
    let net = generate_network(&cfg).unwrap();
    let reduced = level_reduce(&net).unwrap().reduced;
    let (full, two) = (Oracle::new(&net), Oracle::new(&reduced));
    let max_diff = net
        .findings()
        .map(|f| (full.marginal(f.id.as_str()) - two.marginal(f.id.as_str())).abs())
        .fold(0.0, f64::max);
    assert!(max_diff > 1e-6, "leaky IPS reduction unexpectedly exact");
}
