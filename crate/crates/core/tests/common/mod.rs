//! Brute-force reference over every world of a small network.
//!
//! Built only from the public node and edge lists; shares no code with the
//! crate's inference, sampling or noisy-OR paths.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use nornet::experiment::{generate_network, GeneratorConfig};
use nornet::{Network, NodeKind};

pub struct Oracle {
    ids: Vec<String>,
    kinds: Vec<NodeKind>,
    /// Prior for diseases, leak otherwise.
    base: Vec<f64>,
    parents: Vec<Vec<(usize, f64)>>,
}

impl Oracle {
    pub fn new(net: &Network) -> Self {
        assert!(net.len() <= 20, "oracle enumerates 2^n worlds");
        let ids: Vec<String> = net.nodes().iter().map(|n| n.id.to_string()).collect();
        let pos: HashMap<&str, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let mut parents = vec![Vec::new(); ids.len()];
        for e in net.edges() {
            parents[pos[e.dst.as_str()]].push((pos[e.src.as_str()], e.eta));
        }
        Oracle {
            kinds: net.nodes().iter().map(|n| n.kind).collect(),
            base: net
                .nodes()
                .iter()
                .map(|n| {
                    if n.kind == NodeKind::Disease {
                        n.prior.unwrap()
                    } else {
                        n.leak
                    }
                })
                .collect(),
            ids,
            parents,
        }
    }

    fn index(&self, id: &str) -> usize {
        self.ids.iter().position(|s| s == id).unwrap()
    }

    /// Joint probability of the world whose bit `i` is node `i`.
    pub fn world(&self, bits: u32) -> f64 {
        let on = |i: usize| bits >> i & 1 == 1;
        let mut w = 1.0;
        for i in 0..self.ids.len() {
            let p = if self.kinds[i] == NodeKind::Disease {
                self.base[i]
            } else {
                let mut off = 1.0 - self.base[i];
                for &(j, eta) in &self.parents[i] {
                    if on(j) {
                        off *= 1.0 - eta;
                    }
                }
                1.0 - off
            };
            w *= if on(i) { p } else { 1.0 - p };
        }
        w
    }

    /// Sum of world weights consistent with `fixed`.
    pub fn mass(&self, fixed: &[(&str, bool)]) -> f64 {
        let fixed: Vec<(usize, bool)> = fixed.iter().map(|&(id, v)| (self.index(id), v)).collect();
        (0..1u32 << self.ids.len())
            .filter(|b| fixed.iter().all(|&(i, v)| (b >> i & 1 == 1) == v))
            .map(|b| self.world(b))
            .sum()
    }

    pub fn marginal(&self, id: &str) -> f64 {
        self.mass(&[(id, true)])
    }

    pub fn posteriors(&self, evidence: &[(&str, bool)]) -> BTreeMap<String, f64> {
        let z = self.mass(evidence);
        (0..self.ids.len())
            .filter(|&i| self.kinds[i] == NodeKind::Disease)
            .map(|i| {
                let mut e = evidence.to_vec();
                e.push((self.ids[i].as_str(), true));
                (self.ids[i].clone(), self.mass(&e) / z)
            })
            .collect()
    }
}

/// A small random network with every kind of node and nonzero leaks.
pub fn small_network(seed: u64, chain: f64) -> Network {
    let d = 1 + (seed % 3) as usize;
    let cfg = GeneratorConfig {
        fan_in: 1..=d.min(2),
        fan_out: 1..=3,
        ips_chain_prob: chain,
        leak: 0.0..=0.2,
        prior: 0.05..=0.6,
        ..GeneratorConfig::sized(d, 1 + (seed % 4) as usize, 3 + (seed % 4) as usize, seed)
    };
    generate_network(&cfg).unwrap()
}
