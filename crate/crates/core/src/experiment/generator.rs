//! Seeded synthetic three-level networks.

use std::ops::RangeInclusive;

use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::network::{Edge, ModelError, Network, Node, NodeId};
use crate::sampling::seeded_rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("generated network failed validation: {0}")]
    Invalid(#[from] ModelError),
}

/// Size and connectivity knobs for [`generate_network`].
///
/// `fan_in` counts arcs into an IPS node (from diseases or earlier IPS nodes);
/// `fan_out` counts arcs out of it (to findings or later IPS nodes).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorConfig {
    pub name: String,
    pub n_diseases: usize,
    pub n_ips: usize,
    pub n_findings: usize,
    pub fan_in: RangeInclusive<usize>,
    pub fan_out: RangeInclusive<usize>,
    /// Chance that one fan-in slot of an IPS node is filled by an earlier IPS.
    pub ips_chain_prob: f64,
    pub eta: RangeInclusive<f64>,
    /// Finding leaks.
    pub leak: RangeInclusive<f64>,
    /// IPS leaks; `None` reuses `leak`.
    pub ips_leak: Option<RangeInclusive<f64>>,
    pub prior: RangeInclusive<f64>,
    /// Relative weights of phases 1..=5.
    pub phase_weights: [f64; 5],
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            name: "generated".into(),
            n_diseases: 2,
            n_ips: 2,
            n_findings: 38,
            fan_in: 1..=2,
            fan_out: 1..=3,
            ips_chain_prob: 0.0,
            eta: 0.1..=0.9,
            leak: 0.001..=0.05,
            ips_leak: None,
            prior: 0.05..=0.3,
            phase_weights: [1.0; 5],
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn sized(n_diseases: usize, n_ips: usize, n_findings: usize, seed: u64) -> Self {
        GeneratorConfig {
            n_diseases,
            n_ips,
            n_findings,
            seed,
            ..Self::default()
        }
    }

    fn ips_leak_range(&self) -> &RangeInclusive<f64> {
        self.ips_leak.as_ref().unwrap_or(&self.leak)
    }

    pub fn check(&self) -> Result<(), GeneratorError> {
        let bad = |msg: String| Err(GeneratorError::Config(msg));
        if self.n_diseases == 0 || self.n_findings == 0 {
            return bad("need at least one disease and one finding".into());
        }
        if !self.name.chars().all(|c| !c.is_control() && c != '#') || self.name.trim() != self.name
        {
            return bad(format!(
                "network name {:?} cannot be written to a network file",
                self.name
            ));
        }
        for (what, r) in [("fan-in", &self.fan_in), ("fan-out", &self.fan_out)] {
            if r.is_empty() || *r.start() == 0 {
                return bad(format!(
                    "{what} range {}..{} must be nonempty and start at 1 or more",
                    r.start(),
                    r.end()
                ));
            }
        }
        if self.n_ips > 0 && *self.fan_in.start() > self.n_diseases {
            return bad(format!(
                "fan-in minimum {} exceeds the {} available diseases",
                self.fan_in.start(),
                self.n_diseases
            ));
        }
        if self.n_ips > 0 && *self.fan_out.start() > self.n_findings {
            return bad(format!(
                "fan-out minimum {} exceeds the {} available findings",
                self.fan_out.start(),
                self.n_findings
            ));
        }
        if !(0.0..=1.0).contains(&self.ips_chain_prob) {
            return bad(format!(
                "IPS chain probability {} outside [0, 1]",
                self.ips_chain_prob
            ));
        }
        let ranges = [
            ("eta", &self.eta, f64::MIN_POSITIVE),
            ("leak", &self.leak, 0.0),
            ("IPS leak", self.ips_leak_range(), 0.0),
            ("prior", &self.prior, 0.0),
        ];
        for (what, r, floor) in ranges {
            if !(r.start() <= r.end() && *r.start() >= floor && *r.end() <= 1.0) {
                return bad(format!(
                    "{what} range {}..{} is not a subinterval of [0, 1]",
                    r.start(),
                    r.end()
                ));
            }
        }
        if self
            .phase_weights
            .iter()
            .any(|w| !(w.is_finite() && *w >= 0.0))
            || self.phase_weights.iter().sum::<f64>() <= 0.0
        {
            return bad("phase weights must be nonnegative with a positive sum".into());
        }
        Ok(())
    }
}

fn padded_ids(prefix: char, count: usize) -> Vec<NodeId> {
    let width = count.to_string().len();
    (1..=count)
        .map(|i| NodeId::new(format!("{prefix}{i:0width$}")))
        .collect()
}

fn draw(rng: &mut ChaCha8Rng, r: &RangeInclusive<f64>) -> f64 {
    if r.start() == r.end() {
        *r.start()
    } else {
        rng.random_range(r.clone())
    }
}

fn draw_phase(rng: &mut ChaCha8Rng, weights: &[f64; 5]) -> u8 {
    let total: f64 = weights.iter().sum();
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k as u8 + 1;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(4) as u8 + 1
}

/// Generates a leveled network from a seed.
///
/// IPS nodes draw their fan-in from diseases and, with `ips_chain_prob` per
/// slot, from earlier IPS nodes; a draw above the number of available
/// predecessors is capped. Fan-out is then topped up with distinct findings.
/// Findings left without a parent are attached to a random disease.
pub fn generate_network(cfg: &GeneratorConfig) -> Result<Network, GeneratorError> {
    cfg.check()?;
    let mut rng = seeded_rng(cfg.seed);
    let diseases = padded_ids('D', cfg.n_diseases);
    let ips = padded_ids('I', cfg.n_ips);
    let findings = padded_ids('F', cfg.n_findings);

    let mut nodes = Vec::with_capacity(diseases.len() + ips.len() + findings.len());
    let mut edges = Vec::new();
    for d in &diseases {
        nodes.push(Node::disease(d.clone(), draw(&mut rng, &cfg.prior)));
    }

    let max_out = *cfg.fan_out.end();
    let mut chain_children = vec![0usize; ips.len()];
    for (k, b) in ips.iter().enumerate() {
        nodes.push(Node::ips(b.clone(), draw(&mut rng, cfg.ips_leak_range())));
        let want = rng.random_range(cfg.fan_in.clone());
        let mut free_diseases: Vec<usize> = (0..diseases.len()).collect();
        let mut free_ips: Vec<usize> = (0..k).filter(|&j| chain_children[j] < max_out).collect();
        for _ in 0..want {
            let use_ips = !free_ips.is_empty()
                && (free_diseases.is_empty() || rng.random::<f64>() < cfg.ips_chain_prob);
            let (src, eta) = if use_ips {
                let j = free_ips.swap_remove(rng.random_range(0..free_ips.len()));
                chain_children[j] += 1;
                (ips[j].clone(), draw(&mut rng, &cfg.eta))
            } else if !free_diseases.is_empty() {
                let j = free_diseases.swap_remove(rng.random_range(0..free_diseases.len()));
                (diseases[j].clone(), draw(&mut rng, &cfg.eta))
            } else {
                break;
            };
            edges.push(Edge::new(src, b.clone(), eta));
        }
    }

    let mut has_parent = vec![false; findings.len()];
    for (k, b) in ips.iter().enumerate() {
        let want = rng.random_range(cfg.fan_out.clone());
        let floor = usize::from(chain_children[k] == 0);
        let n = want
            .saturating_sub(chain_children[k])
            .max(floor)
            .min(findings.len());
        for j in index::sample(&mut rng, findings.len(), n) {
            has_parent[j] = true;
            edges.push(Edge::new(
                b.clone(),
                findings[j].clone(),
                draw(&mut rng, &cfg.eta),
            ));
        }
    }

    for (j, f) in findings.iter().enumerate() {
        nodes.push(Node::finding(
            f.clone(),
            draw(&mut rng, &cfg.leak),
            draw_phase(&mut rng, &cfg.phase_weights),
        ));
        if !has_parent[j] {
            let d = rng.random_range(0..diseases.len());
            edges.push(Edge::new(
                diseases[d].clone(),
                f.clone(),
                draw(&mut rng, &cfg.eta),
            ));
        }
    }

    Ok(Network::new(cfg.name.clone(), nodes, edges)?)
}
