//! Closed-form predictors of the error introduced by level reduction.
//!
//! The ratios here compare a three-level star subnetwork (diseases → one IPS
//! → findings) with its reduced two-level form. They are evaluated exactly as
//! the closed forms are written; the inference module is the ground truth and
//! agrees with them in the zero-leak regime.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::network::{Edge, Network, Node, NodeId, NodeKind};
use crate::reduction::{self, ReductionError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("ratio is undefined: zero denominator")]
    ZeroDenominator,
    #[error("star shape mismatch: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fan {
    pub fan_in: usize,
    pub fan_out: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FanStats {
    pub per_ips: BTreeMap<NodeId, Fan>,
    pub max_fan_in: usize,
    pub max_fan_out: usize,
    /// Zero when there are no IPS nodes.
    pub mean_fan_in: f64,
    pub mean_fan_out: f64,
}

/// Fan-in (arcs terminating) and fan-out (arcs leaving) of every IPS node.
pub fn fan_stats(net: &Network) -> FanStats {
    let per_ips: BTreeMap<NodeId, Fan> = (0..net.len())
        .filter(|&i| net.node_at(i).kind == NodeKind::Ips)
        .map(|i| {
            let fan = Fan {
                fan_in: net.parents_of(i).len(),
                fan_out: net.children_of(i).len(),
            };
            (net.node_at(i).id.clone(), fan)
        })
        .collect();
    let count = per_ips.len();
    let mean = |f: fn(&Fan) -> usize| {
        if count == 0 {
            0.0
        } else {
            per_ips.values().map(f).sum::<usize>() as f64 / count as f64
        }
    };
    FanStats {
        max_fan_in: per_ips.values().map(|f| f.fan_in).max().unwrap_or(0),
        max_fan_out: per_ips.values().map(|f| f.fan_out).max().unwrap_or(0),
        mean_fan_in: mean(|f| f.fan_in),
        mean_fan_out: mean(|f| f.fan_out),
        per_ips,
    }
}

/// Expected direction of the two-level network's error around one IPS node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bias {
    /// Fan-in and fan-out of 1; exact only when the IPS leak is zero.
    Exact,
    Overestimate,
    Underestimate,
    Mixed,
}

impl Bias {
    pub fn from_fan(fan_in: usize, fan_out: usize) -> Bias {
        match (fan_in, fan_out) {
            (1, 1) => Bias::Exact,
            (m, 1) if m > 1 => Bias::Overestimate,
            (1, n) if n > 1 => Bias::Underestimate,
            _ => Bias::Mixed,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Bias::Exact => "exact",
            Bias::Overestimate => "overestimate",
            Bias::Underestimate => "underestimate",
            Bias::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Bias {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn predict_bias(stats: &FanStats) -> BTreeMap<NodeId, Bias> {
    stats
        .per_ips
        .iter()
        .map(|(id, fan)| (id.clone(), Bias::from_fan(fan.fan_in, fan.fan_out)))
        .collect()
}

/// Parameters of a star subnetwork: `m` diseases feed one IPS node that feeds
/// `n` findings.
#[derive(Debug, Clone, PartialEq)]
pub struct StarConfig {
    /// Disease → IPS etas, one per disease.
    pub p: Vec<f64>,
    /// IPS → finding etas, one per finding.
    pub q: Vec<f64>,
    pub rho_i: f64,
    /// Finding leaks, parallel to `q`.
    pub rho_f: Vec<f64>,
    /// Disease priors, parallel to `p`.
    pub priors: Vec<f64>,
}

impl StarConfig {
    pub fn fan_in(&self) -> usize {
        self.p.len()
    }

    pub fn fan_out(&self) -> usize {
        self.q.len()
    }

    pub fn check(&self) -> Result<(), AnalysisError> {
        if self.p.is_empty() || self.q.is_empty() {
            return Err(AnalysisError::Shape(
                "need at least one disease and one finding".into(),
            ));
        }
        if self.rho_f.len() != self.q.len() || self.priors.len() != self.p.len() {
            return Err(AnalysisError::Shape(
                "leak/prior lists must match eta lists".into(),
            ));
        }
        for &v in &self.p {
            unit("p", v)?;
        }
        for &v in &self.q {
            unit("q", v)?;
        }
        for &v in &self.rho_f {
            unit("rho_f", v)?;
        }
        for &v in &self.priors {
            unit("prior", v)?;
        }
        unit("rho_i", self.rho_i).map(|_| ())
    }

    /// The star as a concrete three-level network. Diseases are `D1..Dm`, the
    /// IPS node is `I`, findings are `F1..Fn`.
    pub fn to_network(&self) -> Result<Network, AnalysisError> {
        self.check()?;
        let mut nodes = vec![Node::ips("I", self.rho_i)];
        let mut edges = Vec::new();
        for (i, (&p, &prior)) in self.p.iter().zip(&self.priors).enumerate() {
            let id = format!("D{}", i + 1);
            nodes.push(Node::disease(id.as_str(), prior));
            edges.push(Edge::new(id, "I", p));
        }
        for (k, (&q, &rho)) in self.q.iter().zip(&self.rho_f).enumerate() {
            let id = format!("F{}", k + 1);
            nodes.push(Node::finding(id.as_str(), rho, 1));
            edges.push(Edge::new("I", id, q));
        }
        Network::new("star", nodes, edges).map_err(|e| AnalysisError::Shape(e.to_string()))
    }

    /// Reads a star back out of a network with exactly one IPS node whose
    /// predecessors are all diseases, whose successors are all findings, and
    /// which every edge touches.
    pub fn from_network(net: &Network) -> Option<StarConfig> {
        let mut ips = net.ips_nodes();
        let center = ips.next()?;
        if ips.next().is_some() {
            return None;
        }
        let c = net.index_of(center.id.as_str())?;
        let touches = |e: &Edge| e.src == center.id || e.dst == center.id;
        if !net.edges().iter().all(touches) {
            return None;
        }
        let preds = net.parents_of(c);
        let succs = net.children_of(c);
        if preds
            .iter()
            .any(|&(i, _)| net.node_at(i).kind != NodeKind::Disease)
            || succs
                .iter()
                .any(|&(i, _)| net.node_at(i).kind != NodeKind::Finding)
        {
            return None;
        }
        Some(StarConfig {
            p: preds.iter().map(|&(_, eta)| eta).collect(),
            q: succs.iter().map(|&(_, eta)| eta).collect(),
            rho_i: center.leak,
            rho_f: succs.iter().map(|&(i, _)| net.node_at(i).leak).collect(),
            priors: preds
                .iter()
                .map(|&(i, _)| net.node_at(i).prior.unwrap_or(0.0))
                .collect(),
        })
    }

    fn single_finding(&self) -> Result<(f64, f64), AnalysisError> {
        self.check()?;
        if self.q.len() != 1 {
            return Err(AnalysisError::Shape(format!(
                "expected fan-out 1, got {}",
                self.q.len()
            )));
        }
        Ok((self.q[0], self.rho_f[0]))
    }

    /// `{q(1 - rho_I)[1 - prod(1 - p_i)] + rho_F prod(1 - p_i)}`, the
    /// three-level factor of the fan-in posterior.
    fn three_level_factor(&self) -> Result<f64, AnalysisError> {
        let (q, rho_f) = self.single_finding()?;
        let none = self.p.iter().map(|p| 1.0 - p).product::<f64>();
        Ok(q * (1.0 - self.rho_i) * (1.0 - none) + rho_f * none)
    }

    /// `[1 - prod(1 - p_i q)](1 - rho_F)`, the two-level factor.
    fn two_level_factor(&self) -> Result<f64, AnalysisError> {
        let (q, rho_f) = self.single_finding()?;
        let none = self.p.iter().map(|p| 1.0 - p * q).product::<f64>();
        Ok((1.0 - none) * (1.0 - rho_f))
    }
}

fn unit(what: &'static str, value: f64) -> Result<f64, AnalysisError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(AnalysisError::OutOfRange { what, value })
    }
}

fn ratio(num: f64, den: f64) -> Result<f64, AnalysisError> {
    if den == 0.0 {
        Err(AnalysisError::ZeroDenominator)
    } else {
        Ok(num / den)
    }
}

/// Three-level over two-level probability for a fan-in `m`, fan-out 1 star.
/// The `P(d)/P(f)` factors cancel.
pub fn ratio_r1_exact(cfg: &StarConfig) -> Result<f64, AnalysisError> {
    ratio(cfg.three_level_factor()?, cfg.two_level_factor()?)
}

/// The two-disease form:
/// `(1 - rho_I)(p1 + p2 - p1 p2) / [(1 - rho_F)(p1 + p2 - q p1 p2)]`.
pub fn ratio_r1_two_disease(
    p1: f64,
    p2: f64,
    q: f64,
    rho_i: f64,
    rho_f: f64,
) -> Result<f64, AnalysisError> {
    let (p1, p2) = (unit("p1", p1)?, unit("p2", p2)?);
    let (q, rho_i, rho_f) = (unit("q", q)?, unit("rho_i", rho_i)?, unit("rho_f", rho_f)?);
    ratio(
        (1.0 - rho_i) * (p1 + p2 - p1 * p2),
        (1.0 - rho_f) * (p1 + p2 - q * p1 * p2),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R2 {
    /// `[p prod(q_i) + (1 - p) prod(rho_i)] / prod(p q_i)`.
    pub exact: f64,
    /// `1 / p^(n-1)`, valid when leaks are small next to the etas.
    pub approx: f64,
}

/// Three-level over two-level ratio for a fan-in 1, fan-out `n` star with all
/// findings present.
pub fn ratio_r2(p: f64, q: &[f64], rho_f: &[f64]) -> Result<R2, AnalysisError> {
    if q.is_empty() {
        return Err(AnalysisError::Shape("need at least one finding".into()));
    }
    if q.len() != rho_f.len() {
        return Err(AnalysisError::Shape("q and rho_f lengths differ".into()));
    }
    let p = unit("p", p)?;
    let mut all_q = 1.0;
    let mut all_rho = 1.0;
    let mut reduced = 1.0;
    for (&qi, &rho) in q.iter().zip(rho_f) {
        let qi = unit("q", qi)?;
        all_q *= qi;
        all_rho *= unit("rho_f", rho)?;
        reduced *= p * qi;
    }
    let exact = ratio(p * all_q + (1.0 - p) * all_rho, reduced)?;
    let approx = ratio(1.0, p.powi(q.len() as i32 - 1))?;
    Ok(R2 { exact, approx })
}

/// Both closed-form posteriors `P(d | f)` for a fan-out 1 star, including the
/// `P(d)/P(f)` factor. Returns `(three_level, two_level)`.
pub fn closed_form_posteriors(
    cfg: &StarConfig,
    prior_d: f64,
    p_f: f64,
) -> Result<(f64, f64), AnalysisError> {
    for (what, v) in [("prior_d", prior_d), ("p_f", p_f)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(AnalysisError::OutOfRange { what, value: v });
        }
    }
    let scale = prior_d / p_f;
    Ok((
        cfg.three_level_factor()? * scale,
        cfg.two_level_factor()? * scale,
    ))
}

/// How many IPS nodes sit on the paths from one disease to its findings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IpsPathStats {
    pub paths: usize,
    pub max_ips: usize,
    pub mean_ips: f64,
}

/// Per-disease IPS path statistics, from the reduction's provenance.
pub fn ips_path_stats(net: &Network) -> Result<BTreeMap<NodeId, IpsPathStats>, ReductionError> {
    let report = reduction::level_reduce(net)?;
    let lengths = reduction::ips_path_lengths(&report);
    Ok(net
        .diseases()
        .map(|d| {
            let ls = lengths.get(&d.id).map(Vec::as_slice).unwrap_or(&[]);
            let stats = IpsPathStats {
                paths: ls.len(),
                max_ips: ls.iter().copied().max().unwrap_or(0),
                mean_ips: if ls.is_empty() {
                    0.0
                } else {
                    ls.iter().sum::<usize>() as f64 / ls.len() as f64
                },
            };
            (d.id.clone(), stats)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn fan_in(p: &[f64], q: f64, rho_i: f64, rho_f: f64) -> StarConfig {
        StarConfig {
            p: p.to_vec(),
            q: vec![q],
            rho_i,
            rho_f: vec![rho_f],
            priors: vec![0.1; p.len()],
        }
    }

    fn fork() -> Network {
        StarConfig {
            p: vec![0.2, 0.3, 0.4],
            q: vec![0.5, 0.6],
            rho_i: 0.0,
            rho_f: vec![0.0, 0.0],
            priors: vec![0.1; 3],
        }
        .to_network()
        .unwrap()
    }

    #[test]
    fn fork_fan() {
        let s = fan_stats(&fork());
        assert_eq!(
            s.per_ips["I"],
            Fan {
                fan_in: 3,
                fan_out: 2
            }
        );
        assert_eq!((s.max_fan_in, s.max_fan_out), (3, 2));
        assert_eq!(predict_bias(&s)["I"], Bias::Mixed);
    }

    #[test]
    fn two_level_network_has_no_fans() {
        let net = Network::new(
            "flat",
            vec![Node::disease("D", 0.1), Node::finding("F", 0.0, 1)],
            vec![Edge::new("D", "F", 0.5)],
        )
        .unwrap();
        let s = fan_stats(&net);
        assert!(s.per_ips.is_empty());
        assert_eq!(s.mean_fan_in, 0.0);
    }

    #[test]
    fn chain_fan() {
        let s = fan_stats(&fan_in(&[0.3], 0.4, 0.0, 0.0).to_network().unwrap());
        assert_eq!(
            s.per_ips["I"],
            Fan {
                fan_in: 1,
                fan_out: 1
            }
        );
    }

    #[test]
    fn bias_labels() {
        assert_eq!(Bias::from_fan(3, 1), Bias::Overestimate);
        assert_eq!(Bias::from_fan(1, 3), Bias::Underestimate);
        assert_eq!(Bias::from_fan(1, 1), Bias::Exact);
        assert_eq!(Bias::from_fan(2, 2), Bias::Mixed);
    }

    #[test]
    fn r1_values() {
        assert_abs_diff_eq!(
            ratio_r1_exact(&fan_in(&[0.37], 0.81, 0.0, 0.0)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            ratio_r1_exact(&fan_in(&[0.5, 0.5], 0.5, 0.0, 0.0)).unwrap(),
            0.857_142_857_142_857_1,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            ratio_r1_exact(&fan_in(&[0.5, 0.5], 0.5, 0.0, 0.1)).unwrap(),
            1.015_873_015_873_016,
            epsilon = 1e-12
        );
    }

    #[test]
    fn r1_rejects_wrong_shape_and_zero_denominator() {
        let mut cfg = fan_in(&[0.5], 0.5, 0.0, 0.0);
        cfg.q.push(0.5);
        cfg.rho_f.push(0.0);
        assert!(matches!(ratio_r1_exact(&cfg), Err(AnalysisError::Shape(_))));
        assert_eq!(
            ratio_r1_exact(&fan_in(&[0.0, 0.0], 0.5, 0.0, 0.0)),
            Err(AnalysisError::ZeroDenominator)
        );
    }

    #[test]
    fn r1_two_disease_values() {
        assert_abs_diff_eq!(
            ratio_r1_two_disease(0.5, 0.5, 0.5, 0.0, 0.0).unwrap(),
            0.75 / 0.875,
            epsilon = 1e-15
        );
        assert_eq!(ratio_r1_two_disease(0.3, 0.6, 1.0, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(ratio_r1_two_disease(0.3, 0.0, 0.4, 0.0, 0.0).unwrap(), 1.0);
        assert!(ratio_r1_two_disease(0.0, 0.0, 0.4, 0.0, 0.0).is_err());
    }

    #[test]
    fn r2_values() {
        assert_eq!(ratio_r2(0.3, &[0.7], &[0.0]).unwrap().exact, 1.0);
        let r = ratio_r2(0.5, &[1.0, 1.0, 1.0], &[0.0; 3]).unwrap();
        assert_abs_diff_eq!(r.exact, 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.approx, 4.0, epsilon = 1e-15);
        let r = ratio_r2(0.5, &[0.8, 0.9], &[0.01, 0.01]).unwrap();
        assert_abs_diff_eq!(r.exact, 2.000_277_777_777_777_4, epsilon = 1e-12);
        assert_eq!(r.approx, 2.0);
        assert_eq!(
            ratio_r2(0.0, &[0.8], &[0.0]),
            Err(AnalysisError::ZeroDenominator)
        );
    }

    #[test]
    fn closed_forms() {
        let cfg = fan_in(&[0.5, 0.5], 0.5, 0.0, 0.0);
        let (three, two) = closed_form_posteriors(&cfg, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(three, 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(two, 0.4375, epsilon = 1e-15);
        let single = fan_in(&[0.6], 0.3, 0.0, 0.0);
        let (three, two) = closed_form_posteriors(&single, 0.2, 0.5).unwrap();
        assert_abs_diff_eq!(three, two, epsilon = 1e-15);
        assert_abs_diff_eq!(three, 0.3 * 0.6 * 0.4, epsilon = 1e-15);
        assert!(closed_form_posteriors(&single, 0.0, 0.5).is_err());
    }

    #[test]
    fn star_round_trips_through_a_network() {
        let net = fork();
        let cfg = StarConfig::from_network(&net).unwrap();
        assert_eq!(cfg.p, vec![0.2, 0.3, 0.4]);
        assert_eq!(cfg.q, vec![0.5, 0.6]);
        let reduced = reduction::level_reduce(&net).unwrap().reduced;
        assert!(StarConfig::from_network(&reduced).is_none());
    }

    #[test]
    fn path_stats_count_ips_per_path() {
        let net = Network::new(
            "paths",
            vec![
                Node::disease("A", 0.5),
                Node::ips("B1", 0.0),
                Node::ips("B2", 0.0),
                Node::finding("F", 0.0, 1),
                Node::finding("G", 0.0, 1),
            ],
            vec![
                Edge::new("A", "B1", 0.5),
                Edge::new("B1", "B2", 0.5),
                Edge::new("B2", "F", 0.5),
                Edge::new("A", "G", 0.5),
            ],
        )
        .unwrap();
        let stats = ips_path_stats(&net).unwrap();
        assert_eq!(
            stats["A"],
            IpsPathStats {
                paths: 2,
                max_ips: 2,
                mean_ips: 1.0
            }
        );
    }

    proptest! {
        #[test]
        fn r1_at_most_one_without_leaks(
            p in prop::collection::vec(0.0f64..=1.0, 1..6),
            q in 0.01f64..=1.0,
        ) {
            prop_assume!(p.iter().any(|&x| x > 0.0));
            let r = ratio_r1_exact(&fan_in(&p, q, 0.0, 0.0)).unwrap();
            prop_assert!(r <= 1.0 + 1e-12);
            let active = p.iter().filter(|&&x| x > 0.0).count();
            if p.len() == 1 || q == 1.0 || active <= 1 {
                prop_assert!((r - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn r1_two_disease_symmetric(
            p1 in 0.01f64..=1.0, p2 in 0.01f64..=1.0, q in 0.0f64..=1.0,
            rho_i in 0.0f64..0.5, rho_f in 0.0f64..0.5,
        ) {
            let a = ratio_r1_two_disease(p1, p2, q, rho_i, rho_f).unwrap();
            let b = ratio_r1_two_disease(p2, p1, q, rho_i, rho_f).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn r2_at_least_one_without_leaks(
            p in 0.01f64..=1.0,
            q in prop::collection::vec(0.01f64..=1.0, 1..6),
        ) {
            let r = ratio_r2(p, &q, &vec![0.0; q.len()]).unwrap();
            prop_assert!(r.exact >= 1.0 - 1e-12);
            prop_assert!((r.exact - r.approx).abs() <= 1e-9 * r.exact);
        }
    }
}
