//! Exact inference.
//!
//! Every query reduces to the probability of a partial assignment. Only the
//! ancestral closure of the assigned nodes matters (everything else is barren
//! and sums to one), so queries are answered on that closure. Closures with at
//! most `enumeration_threshold` hidden nodes are enumerated; larger ones go
//! through variable elimination. Either path can be forced with [`Method`].

mod elimination;
mod enumeration;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::network::{Assignment, ModelError, Network, NodeId, NodeKind};
use enumeration::Enumerator;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InferenceError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("evidence has zero probability")]
    InconsistentEvidence,
    #[error("evidence on non-finding node {0}")]
    NotAFinding(NodeId),
    #[error("assignment is not total: no value for {0}")]
    PartialAssignment(NodeId),
    #[error("node {node} has {parents} parents, above the elimination cap of {cap}")]
    TooManyParents {
        node: NodeId,
        parents: usize,
        cap: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Enumerate up to the threshold, eliminate above it.
    #[default]
    Auto,
    Enumeration,
    Elimination,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InferenceConfig {
    pub method: Method,
    pub enumeration_threshold: usize,
    /// Largest parent set a CPD table may be materialized for.
    pub max_parents: usize,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            method: Method::Auto,
            enumeration_threshold: 20,
            max_parents: 12,
        }
    }
}

impl InferenceConfig {
    pub fn with_method(method: Method) -> Self {
        InferenceConfig {
            method,
            ..Self::default()
        }
    }

    fn enumerates(&self, hidden: usize) -> bool {
        match self.method {
            Method::Auto => hidden <= self.enumeration_threshold,
            Method::Enumeration => true,
            Method::Elimination => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorResult {
    /// P(disease present | evidence) for every disease.
    pub posteriors: BTreeMap<NodeId, f64>,
    /// P(evidence).
    pub evidence_likelihood: f64,
}

impl PosteriorResult {
    pub fn get(&self, disease: &str) -> Option<f64> {
        self.posteriors.get(disease).copied()
    }
}

/// Probability of a total assignment: the product of every local term.
pub fn joint_prob(net: &Network, full_assignment: &Assignment) -> Result<f64, InferenceError> {
    let dense = full_assignment.to_dense(net)?;
    let mut states = Vec::with_capacity(net.len());
    for (i, v) in dense.iter().enumerate() {
        match v {
            Some(b) => states.push(*b),
            None => return Err(InferenceError::PartialAssignment(net.node_at(i).id.clone())),
        }
    }
    Ok((0..net.len())
        .map(|i| {
            let p = net.prob_present(i, |j| states[j]);
            if states[i] {
                p
            } else {
                1.0 - p
            }
        })
        .product())
}

/// Probability of a partial assignment over any nodes.
pub fn probability(net: &Network, assignment: &Assignment) -> Result<f64, InferenceError> {
    probability_with(net, assignment, &InferenceConfig::default())
}

pub fn probability_with(
    net: &Network,
    assignment: &Assignment,
    cfg: &InferenceConfig,
) -> Result<f64, InferenceError> {
    let fixed = assignment.to_dense(net)?;
    mass(net, &fixed, cfg)
}

/// P(event | given). `given` must have positive probability.
pub fn conditional_probability(
    net: &Network,
    event: &Assignment,
    given: &Assignment,
) -> Result<f64, InferenceError> {
    let denom = probability(net, given)?;
    if denom <= 0.0 {
        return Err(InferenceError::InconsistentEvidence);
    }
    for (id, v) in event.iter() {
        if given.get(id.as_str()).is_some_and(|g| g != v) {
            return Ok(0.0);
        }
    }
    Ok(probability(net, &given.merged(event))? / denom)
}

/// Prior probability that `node` is present.
pub fn marginal(net: &Network, node: &NodeId) -> Result<f64, InferenceError> {
    if net.index_of(node.as_str()).is_none() {
        return Err(ModelError::UnknownNode(node.clone()).into());
    }
    probability(net, &Assignment::new().with(node.clone(), true))
}

pub fn posterior(net: &Network, evidence: &Assignment) -> Result<PosteriorResult, InferenceError> {
    posterior_with(net, evidence, &InferenceConfig::default())
}

/// Exact per-disease posteriors given evidence on findings.
///
/// Diseases that are not ancestors of any evidence node keep their prior.
pub fn posterior_with(
    net: &Network,
    evidence: &Assignment,
    cfg: &InferenceConfig,
) -> Result<PosteriorResult, InferenceError> {
    let fixed = finding_evidence(net, evidence)?;
    let scope = net.ancestral_closure((0..net.len()).filter(|&i| fixed[i].is_some()));
    let diseases: Vec<usize> = (0..net.len())
        .filter(|&i| net.node_at(i).kind == NodeKind::Disease)
        .collect();
    let hidden = scope
        .iter()
        .zip(&fixed)
        .filter(|(&s, f)| s && f.is_none())
        .count();

    let mut with_disease = vec![0.0; diseases.len()];
    let total;
    if cfg.enumerates(hidden) {
        let mut en = Enumerator::new(net, &scope, &fixed);
        let mut t = 0.0;
        en.for_each_world(|state, w| {
            t += w;
            for (acc, &d) in with_disease.iter_mut().zip(&diseases) {
                if state[d] {
                    *acc += w;
                }
            }
        });
        total = t;
    } else {
        total = elimination::probability(net, &scope, &fixed, cfg.max_parents)?;
        if total > 0.0 {
            for (acc, &d) in with_disease.iter_mut().zip(&diseases) {
                if scope[d] {
                    let mut f = fixed.clone();
                    f[d] = Some(true);
                    *acc = elimination::probability(net, &scope, &f, cfg.max_parents)?;
                }
            }
        }
    }
    if total <= 0.0 {
        return Err(InferenceError::InconsistentEvidence);
    }

    let posteriors = diseases
        .iter()
        .zip(&with_disease)
        .map(|(&d, &joint)| {
            let node = net.node_at(d);
            let p = if scope[d] {
                (joint / total).clamp(0.0, 1.0)
            } else {
                node.prior.unwrap_or(0.0)
            };
            (node.id.clone(), p)
        })
        .collect();
    Ok(PosteriorResult {
        posteriors,
        evidence_likelihood: total,
    })
}

/// P(every node in `query` present | evidence).
pub fn conjunction_posterior(
    net: &Network,
    evidence: &Assignment,
    query: &[NodeId],
) -> Result<f64, InferenceError> {
    let fixed = finding_evidence(net, evidence)?;
    let cfg = InferenceConfig::default();
    let total = mass(net, &fixed, &cfg)?;
    if total <= 0.0 {
        return Err(InferenceError::InconsistentEvidence);
    }
    let mut joint = fixed;
    for id in query {
        let i = net
            .index_of(id.as_str())
            .ok_or_else(|| ModelError::UnknownNode(id.clone()))?;
        match joint[i] {
            Some(false) => return Ok(0.0),
            _ => joint[i] = Some(true),
        }
    }
    Ok((mass(net, &joint, &cfg)? / total).clamp(0.0, 1.0))
}

fn finding_evidence(
    net: &Network,
    evidence: &Assignment,
) -> Result<Vec<Option<bool>>, InferenceError> {
    let fixed = evidence.to_dense(net)?;
    for (i, v) in fixed.iter().enumerate() {
        if v.is_some() && net.node_at(i).kind != NodeKind::Finding {
            return Err(InferenceError::NotAFinding(net.node_at(i).id.clone()));
        }
    }
    Ok(fixed)
}

fn mass(
    net: &Network,
    fixed: &[Option<bool>],
    cfg: &InferenceConfig,
) -> Result<f64, InferenceError> {
    let scope = net.ancestral_closure((0..net.len()).filter(|&i| fixed[i].is_some()));
    let hidden = scope
        .iter()
        .zip(fixed)
        .filter(|(&s, f)| s && f.is_none())
        .count();
    if cfg.enumerates(hidden) {
        let mut en = Enumerator::new(net, &scope, fixed);
        debug_assert_eq!(en.hidden().len(), hidden);
        Ok(en.total())
    } else {
        elimination::probability(net, &scope, fixed, cfg.max_parents)
    }
}
