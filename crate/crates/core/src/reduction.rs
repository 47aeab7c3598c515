//! Approximate level reduction: eliminate every IPS node, turning a
//! disease → IPS → finding network into a disease → finding network.
//!
//! Eliminating an IPS node `B` wires each predecessor `P` (edge eta `p`)
//! straight to each successor `S` (edge eta `q`) with eta `p·q`. When `P → S`
//! already exists the two are combined as parallel noisy-OR paths,
//! `1 - (1 - a)(1 - b)`. `B`'s own leak reaches `S` through `q` and is folded
//! into `S`'s leak once per successor. Correlations between paths that share
//! an edge are ignored, which is where the approximation comes from.
//!
//! IPS nodes are eliminated in topological order with ties broken by id, so
//! IPS → IPS chains collapse from the top down and results are reproducible.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::network::{validate, Edge, ModelError, Network, Node, NodeId, NodeKind, Violation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("{0} is not an IPS node")]
    NotIps(NodeId),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("cannot merge an empty set of paths")]
    EmptyMerge,
}

pub fn compose_serial(p: f64, q: f64) -> f64 {
    p * q
}

/// Combines already-composed path etas into one edge: `1 - prod(1 - eta_j)`.
pub fn merge_parallel(composed: &[f64]) -> Result<f64, ReductionError> {
    if composed.is_empty() {
        return Err(ReductionError::EmptyMerge);
    }
    let mut fail = 1.0;
    for &eta in composed {
        if !(0.0..=1.0).contains(&eta) {
            return Err(ModelError::OutOfRange {
                what: "eta",
                value: eta,
            }
            .into());
        }
        fail *= 1.0 - eta;
    }
    Ok(1.0 - fail)
}

/// New leak for a successor `C` after eliminating `B` on the edge `B → C`
/// with eta `q`: `1 - (1 - rho_b·q)(1 - rho_c)`.
pub fn absorb_leak(rho_b: f64, q: f64, rho_c: f64) -> f64 {
    1.0 - (1.0 - rho_b * q) * (1.0 - rho_c)
}

/// Where one reduced edge came from.
#[derive(Debug, Clone, PartialEq)]
pub struct PathProvenance {
    pub src: NodeId,
    pub dst: NodeId,
    /// Node-id sequences in the original network, each from `src` to `dst`.
    pub source_paths: Vec<Vec<NodeId>>,
    /// Product of original etas along each path, parallel to `source_paths`.
    pub composed_etas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionReport {
    pub reduced: Network,
    /// One entry per reduced edge, in `(src, dst)` order.
    pub provenance: Vec<PathProvenance>,
    pub param_count_original: usize,
    pub param_count_reduced: usize,
    pub eliminated_ips_order: Vec<NodeId>,
}

/// Activation parameters plus one leak parameter per node with nonzero leak.
pub fn param_count(net: &Network) -> usize {
    net.edges().len() + net.nodes().iter().filter(|n| n.leak != 0.0).count()
}

#[derive(Debug, Clone)]
struct WorkEdge {
    eta: f64,
    paths: Vec<(Vec<NodeId>, f64)>,
}

/// Mutable copy of a network used while nodes are being eliminated.
struct WorkNet {
    name: String,
    nodes: BTreeMap<NodeId, Node>,
    edges: BTreeMap<(NodeId, NodeId), WorkEdge>,
}

impl WorkNet {
    fn from_network(net: &Network) -> Self {
        WorkNet {
            name: net.name().to_owned(),
            nodes: net
                .nodes()
                .iter()
                .map(|n| (n.id.clone(), n.clone()))
                .collect(),
            edges: net
                .edges()
                .iter()
                .map(|e| {
                    let path = vec![e.src.clone(), e.dst.clone()];
                    (
                        (e.src.clone(), e.dst.clone()),
                        WorkEdge {
                            eta: e.eta,
                            paths: vec![(path, e.eta)],
                        },
                    )
                })
                .collect(),
        }
    }

    fn eliminate(&mut self, b: &NodeId) -> Result<(), ReductionError> {
        let node = self
            .nodes
            .get(b)
            .ok_or_else(|| ModelError::UnknownNode(b.clone()))?;
        if node.kind != NodeKind::Ips {
            return Err(ReductionError::NotIps(b.clone()));
        }
        let rho_b = node.leak;

        let incoming: Vec<(NodeId, WorkEdge)> = self
            .edges
            .iter()
            .filter(|((_, d), _)| d == b)
            .map(|((s, _), e)| (s.clone(), e.clone()))
            .collect();
        let outgoing: Vec<(NodeId, WorkEdge)> = self
            .edges
            .iter()
            .filter(|((s, _), _)| s == b)
            .map(|((_, d), e)| (d.clone(), e.clone()))
            .collect();
        self.edges.retain(|(s, d), _| s != b && d != b);
        self.nodes.remove(b);

        for (succ, out_edge) in &outgoing {
            for (pred, in_edge) in &incoming {
                let eta = compose_serial(in_edge.eta, out_edge.eta);
                let paths = in_edge.paths.iter().flat_map(|(up, up_eta)| {
                    out_edge.paths.iter().map(move |(down, down_eta)| {
                        let mut path = up.clone();
                        path.extend(down.iter().skip(1).cloned());
                        (path, up_eta * down_eta)
                    })
                });
                match self.edges.get_mut(&(pred.clone(), succ.clone())) {
                    Some(existing) => {
                        existing.eta = merge_parallel(&[existing.eta, eta])?;
                        existing.paths.extend(paths);
                    }
                    None => {
                        let paths = paths.collect();
                        self.edges
                            .insert((pred.clone(), succ.clone()), WorkEdge { eta, paths });
                    }
                }
            }
            let s = self.nodes.get_mut(succ).expect("successor exists");
            s.leak = absorb_leak(rho_b, out_edge.eta, s.leak);
        }
        Ok(())
    }

    fn to_network(&self) -> Network {
        Network::from_parts(
            self.name.clone(),
            self.nodes.values().cloned().collect(),
            self.edges
                .iter()
                .map(|((s, d), e)| Edge::new(s.clone(), d.clone(), e.eta))
                .collect(),
        )
    }
}

/// Removes one IPS node, rewiring its predecessors to its successors.
pub fn eliminate_ips(net: &Network, b: &NodeId) -> Result<Network, ReductionError> {
    let mut work = WorkNet::from_network(net);
    work.eliminate(b)?;
    Ok(work.to_network())
}

/// IPS nodes in topological order over IPS → IPS arcs, ties by id.
pub fn ips_elimination_order(net: &Network) -> Vec<NodeId> {
    let is_ips = |i: usize| net.node_at(i).kind == NodeKind::Ips;
    let mut indegree: BTreeMap<usize, usize> = (0..net.len())
        .filter(|&i| is_ips(i))
        .map(|i| {
            (
                i,
                net.parents_of(i)
                    .iter()
                    .filter(|&&(p, _)| is_ips(p))
                    .count(),
            )
        })
        .collect();
    let mut ready: BTreeSet<usize> = indegree
        .iter()
        .filter(|(_, &d)| d == 0)
        .map(|(&i, _)| i)
        .collect();
    let mut order = Vec::with_capacity(indegree.len());
    while let Some(i) = ready.pop_first() {
        order.push(net.node_at(i).id.clone());
        for &(c, _) in net.children_of(i) {
            if let Some(d) = indegree.get_mut(&c) {
                *d -= 1;
                if *d == 0 {
                    ready.insert(c);
                }
            }
        }
    }
    order
}

/// Eliminates every IPS node and reports the result with its provenance.
pub fn level_reduce(net: &Network) -> Result<ReductionReport, ReductionError> {
    let violations: Vec<Violation> = validate(net);
    if !violations.is_empty() {
        return Err(ModelError::Invalid(violations).into());
    }

    let order = ips_elimination_order(net);
    let mut work = WorkNet::from_network(net);
    for b in &order {
        work.eliminate(b)?;
    }
    let reduced = work.to_network();

    let provenance = work
        .edges
        .iter()
        .map(|((s, d), e)| PathProvenance {
            src: s.clone(),
            dst: d.clone(),
            source_paths: e.paths.iter().map(|(p, _)| p.clone()).collect(),
            composed_etas: e.paths.iter().map(|&(_, eta)| eta).collect(),
        })
        .collect();

    Ok(ReductionReport {
        param_count_original: param_count(net),
        param_count_reduced: param_count(&reduced),
        reduced,
        provenance,
        eliminated_ips_order: order,
    })
}

/// Number of IPS nodes on each path, collected per disease.
pub(crate) fn ips_path_lengths(report: &ReductionReport) -> BTreeMap<NodeId, Vec<usize>> {
    let mut out: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    for prov in &report.provenance {
        for path in &prov.source_paths {
            out.entry(prov.src.clone())
                .or_default()
                .push(path.len() - 2);
        }
    }
    out
}
