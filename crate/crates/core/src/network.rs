//! Network data model: leveled DAGs of binary disease, IPS and finding nodes
//! joined by activation-probability edges.
//!
//! A [`Network`] can hold anything, including invalid structure, so that
//! [`validate`] can report every problem at once. Every other operation in the
//! crate assumes a network that validates cleanly; use [`Network::new`] to get
//! one.

use std::borrow::Borrow;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Characters that would break the line-oriented and CSV formats.
const RESERVED_ID_CHARS: &[char] = &[',', '=', '>', '#', '"'];

/// Stable, ordered node identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Nonempty, no whitespace, none of `, = > # "`.
    pub fn is_well_formed(&self) -> bool {
        !self.0.is_empty()
            && !self
                .0
                .chars()
                .any(|c| c.is_whitespace() || RESERVED_ID_CHARS.contains(&c))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl Borrow<str> for NodeId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Disease,
    Ips,
    Finding,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Disease => "disease",
            NodeKind::Ips => "ips",
            NodeKind::Finding => "finding",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "disease" => Ok(NodeKind::Disease),
            "ips" => Ok(NodeKind::Ips),
            "finding" => Ok(NodeKind::Finding),
            other => Err(format!("unknown node kind '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    /// Probability the node is present when every modeled parent is absent.
    pub leak: f64,
    /// Present exactly for diseases.
    pub prior: Option<f64>,
    /// Reveal phase 1..=5, present exactly for findings.
    pub phase: Option<u8>,
}

impl Node {
    pub fn disease(id: impl Into<NodeId>, prior: f64) -> Self {
        Node {
            id: id.into(),
            kind: NodeKind::Disease,
            leak: 0.0,
            prior: Some(prior),
            phase: None,
        }
    }

    pub fn ips(id: impl Into<NodeId>, leak: f64) -> Self {
        Node {
            id: id.into(),
            kind: NodeKind::Ips,
            leak,
            prior: None,
            phase: None,
        }
    }

    pub fn finding(id: impl Into<NodeId>, leak: f64, phase: u8) -> Self {
        Node {
            id: id.into(),
            kind: NodeKind::Finding,
            leak,
            prior: None,
            phase: Some(phase),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    /// Activation probability in (0, 1].
    pub eta: f64,
}

impl Edge {
    pub fn new(src: impl Into<NodeId>, dst: impl Into<NodeId>, eta: f64) -> Self {
        Edge {
            src: src.into(),
            dst: dst.into(),
            eta,
        }
    }
}

/// One violated structural or numeric invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MalformedId {
        id: NodeId,
    },
    DuplicateNode {
        id: NodeId,
    },
    DuplicateEdge {
        src: NodeId,
        dst: NodeId,
    },
    UnknownEndpoint {
        src: NodeId,
        dst: NodeId,
        missing: NodeId,
    },
    LeakOutOfRange {
        id: NodeId,
        leak: f64,
    },
    DiseaseLeak {
        id: NodeId,
        leak: f64,
    },
    MissingPrior {
        id: NodeId,
    },
    UnexpectedPrior {
        id: NodeId,
    },
    PriorOutOfRange {
        id: NodeId,
        prior: f64,
    },
    MissingPhase {
        id: NodeId,
    },
    UnexpectedPhase {
        id: NodeId,
    },
    PhaseOutOfRange {
        id: NodeId,
        phase: u8,
    },
    EtaOutOfRange {
        src: NodeId,
        dst: NodeId,
        eta: f64,
    },
    LevelOrdering {
        src: NodeId,
        dst: NodeId,
        src_kind: NodeKind,
        dst_kind: NodeKind,
    },
    Cycle {
        nodes: Vec<NodeId>,
    },
}

impl Violation {
    /// Short category label, stable for tooling.
    pub fn class(&self) -> &'static str {
        match self {
            Violation::MalformedId { .. } => "malformed id",
            Violation::DuplicateNode { .. } => "duplicate node",
            Violation::DuplicateEdge { .. } => "duplicate edge",
            Violation::UnknownEndpoint { .. } => "unknown endpoint",
            Violation::LeakOutOfRange { .. } => "leak out of range",
            Violation::DiseaseLeak { .. } => "disease leak",
            Violation::MissingPrior { .. } => "missing prior",
            Violation::UnexpectedPrior { .. } => "unexpected prior",
            Violation::PriorOutOfRange { .. } => "prior out of range",
            Violation::MissingPhase { .. } => "missing phase",
            Violation::UnexpectedPhase { .. } => "unexpected phase",
            Violation::PhaseOutOfRange { .. } => "phase out of range",
            Violation::EtaOutOfRange { .. } => "eta out of range",
            Violation::LevelOrdering { .. } => "level ordering",
            Violation::Cycle { .. } => "DAG",
        }
    }

    /// The node this violation is about, for node-level violations.
    pub fn node(&self) -> Option<&NodeId> {
        match self {
            Violation::MalformedId { id }
            | Violation::DuplicateNode { id }
            | Violation::LeakOutOfRange { id, .. }
            | Violation::DiseaseLeak { id, .. }
            | Violation::MissingPrior { id }
            | Violation::UnexpectedPrior { id }
            | Violation::PriorOutOfRange { id, .. }
            | Violation::MissingPhase { id }
            | Violation::UnexpectedPhase { id }
            | Violation::PhaseOutOfRange { id, .. } => Some(id),
            _ => None,
        }
    }

    /// The edge this violation is about, for edge-level violations.
    pub fn edge(&self) -> Option<(&NodeId, &NodeId)> {
        match self {
            Violation::DuplicateEdge { src, dst }
            | Violation::UnknownEndpoint { src, dst, .. }
            | Violation::EtaOutOfRange { src, dst, .. }
            | Violation::LevelOrdering { src, dst, .. } => Some((src, dst)),
            _ => None,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class = self.class();
        match self {
            Violation::MalformedId { id } => write!(f, "{class}: '{id}'"),
            Violation::DuplicateNode { id } => write!(f, "{class}: {id}"),
            Violation::DuplicateEdge { src, dst } => write!(f, "{class}: {src} -> {dst}"),
            Violation::UnknownEndpoint { src, dst, missing } => {
                write!(
                    f,
                    "{class}: edge {src} -> {dst} references unknown node {missing}"
                )
            }
            Violation::LeakOutOfRange { id, leak } => write!(f, "{class}: {id} leak={leak}"),
            Violation::DiseaseLeak { id, leak } => {
                write!(f, "{class}: disease {id} must have leak 0, got {leak}")
            }
            Violation::MissingPrior { id } => write!(f, "{class}: disease {id}"),
            Violation::UnexpectedPrior { id } => write!(f, "{class}: non-disease {id}"),
            Violation::PriorOutOfRange { id, prior } => write!(f, "{class}: {id} prior={prior}"),
            Violation::MissingPhase { id } => write!(f, "{class}: finding {id}"),
            Violation::UnexpectedPhase { id } => write!(f, "{class}: non-finding {id}"),
            Violation::PhaseOutOfRange { id, phase } => write!(f, "{class}: {id} phase={phase}"),
            Violation::EtaOutOfRange { src, dst, eta } => {
                write!(f, "{class}: {src} -> {dst} eta={eta}")
            }
            Violation::LevelOrdering {
                src,
                dst,
                src_kind,
                dst_kind,
            } => {
                write!(f, "{class}: edge {src} -> {dst} ({src_kind} -> {dst_kind})")
            }
            Violation::Cycle { nodes } => {
                let names: Vec<&str> = nodes.iter().map(NodeId::as_str).collect();
                write!(f, "{class}: cycle through {}", names.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid network: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("incomplete assignment: {node} needs a value for parent {parent}")]
    IncompleteAssignment { node: NodeId, parent: NodeId },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// A leveled leaky noisy-OR network.
///
/// Nodes are kept sorted by id and edges by `(src, dst)`, so two networks built
/// from the same parts in any order compare equal and serialize identically.
#[derive(Debug, Clone)]
pub struct Network {
    name: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    index: HashMap<NodeId, usize>,
    parents: Vec<Vec<(usize, f64)>>,
    children: Vec<Vec<(usize, f64)>>,
    topo: Vec<usize>,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl Network {
    /// Builds a network and rejects it unless [`validate`] comes back empty.
    pub fn new(
        name: impl Into<String>,
        nodes: Vec<Node>,
        edges: Vec<Edge>,
    ) -> Result<Self, ModelError> {
        let net = Self::from_parts(name, nodes, edges);
        let violations = validate(&net);
        if violations.is_empty() {
            Ok(net)
        } else {
            Err(ModelError::Invalid(violations))
        }
    }

    /// Builds a network without checking any invariant.
    pub fn from_parts(name: impl Into<String>, mut nodes: Vec<Node>, mut edges: Vec<Edge>) -> Self {
        nodes.sort_by(|a, b| a.id.cmp(&b.id));
        edges.sort_by(|a, b| (&a.src, &a.dst).cmp(&(&b.src, &b.dst)));

        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            index.entry(n.id.clone()).or_insert(i);
        }
        let mut parents = vec![Vec::new(); nodes.len()];
        let mut children = vec![Vec::new(); nodes.len()];
        for e in &edges {
            if let (Some(&s), Some(&d)) = (index.get(&e.src), index.get(&e.dst)) {
                parents[d].push((s, e.eta));
                children[s].push((d, e.eta));
            }
        }
        let topo = kahn_order(&parents, &children);

        Network {
            name: name.into(),
            nodes,
            edges,
            index,
            parents,
            children,
            topo,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.index_of(id).map(|i| &self.nodes[i])
    }

    pub fn node_at(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    /// Parent indices with the eta of the connecting edge, in id order.
    pub fn parents_of(&self, i: usize) -> &[(usize, f64)] {
        &self.parents[i]
    }

    /// Child indices with the eta of the connecting edge, in id order.
    pub fn children_of(&self, i: usize) -> &[(usize, f64)] {
        &self.children[i]
    }

    /// Node indices in topological order, ties broken by id.
    ///
    /// Nodes on a cycle are omitted.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn eta(&self, src: &str, dst: &str) -> Option<f64> {
        let (s, d) = (self.index_of(src)?, self.index_of(dst)?);
        self.children[s]
            .iter()
            .find(|&&(c, _)| c == d)
            .map(|&(_, eta)| eta)
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }

    pub fn diseases(&self) -> impl Iterator<Item = &Node> {
        self.nodes_of_kind(NodeKind::Disease)
    }

    pub fn findings(&self) -> impl Iterator<Item = &Node> {
        self.nodes_of_kind(NodeKind::Finding)
    }

    pub fn ips_nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes_of_kind(NodeKind::Ips)
    }

    /// Probability node `i` is present given a predicate telling which nodes
    /// are present. Diseases return their prior.
    pub(crate) fn prob_present(&self, i: usize, present: impl Fn(usize) -> bool) -> f64 {
        let node = &self.nodes[i];
        if node.kind == NodeKind::Disease {
            return node.prior.unwrap_or(0.0);
        }
        let mut absent = 1.0 - node.leak;
        let mut any = false;
        for &(p, eta) in &self.parents[i] {
            if present(p) {
                absent *= 1.0 - eta;
                any = true;
            }
        }
        if any {
            1.0 - absent
        } else {
            node.leak
        }
    }

    /// All ancestors of the given nodes, including the nodes themselves.
    pub(crate) fn ancestral_closure(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut mark = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(i) = stack.pop() {
            if mark[i] {
                continue;
            }
            mark[i] = true;
            stack.extend(self.parents[i].iter().map(|&(p, _)| p));
        }
        mark
    }
}

fn kahn_order(parents: &[Vec<(usize, f64)>], children: &[Vec<(usize, f64)>]) -> Vec<usize> {
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> = indegree
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 0)
        .map(|(i, _)| Reverse(i))
        .collect();
    let mut order = Vec::with_capacity(parents.len());
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &(c, _) in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    order
}

fn in_unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Every violated invariant, in a deterministic order. Empty means valid.
pub fn validate(net: &Network) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen = BTreeSet::new();
    for n in &net.nodes {
        if !n.id.is_well_formed() {
            out.push(Violation::MalformedId { id: n.id.clone() });
        }
        if !seen.insert(&n.id) {
            out.push(Violation::DuplicateNode { id: n.id.clone() });
        }
        if !in_unit(n.leak) {
            out.push(Violation::LeakOutOfRange {
                id: n.id.clone(),
                leak: n.leak,
            });
        } else if n.kind == NodeKind::Disease && n.leak != 0.0 {
            out.push(Violation::DiseaseLeak {
                id: n.id.clone(),
                leak: n.leak,
            });
        }
        match (n.kind == NodeKind::Disease, n.prior) {
            (true, None) => out.push(Violation::MissingPrior { id: n.id.clone() }),
            (false, Some(_)) => out.push(Violation::UnexpectedPrior { id: n.id.clone() }),
            (true, Some(p)) if !in_unit(p) => out.push(Violation::PriorOutOfRange {
                id: n.id.clone(),
                prior: p,
            }),
            _ => {}
        }
        match (n.kind == NodeKind::Finding, n.phase) {
            (true, None) => out.push(Violation::MissingPhase { id: n.id.clone() }),
            (false, Some(_)) => out.push(Violation::UnexpectedPhase { id: n.id.clone() }),
            (true, Some(ph)) if !(1..=5).contains(&ph) => out.push(Violation::PhaseOutOfRange {
                id: n.id.clone(),
                phase: ph,
            }),
            _ => {}
        }
    }

    let mut seen_edges = BTreeSet::new();
    for e in &net.edges {
        if !seen_edges.insert((&e.src, &e.dst)) {
            out.push(Violation::DuplicateEdge {
                src: e.src.clone(),
                dst: e.dst.clone(),
            });
        }
        if !(e.eta > 0.0 && e.eta <= 1.0) {
            out.push(Violation::EtaOutOfRange {
                src: e.src.clone(),
                dst: e.dst.clone(),
                eta: e.eta,
            });
        }
        let (src, dst) = match (net.node(e.src.as_str()), net.node(e.dst.as_str())) {
            (Some(s), Some(d)) => (s, d),
            (s, _) => {
                let missing = if s.is_none() { &e.src } else { &e.dst };
                out.push(Violation::UnknownEndpoint {
                    src: e.src.clone(),
                    dst: e.dst.clone(),
                    missing: missing.clone(),
                });
                continue;
            }
        };
        if !level_allows(src.kind, dst.kind) {
            out.push(Violation::LevelOrdering {
                src: e.src.clone(),
                dst: e.dst.clone(),
                src_kind: src.kind,
                dst_kind: dst.kind,
            });
        }
    }

    if net.topo.len() < net.nodes.len() {
        let mut placed = vec![false; net.nodes.len()];
        for &i in &net.topo {
            placed[i] = true;
        }
        // Unplaced nodes are on a cycle or downstream of one; keep only those
        // that can reach themselves.
        let nodes: Vec<NodeId> = (0..net.nodes.len())
            .filter(|&i| !placed[i] && reaches(net, i, i))
            .map(|i| net.nodes[i].id.clone())
            .collect();
        out.push(Violation::Cycle { nodes });
    }
    out
}

fn level_allows(src: NodeKind, dst: NodeKind) -> bool {
    use NodeKind::*;
    matches!(
        (src, dst),
        (Disease, Ips) | (Disease, Finding) | (Ips, Ips) | (Ips, Finding)
    )
}

fn reaches(net: &Network, from: usize, target: usize) -> bool {
    let mut seen = vec![false; net.nodes.len()];
    let mut stack: Vec<usize> = net.children[from].iter().map(|&(c, _)| c).collect();
    while let Some(i) = stack.pop() {
        if i == target {
            return true;
        }
        if !std::mem::replace(&mut seen[i], true) {
            stack.extend(net.children[i].iter().map(|&(c, _)| c));
        }
    }
    false
}

/// Present/absent values for a subset of nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<NodeId, bool>);

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, id: impl Into<NodeId>, present: bool) -> Self {
        self.0.insert(id.into(), present);
        self
    }

    pub fn insert(&mut self, id: impl Into<NodeId>, present: bool) -> Option<bool> {
        self.0.insert(id.into(), present)
    }

    pub fn get(&self, id: &str) -> Option<bool> {
        self.0.get(id).copied()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.0.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, bool)> {
        self.0.iter().map(|(k, &v)| (k, v))
    }

    /// Ids assigned present.
    pub fn present(&self) -> impl Iterator<Item = &NodeId> {
        self.0.iter().filter(|(_, &v)| v).map(|(k, _)| k)
    }

    /// Union with `other`; `other` wins on conflicts.
    pub fn merged(&self, other: &Assignment) -> Assignment {
        let mut out = self.clone();
        out.0.extend(other.0.iter().map(|(k, &v)| (k.clone(), v)));
        out
    }

    /// Fails on the first id that `net` does not contain.
    pub fn check_ids(&self, net: &Network) -> Result<(), ModelError> {
        match self.0.keys().find(|id| net.index_of(id.as_str()).is_none()) {
            Some(id) => Err(ModelError::UnknownNode(id.clone())),
            None => Ok(()),
        }
    }

    /// Dense per-index view over `net`; unknown ids are an error.
    pub(crate) fn to_dense(&self, net: &Network) -> Result<Vec<Option<bool>>, ModelError> {
        let mut dense = vec![None; net.len()];
        for (id, &v) in &self.0 {
            let i = net
                .index_of(id.as_str())
                .ok_or_else(|| ModelError::UnknownNode(id.clone()))?;
            dense[i] = Some(v);
        }
        Ok(dense)
    }
}

impl<K: Into<NodeId>> FromIterator<(K, bool)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (K, bool)>>(iter: T) -> Self {
        Assignment(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> Network {
        Network::from_parts(
            "minimal",
            vec![Node::disease("D", 0.1), Node::finding("F", 0.05, 1)],
            vec![Edge::new("D", "F", 0.5)],
        )
    }

    #[test]
    fn minimal_network_is_valid() {
        assert!(validate(&minimal()).is_empty());
        assert!(Network::new("m", minimal().nodes().to_vec(), minimal().edges().to_vec()).is_ok());
    }

    #[test]
    fn finding_to_disease_is_a_level_violation() {
        let net = Network::from_parts(
            "bad",
            vec![Node::disease("D", 0.1), Node::finding("F", 0.05, 1)],
            vec![Edge::new("F", "D", 0.5)],
        );
        let v = validate(&net);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].class(), "level ordering");
    }

    #[test]
    fn ips_cycle_is_one_dag_violation() {
        let net = Network::from_parts(
            "cyc",
            vec![Node::ips("B1", 0.0), Node::ips("B2", 0.0)],
            vec![Edge::new("B1", "B2", 0.5), Edge::new("B2", "B1", 0.5)],
        );
        let v = validate(&net);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].class(), "DAG");
        assert_eq!(
            v[0],
            Violation::Cycle {
                nodes: vec![NodeId::from("B1"), NodeId::from("B2")]
            }
        );
    }

    #[test]
    fn nodes_downstream_of_a_cycle_are_not_blamed() {
        let net = Network::from_parts(
            "cyc",
            vec![
                Node::ips("B1", 0.0),
                Node::ips("B2", 0.0),
                Node::finding("F", 0.0, 1),
            ],
            vec![
                Edge::new("B1", "B2", 0.5),
                Edge::new("B2", "B1", 0.5),
                Edge::new("B2", "F", 0.5),
            ],
        );
        let v = validate(&net);
        assert_eq!(
            v,
            vec![Violation::Cycle {
                nodes: vec!["B1".into(), "B2".into()]
            }]
        );
    }

    #[test]
    fn zero_eta_and_disease_leak_are_rejected() {
        let mut d = Node::disease("D", 0.5);
        d.leak = 0.1;
        let net = Network::from_parts(
            "x",
            vec![d, Node::finding("F", 0.0, 1)],
            vec![Edge::new("D", "F", 0.0)],
        );
        let classes: Vec<_> = validate(&net).iter().map(Violation::class).collect();
        assert_eq!(classes, vec!["disease leak", "eta out of range"]);
    }

    #[test]
    fn kind_specific_fields_are_checked() {
        let mut f = Node::finding("F", 0.0, 1);
        f.phase = None;
        f.prior = Some(0.2);
        let mut i = Node::ips("I", 0.0);
        i.phase = Some(9);
        let mut d = Node::disease("D", 1.5);
        d.id = NodeId::new("bad id");
        let net = Network::from_parts("x", vec![d, f, i], vec![]);
        let classes: Vec<_> = validate(&net).iter().map(Violation::class).collect();
        assert_eq!(
            classes,
            vec![
                "unexpected prior",
                "missing phase",
                "unexpected phase",
                "malformed id",
                "prior out of range"
            ]
        );
    }

    #[test]
    fn duplicates_and_dangling_edges() {
        let net = Network::from_parts(
            "x",
            vec![
                Node::disease("D", 0.5),
                Node::disease("D", 0.5),
                Node::finding("F", 0.0, 1),
            ],
            vec![
                Edge::new("D", "F", 0.5),
                Edge::new("D", "F", 0.6),
                Edge::new("D", "G", 0.6),
            ],
        );
        let classes: Vec<_> = validate(&net).iter().map(Violation::class).collect();
        assert_eq!(
            classes,
            vec!["duplicate node", "duplicate edge", "unknown endpoint"]
        );
    }

    #[test]
    fn construction_order_does_not_matter() {
        let a = Network::from_parts(
            "n",
            vec![
                Node::finding("F", 0.0, 2),
                Node::disease("A", 0.5),
                Node::ips("B", 0.1),
            ],
            vec![Edge::new("B", "F", 0.3), Edge::new("A", "B", 0.2)],
        );
        let b = Network::from_parts(
            "n",
            vec![
                Node::disease("A", 0.5),
                Node::ips("B", 0.1),
                Node::finding("F", 0.0, 2),
            ],
            vec![Edge::new("A", "B", 0.2), Edge::new("B", "F", 0.3)],
        );
        assert_eq!(a, b);
        assert_eq!(a.topological_order(), &[0, 1, 2]);
        assert_eq!(a.eta("A", "B"), Some(0.2));
        assert_eq!(a.eta("B", "A"), None);
    }

    #[test]
    fn assignment_rejects_unknown_ids() {
        let net = minimal();
        let a = Assignment::new().with("F", true).with("Q", false);
        assert_eq!(a.check_ids(&net), Err(ModelError::UnknownNode("Q".into())));
        assert!(Assignment::new().with("F", true).check_ids(&net).is_ok());
    }
}
