//! The line-oriented `nornet 1` network file.
//!
//! ```text
//! nornet 1 <name>
//! node <id> <disease|ips|finding> leak=<float> [prior=<float>] [phase=<int>]
//! edge <src> <dst> eta=<float>
//! ```
//!
//! `#` starts a comment that runs to the end of the line; blank lines are
//! ignored. Serialization writes nodes by id, then edges by `(src, dst)`, with
//! 17 significant digits, so `parse(serialize(net)) == net` bit for bit.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use super::numfmt::fmt_sig;
use crate::network::{validate, Edge, Network, Node, NodeId, NodeKind, Violation};

pub const MAGIC: &str = "nornet";
pub const VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub enum DiagnosticKind {
    MissingHeader,
    UnsupportedVersion(String),
    UnknownDirective(String),
    Arity {
        directive: &'static str,
        expected: usize,
        found: usize,
    },
    UnknownKind(String),
    UnknownField(String),
    DuplicateField(String),
    MissingField(&'static str),
    MalformedNumber {
        field: String,
        text: String,
    },
    Violation(Violation),
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagnosticKind::MissingHeader => write!(f, "missing '{MAGIC} {VERSION} <name>' header"),
            DiagnosticKind::UnsupportedVersion(v) => write!(f, "unsupported format version '{v}'"),
            DiagnosticKind::UnknownDirective(d) => write!(f, "unknown directive '{d}'"),
            DiagnosticKind::Arity {
                directive,
                expected,
                found,
            } => write!(
                f,
                "'{directive}' takes {expected} positional fields, found {found}"
            ),
            DiagnosticKind::UnknownKind(k) => write!(f, "unknown node kind '{k}'"),
            DiagnosticKind::UnknownField(k) => write!(f, "unknown field '{k}'"),
            DiagnosticKind::DuplicateField(k) => write!(f, "duplicate field '{k}'"),
            DiagnosticKind::MissingField(k) => write!(f, "missing required field '{k}'"),
            DiagnosticKind::MalformedNumber { field, text } => {
                write!(f, "malformed number for '{field}': '{text}'")
            }
            DiagnosticKind::Violation(v) => write!(f, "{v}"),
        }
    }
}

/// One problem, attached to a 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: usize,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.kind)
    }
}

/// Either one syntax error, or every validation violation in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseError {
    fn at(line: usize, kind: DiagnosticKind) -> Self {
        ParseError {
            diagnostics: vec![Diagnostic { line, kind }],
        }
    }

    /// True when the file was well formed but described an invalid network.
    pub fn is_validation(&self) -> bool {
        self.diagnostics
            .iter()
            .all(|d| matches!(d.kind, DiagnosticKind::Violation(_)))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// Parsed but unvalidated file contents, with the line each item came from.
#[derive(Debug, Clone)]
pub struct RawNetwork {
    pub network: Network,
    node_lines: Vec<(NodeId, usize)>,
    edge_lines: Vec<((NodeId, NodeId), usize)>,
    header_line: usize,
}

impl RawNetwork {
    /// Validation violations mapped to the lines that caused them.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut node_lines: HashMap<&NodeId, Vec<usize>> = HashMap::new();
        for (id, line) in &self.node_lines {
            node_lines.entry(id).or_default().push(*line);
        }
        let mut edge_lines: HashMap<(&NodeId, &NodeId), Vec<usize>> = HashMap::new();
        for ((s, d), line) in &self.edge_lines {
            edge_lines.entry((s, d)).or_default().push(*line);
        }
        let mut dup_nodes: HashMap<NodeId, usize> = HashMap::new();
        let mut dup_edges: HashMap<(NodeId, NodeId), usize> = HashMap::new();

        let mut out: Vec<Diagnostic> = validate(&self.network)
            .into_iter()
            .map(|v| {
                let line = match &v {
                    Violation::DuplicateNode { id } => {
                        let k = dup_nodes.entry(id.clone()).or_insert(0);
                        *k += 1;
                        node_lines.get(id).and_then(|l| l.get(*k).copied())
                    }
                    Violation::DuplicateEdge { src, dst } => {
                        let k = dup_edges.entry((src.clone(), dst.clone())).or_insert(0);
                        *k += 1;
                        edge_lines.get(&(src, dst)).and_then(|l| l.get(*k).copied())
                    }
                    Violation::Cycle { nodes } => self
                        .edge_lines
                        .iter()
                        .filter(|((s, d), _)| nodes.contains(s) && nodes.contains(d))
                        .map(|(_, l)| *l)
                        .min(),
                    other => match (other.node(), other.edge()) {
                        (Some(id), _) => node_lines.get(id).map(|l| l[0]),
                        (_, Some((s, d))) => edge_lines.get(&(s, d)).map(|l| l[0]),
                        _ => None,
                    },
                };
                Diagnostic {
                    line: line.unwrap_or(self.header_line),
                    kind: DiagnosticKind::Violation(v),
                }
            })
            .collect();
        out.sort_by_key(|d| d.line);
        out
    }
}

/// Parses and validates a network file.
pub fn parse_network(text: &str) -> Result<Network, ParseError> {
    let raw = parse_network_unchecked(text)?;
    let diagnostics = raw.diagnostics();
    if diagnostics.is_empty() {
        Ok(raw.network)
    } else {
        Err(ParseError { diagnostics })
    }
}

/// Parses a network file without validating the network it describes.
pub fn parse_network_unchecked(text: &str) -> Result<RawNetwork, ParseError> {
    let mut name = None;
    let mut header_line = 0;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut node_lines = Vec::new();
    let mut edge_lines = Vec::new();

    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let directive = tokens.next().expect("nonempty line");
        if name.is_none() {
            if directive != MAGIC {
                return Err(ParseError::at(line_no, DiagnosticKind::MissingHeader));
            }
            match tokens.next() {
                Some(VERSION) => {}
                Some(v) => {
                    return Err(ParseError::at(
                        line_no,
                        DiagnosticKind::UnsupportedVersion(v.to_string()),
                    ))
                }
                None => return Err(ParseError::at(line_no, DiagnosticKind::MissingHeader)),
            }
            name = Some(tokens.collect::<Vec<_>>().join(" "));
            header_line = line_no;
            continue;
        }
        let rest: Vec<&str> = tokens.collect();
        match directive {
            "node" => {
                let node = parse_node(&rest).map_err(|k| ParseError::at(line_no, k))?;
                node_lines.push((node.id.clone(), line_no));
                nodes.push(node);
            }
            "edge" => {
                let edge = parse_edge(&rest).map_err(|k| ParseError::at(line_no, k))?;
                edge_lines.push(((edge.src.clone(), edge.dst.clone()), line_no));
                edges.push(edge);
            }
            other => {
                return Err(ParseError::at(
                    line_no,
                    DiagnosticKind::UnknownDirective(other.to_string()),
                ))
            }
        }
    }

    let name = name.ok_or_else(|| {
        ParseError::at(text.lines().count().max(1), DiagnosticKind::MissingHeader)
    })?;
    Ok(RawNetwork {
        network: Network::from_parts(name, nodes, edges),
        node_lines,
        edge_lines,
        header_line,
    })
}

/// Splits `key=value` fields, rejecting unknown and repeated keys.
fn fields<'a>(
    tokens: &[&'a str],
    allowed: &[&str],
) -> Result<HashMap<&'a str, &'a str>, DiagnosticKind> {
    let mut out = HashMap::new();
    for tok in tokens {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| DiagnosticKind::UnknownField(tok.to_string()))?;
        if !allowed.contains(&k) {
            return Err(DiagnosticKind::UnknownField(k.to_string()));
        }
        if out.insert(k, v).is_some() {
            return Err(DiagnosticKind::DuplicateField(k.to_string()));
        }
    }
    Ok(out)
}

fn float(field: &str, text: &str) -> Result<f64, DiagnosticKind> {
    text.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| DiagnosticKind::MalformedNumber {
            field: field.to_string(),
            text: text.to_string(),
        })
}

fn positional<'a>(
    tokens: &'a [&'a str],
    directive: &'static str,
    expected: usize,
) -> Result<(&'a [&'a str], &'a [&'a str]), DiagnosticKind> {
    let found = tokens.iter().take_while(|t| !t.contains('=')).count();
    if found != expected {
        return Err(DiagnosticKind::Arity {
            directive,
            expected,
            found,
        });
    }
    Ok(tokens.split_at(expected))
}

fn parse_node(tokens: &[&str]) -> Result<Node, DiagnosticKind> {
    let (pos, rest) = positional(tokens, "node", 2)?;
    let kind: NodeKind = pos[1]
        .parse()
        .map_err(|_| DiagnosticKind::UnknownKind(pos[1].to_string()))?;
    let f = fields(rest, &["leak", "prior", "phase"])?;
    let leak = float(
        "leak",
        f.get("leak").ok_or(DiagnosticKind::MissingField("leak"))?,
    )?;
    let prior = f.get("prior").map(|t| float("prior", t)).transpose()?;
    let phase = f
        .get("phase")
        .map(|t| {
            t.parse::<u8>()
                .map_err(|_| DiagnosticKind::MalformedNumber {
                    field: "phase".into(),
                    text: t.to_string(),
                })
        })
        .transpose()?;
    Ok(Node {
        id: NodeId::new(pos[0]),
        kind,
        leak,
        prior,
        phase,
    })
}

fn parse_edge(tokens: &[&str]) -> Result<Edge, DiagnosticKind> {
    let (pos, rest) = positional(tokens, "edge", 2)?;
    let f = fields(rest, &["eta"])?;
    let eta = float(
        "eta",
        f.get("eta").ok_or(DiagnosticKind::MissingField("eta"))?,
    )?;
    Ok(Edge::new(pos[0], pos[1], eta))
}

/// Canonical text of a network.
pub fn serialize_network(net: &Network) -> String {
    let mut out = String::new();
    if net.name().is_empty() {
        writeln!(out, "{MAGIC} {VERSION}").unwrap();
    } else {
        writeln!(out, "{MAGIC} {VERSION} {}", net.name()).unwrap();
    }
    for n in net.nodes() {
        write!(out, "node {} {} leak={}", n.id, n.kind, fmt_sig(n.leak, 17)).unwrap();
        if let Some(p) = n.prior {
            write!(out, " prior={}", fmt_sig(p, 17)).unwrap();
        }
        if let Some(ph) = n.phase {
            write!(out, " phase={ph}").unwrap();
        }
        out.push('\n');
    }
    for e in net.edges() {
        writeln!(out, "edge {} {} eta={}", e.src, e.dst, fmt_sig(e.eta, 17)).unwrap();
    }
    out
}
