//! Leaky noisy-OR local semantics.

use crate::network::{Assignment, ModelError, Network, NodeId, NodeKind};

fn check_unit(what: &'static str, value: f64) -> Result<f64, ModelError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ModelError::OutOfRange { what, value })
    }
}

/// `1 - (1 - leak) * prod(1 - eta)` over the etas of present parents.
///
/// With no present parents this is just the leak.
pub fn noisy_or_prob(leak: f64, present_etas: &[f64]) -> Result<f64, ModelError> {
    check_unit("leak", leak)?;
    if present_etas.is_empty() {
        return Ok(leak);
    }
    let mut absent = 1.0 - leak;
    for &eta in present_etas {
        absent *= 1.0 - check_unit("eta", eta)?;
    }
    Ok(1.0 - absent)
}

/// Probability that `node` is present given values for its parents.
///
/// Diseases are roots and return their prior. Entries in `parent_assignment`
/// that are not parents of `node` are ignored.
pub fn local_cpd(
    net: &Network,
    node: &NodeId,
    parent_assignment: &Assignment,
) -> Result<f64, ModelError> {
    let i = net
        .index_of(node.as_str())
        .ok_or_else(|| ModelError::UnknownNode(node.clone()))?;
    let n = net.node_at(i);
    if n.kind == NodeKind::Disease {
        return Ok(n.prior.unwrap_or(0.0));
    }
    let mut etas = Vec::new();
    for &(p, eta) in net.parents_of(i) {
        let pid = &net.node_at(p).id;
        match parent_assignment.get(pid.as_str()) {
            Some(true) => etas.push(eta),
            Some(false) => {}
            None => {
                return Err(ModelError::IncompleteAssignment {
                    node: node.clone(),
                    parent: pid.clone(),
                })
            }
        }
    }
    noisy_or_prob(n.leak, &etas)
}
