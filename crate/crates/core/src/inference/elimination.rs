//! Sum-product variable elimination over binary factors.
//!
//! Each noisy-OR CPD is materialized as a full table over the node and its
//! parents (minus anything fixed by evidence), so the parent count is capped.
//! Variables are eliminated greedily by minimum degree in the interaction
//! graph, ties broken by node index (which is id order).

use std::collections::BTreeSet;

use super::InferenceError;
use crate::network::Network;

/// Table over binary variables; bit `j` of a row index is the value of `vars[j]`.
#[derive(Debug, Clone)]
struct Factor {
    vars: Vec<usize>,
    table: Vec<f64>,
}

impl Factor {
    fn scalar(v: f64) -> Self {
        Factor {
            vars: Vec::new(),
            table: vec![v],
        }
    }

    fn cpd(net: &Network, i: usize, fixed: &[Option<bool>]) -> Factor {
        let mut vars: Vec<usize> = net
            .parents_of(i)
            .iter()
            .map(|&(p, _)| p)
            .chain(std::iter::once(i))
            .filter(|&v| fixed[v].is_none())
            .collect();
        vars.sort_unstable();
        let mut table = vec![0.0; 1 << vars.len()];
        for (row, slot) in table.iter_mut().enumerate() {
            let value = |v: usize| match fixed[v] {
                Some(b) => b,
                None => {
                    let j = vars.binary_search(&v).expect("variable in scope");
                    row >> j & 1 == 1
                }
            };
            let p = net.prob_present(i, value);
            *slot = if value(i) { p } else { 1.0 - p };
        }
        Factor { vars, table }
    }

    fn product(&self, other: &Factor) -> Factor {
        let vars: Vec<usize> = self
            .vars
            .iter()
            .chain(&other.vars)
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let positions = |f: &Factor| -> Vec<usize> {
            f.vars
                .iter()
                .map(|v| vars.binary_search(v).expect("subset"))
                .collect()
        };
        let (pa, pb) = (positions(self), positions(other));
        let project = |row: usize, pos: &[usize]| -> usize {
            pos.iter()
                .enumerate()
                .fold(0, |acc, (j, &bit)| acc | ((row >> bit & 1) << j))
        };
        let table = (0..1usize << vars.len())
            .map(|row| self.table[project(row, &pa)] * other.table[project(row, &pb)])
            .collect();
        Factor { vars, table }
    }

    fn sum_out(&self, var: usize) -> Factor {
        let j = match self.vars.iter().position(|&v| v == var) {
            Some(j) => j,
            None => return self.clone(),
        };
        let mut vars = self.vars.clone();
        vars.remove(j);
        let low = (1usize << j) - 1;
        let table = (0..1usize << vars.len())
            .map(|row| {
                let base = (row & low) | ((row & !low) << 1);
                self.table[base] + self.table[base | (1 << j)]
            })
            .collect();
        Factor { vars, table }
    }
}

/// Greedy min-degree order over `hidden`, given the factor scopes.
pub(crate) fn min_degree_order(n: usize, scopes: &[Vec<usize>], hidden: &[usize]) -> Vec<usize> {
    let mut adj = vec![BTreeSet::new(); n];
    for scope in scopes {
        for &a in scope {
            for &b in scope {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    let mut remaining: BTreeSet<usize> = hidden.iter().copied().collect();
    let mut order = Vec::with_capacity(hidden.len());
    while let Some(&next) = remaining.iter().min_by_key(|&&v| (adj[v].len(), v)) {
        remaining.remove(&next);
        order.push(next);
        let nbrs: Vec<usize> = adj[next].iter().copied().collect();
        for &a in &nbrs {
            adj[a].remove(&next);
            for &b in &nbrs {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[next].clear();
    }
    order
}

/// Probability of the `fixed` values, summing out every other node in `scope`.
pub(crate) fn probability(
    net: &Network,
    scope: &[bool],
    fixed: &[Option<bool>],
    max_parents: usize,
) -> Result<f64, InferenceError> {
    let mut factors = Vec::new();
    let mut hidden = Vec::new();
    for i in (0..net.len()).filter(|&i| scope[i]) {
        let parents = net.parents_of(i).len();
        if parents > max_parents {
            return Err(InferenceError::TooManyParents {
                node: net.node_at(i).id.clone(),
                parents,
                cap: max_parents,
            });
        }
        factors.push(Factor::cpd(net, i, fixed));
        if fixed[i].is_none() {
            hidden.push(i);
        }
    }

    let scopes: Vec<Vec<usize>> = factors.iter().map(|f| f.vars.clone()).collect();
    for var in min_degree_order(net.len(), &scopes, &hidden) {
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&var));
        factors = rest;
        let joined = touching
            .iter()
            .fold(Factor::scalar(1.0), |acc, f| acc.product(f));
        factors.push(joined.sum_out(var));
    }

    Ok(factors
        .iter()
        .map(|f| {
            debug_assert!(f.vars.is_empty());
            f.table[0]
        })
        .product())
}
