//! Exact summation over every joint setting of the hidden nodes.
//!
//! Hidden nodes are visited depth-first in topological order, and each local
//! factor is multiplied in at the shallowest depth where all of its variables
//! are fixed, so evidence factors are not recomputed for every leaf.

use crate::network::Network;

pub(crate) struct Enumerator<'a> {
    net: &'a Network,
    hidden: Vec<usize>,
    /// Factor owners whose variables are fully fixed once `hidden[k]` is set.
    ready_at: Vec<Vec<usize>>,
    constant: f64,
    state: Vec<bool>,
}

impl<'a> Enumerator<'a> {
    /// `scope` marks the nodes that take part (an ancestrally closed set);
    /// `fixed` gives values for the assigned ones. Everything else in scope is
    /// summed out.
    pub(crate) fn new(net: &'a Network, scope: &[bool], fixed: &[Option<bool>]) -> Self {
        let mut state = vec![false; net.len()];
        let mut depth = vec![None; net.len()];
        let mut hidden = Vec::new();
        for &i in net.topological_order() {
            if !scope[i] {
                continue;
            }
            match fixed[i] {
                Some(v) => state[i] = v,
                None => {
                    depth[i] = Some(hidden.len());
                    hidden.push(i);
                }
            }
        }

        let mut ready_at = vec![Vec::new(); hidden.len()];
        let mut constant_owners = Vec::new();
        for &i in net.topological_order() {
            if !scope[i] {
                continue;
            }
            let ready = net
                .parents_of(i)
                .iter()
                .map(|&(p, _)| depth[p])
                .chain(std::iter::once(depth[i]))
                .max()
                .flatten();
            match ready {
                Some(k) => ready_at[k].push(i),
                None => constant_owners.push(i),
            }
        }

        let mut en = Enumerator {
            net,
            hidden,
            ready_at,
            constant: 1.0,
            state,
        };
        en.constant = constant_owners.iter().map(|&i| en.factor(i)).product();
        en
    }

    pub(crate) fn hidden(&self) -> &[usize] {
        &self.hidden
    }

    fn factor(&self, i: usize) -> f64 {
        let p = self.net.prob_present(i, |j| self.state[j]);
        if self.state[i] {
            p
        } else {
            1.0 - p
        }
    }

    /// Calls `leaf` once per hidden-node setting with the full state vector
    /// and that world's probability mass.
    pub(crate) fn for_each_world(&mut self, mut leaf: impl FnMut(&[bool], f64)) {
        if self.constant == 0.0 {
            return;
        }
        let c = self.constant;
        self.descend(0, c, &mut leaf);
    }

    fn descend(&mut self, k: usize, weight: f64, leaf: &mut impl FnMut(&[bool], f64)) {
        if k == self.hidden.len() {
            leaf(&self.state, weight);
            return;
        }
        let var = self.hidden[k];
        for value in [false, true] {
            self.state[var] = value;
            let mut w = weight;
            for idx in 0..self.ready_at[k].len() {
                w *= self.factor(self.ready_at[k][idx]);
                if w == 0.0 {
                    break;
                }
            }
            if w != 0.0 {
                self.descend(k + 1, w, leaf);
            }
        }
        self.state[var] = false;
    }

    /// Total mass, i.e. the probability of the fixed values.
    pub(crate) fn total(&mut self) -> f64 {
        let mut total = 0.0;
        self.for_each_world(|_, w| total += w);
        total
    }
}
