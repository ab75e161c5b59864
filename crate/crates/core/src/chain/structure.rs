//! Communicating classes of the positive-transition digraph.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::scalar::Scalar;

use super::finite::FiniteChain;

/// One strongly connected component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommClass {
    /// Member states, ascending.
    pub states: Vec<usize>,
    /// Closed class: no positive edge leaves it.
    pub recurrent: bool,
    /// gcd of cycle lengths; `None` when the class carries no cycle.
    pub period: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStructure {
    /// Classes ordered by their smallest member.
    pub classes: Vec<CommClass>,
    /// `class_of[x]` indexes into `classes`.
    pub class_of: Vec<usize>,
}

impl ChainStructure {
    pub fn recurrent_classes(&self) -> impl Iterator<Item = &CommClass> {
        self.classes.iter().filter(|c| c.recurrent)
    }

    pub fn is_irreducible(&self) -> bool {
        self.classes.len() == 1
    }

    pub fn is_transient(&self, x: usize) -> bool {
        !self.classes[self.class_of[x]].recurrent
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// SCC decomposition, recurrence flags and periods.
pub fn structure<S: Scalar>(chain: &FiniteChain<S>) -> ChainStructure {
    let n = chain.len();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n);
    let nodes: Vec<NodeIndex> = (0..n).map(|_| graph.add_node(())).collect();
    for x in 0..n {
        for (y, _) in chain.row(x) {
            graph.add_edge(nodes[x], nodes[*y], ());
        }
    }
    let mut components: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut s: Vec<usize> = c.into_iter().map(|v| v.index()).collect();
            s.sort_unstable();
            s
        })
        .collect();
    components.sort_by_key(|c| c[0]);

    let mut class_of = vec![0; n];
    for (k, c) in components.iter().enumerate() {
        for &x in c {
            class_of[x] = k;
        }
    }
    let classes = components
        .into_iter()
        .enumerate()
        .map(|(k, states)| {
            let recurrent = states
                .iter()
                .all(|&x| chain.row(x).iter().all(|(y, _)| class_of[*y] == k));
            let period = class_period(chain, &states, &class_of, k);
            CommClass { states, recurrent, period }
        })
        .collect();
    ChainStructure { classes, class_of }
}

fn class_period<S: Scalar>(
    chain: &FiniteChain<S>,
    states: &[usize],
    class_of: &[usize],
    k: usize,
) -> Option<usize> {
    let mut level = vec![usize::MAX; chain.len()];
    let root = states[0];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    let mut g = 0usize;
    let mut has_cycle = false;
    while let Some(u) = queue.pop_front() {
        for (v, _) in chain.row(u) {
            if class_of[*v] != k {
                continue;
            }
            has_cycle = true;
            if level[*v] == usize::MAX {
                level[*v] = level[u] + 1;
                queue.push_back(*v);
            } else {
                g = gcd(g, (level[u] + 1).abs_diff(level[*v]));
            }
        }
    }
    // Any edge back into the root has a positive level gap, so g > 0 here.
    has_cycle.then_some(g.max(1))
}
