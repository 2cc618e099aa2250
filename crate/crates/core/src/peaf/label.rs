use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::instance::{AgentId, AgentSet, VertexId};
use crate::weight::Weight;

/// A partial joint plan: where every agent currently is, what each has
/// spent, and which target nodes have been visited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Label<W> {
    pub vertex: Vec<VertexId>,
    pub g: Vec<W>,
    pub visited: FixedBitSet,
    /// Agents not yet at their goal vertex.
    pub active: AgentSet,
    pub parent: Option<usize>,
    /// The single move that produced this label from its parent.
    pub moved: Option<(AgentId, VertexId)>,
    pub g_max: W,
    pub g_sum: W,
    pub h: W,
    pub f: W,
}

impl<W: Weight> Label<W> {
    pub fn num_visited(&self) -> usize {
        self.visited.count_ones(..)
    }

    /// f_est = min over active agents of g + h; `None` without active agents.
    pub fn f_est(&self) -> Option<W> {
        self.active.iter().map(|i| self.g[i].guarded_add(self.h)).min()
    }

    /// Refreshes g_max, g_sum and f from g and h.
    pub fn refresh(&mut self) {
        self.g_max = self.g.iter().copied().max().unwrap_or_else(W::zero);
        self.g_sum = self.g.iter().fold(W::zero(), |a, &b| a.guarded_add(b));
        self.f = match self.f_est() {
            Some(est) => self.g_max.max(est),
            None => self.g_max,
        };
    }
}

/// Weak dominance: same joint vertex, element-wise no more cost, and a
/// superset of visited nodes. Equal labels dominate each other.
pub fn dominates<W: Weight>(l1: &Label<W>, l2: &Label<W>) -> bool {
    l1.vertex == l2.vertex && l1.g.iter().zip(&l2.g).all(|(a, b)| a <= b) && l2.visited.is_subset(&l1.visited)
}

/// Mutually non-dominated labels per joint vertex, referenced by arena index.
#[derive(Debug, Default)]
pub struct FrontierSet {
    buckets: HashMap<Vec<VertexId>, Vec<usize>>,
}

impl FrontierSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.buckets.clear();
    }

    pub fn is_dominated<W: Weight>(&self, arena: &[Label<W>], l: &Label<W>) -> bool {
        self.buckets.get(&l.vertex).is_some_and(|b| b.iter().any(|&s| dominates(&arena[s], l)))
    }

    /// Removes every stored label that `arena[idx]` dominates, then stores it.
    pub fn insert_filtered<W: Weight>(&mut self, arena: &[Label<W>], idx: usize) {
        let l = &arena[idx];
        let bucket = self.buckets.entry(l.vertex.clone()).or_default();
        bucket.retain(|&s| !dominates(l, &arena[s]));
        bucket.push(idx);
    }

    pub fn len(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.values().all(Vec::is_empty)
    }

    /// Checks the no-member-dominates-another invariant.
    pub fn is_antichain<W: Weight>(&self, arena: &[Label<W>]) -> bool {
        self.buckets.values().all(|b| {
            b.iter().enumerate().all(|(i, &x)| b.iter().enumerate().all(|(j, &y)| i == j || !dominates(&arena[x], &arena[y])))
        })
    }
}
