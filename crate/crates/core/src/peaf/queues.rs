use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use crate::weight::{focal_bound, Weight};

/// Focal ordering: more visited nodes first, then f (larger first unless
/// flipped), then smaller g_sum, then insertion order.
type FocalKey<W> = (Reverse<usize>, W, W, usize);

/// Open list ordered by f plus the focal subset whose f lies within
/// `(1 + eps) * f_min`.
#[derive(Debug)]
pub struct SearchQueues<W: Weight> {
    eps: f64,
    prefer_larger_f: bool,
    open: BTreeSet<(W, usize)>,
    focal: BTreeSet<FocalKey<W>>,
    keys: HashMap<usize, FocalKey<W>>,
    bound: Option<W>,
}

impl<W: Weight> SearchQueues<W> {
    pub fn new(eps: f64, prefer_larger_f: bool) -> Self {
        SearchQueues {
            eps,
            prefer_larger_f,
            open: BTreeSet::new(),
            focal: BTreeSet::new(),
            keys: HashMap::new(),
            bound: None,
        }
    }

    pub fn len(&self) -> usize {
        self.open.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open.is_empty()
    }

    pub fn focal_len(&self) -> usize {
        self.focal.len()
    }

    pub fn f_min(&self) -> Option<W> {
        self.open.first().map(|e| e.0)
    }

    /// Current upper edge of the focal window.
    pub fn bound(&self) -> Option<W> {
        self.bound
    }

    pub fn push(&mut self, idx: usize, f: W, visited: usize, g_sum: W) {
        let fk = if self.prefer_larger_f { W::max_value() - f } else { f };
        let key = (Reverse(visited), fk, g_sum, idx);
        self.keys.insert(idx, key);
        self.open.insert((f, idx));
        if self.bound.is_some_and(|b| f <= b) {
            self.focal.insert(key);
        }
        self.sync();
    }

    /// Removes and returns the best focal label with its f-value.
    pub fn pop(&mut self) -> Option<(usize, W)> {
        let key = self.focal.pop_first()?;
        let idx = key.3;
        self.keys.remove(&idx);
        let f = if self.prefer_larger_f { W::max_value() - key.1 } else { key.1 };
        debug_assert!(self.bound.is_some_and(|b| f <= b), "focal member above the focal bound");
        self.open.remove(&(f, idx));
        self.sync();
        Some((idx, f))
    }

    /// Re-establishes focal = { l in open : f(l) <= bound(f_min) }.
    fn sync(&mut self) {
        let new = self.f_min().map(|m| focal_bound(m, self.eps));
        let old = self.bound;
        self.bound = new;
        match (old, new) {
            (_, None) => self.focal.clear(),
            (None, Some(nb)) => {
                for &(_, idx) in self.open.range(..=(nb, usize::MAX)) {
                    self.focal.insert(self.keys[&idx]);
                }
            }
            (Some(ob), Some(nb)) if nb > ob => {
                let lo = (ob, usize::MAX);
                for &(_, idx) in self.open.range((std::ops::Bound::Excluded(lo), std::ops::Bound::Included((nb, usize::MAX)))) {
                    self.focal.insert(self.keys[&idx]);
                }
            }
            (Some(ob), Some(nb)) if nb < ob => {
                let lo = (nb, usize::MAX);
                for &(_, idx) in self.open.range((std::ops::Bound::Excluded(lo), std::ops::Bound::Included((ob, usize::MAX)))) {
                    self.focal.remove(&self.keys[&idx]);
                }
            }
            _ => {}
        }
    }

    /// Verifies the focal membership invariant; for tests.
    pub fn check_invariant(&self) -> bool {
        let Some(b) = self.bound else {
            return self.focal.is_empty();
        };
        let expected: BTreeSet<usize> = self.open.iter().filter(|e| e.0 <= b).map(|e| e.1).collect();
        let actual: BTreeSet<usize> = self.focal.iter().map(|k| k.3).collect();
        expected == actual && self.bound == self.f_min().map(|m| focal_bound(m, self.eps))
    }
}
