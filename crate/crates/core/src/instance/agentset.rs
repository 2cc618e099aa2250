use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const MAX_AGENTS: usize = 64;

/// Bit set of agent ids, `0..64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct AgentSet(u64);

impl AgentSet {
    pub const fn empty() -> Self {
        AgentSet(0)
    }

    pub fn all(n: usize) -> Self {
        assert!(n <= MAX_AGENTS);
        if n == MAX_AGENTS {
            AgentSet(u64::MAX)
        } else {
            AgentSet((1u64 << n) - 1)
        }
    }

    pub fn single(i: usize) -> Self {
        AgentSet(1u64 << i)
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < MAX_AGENTS && self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u64 << i);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersects(self, other: AgentSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn intersection(self, other: AgentSet) -> AgentSet {
        AgentSet(self.0 & other.0)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Ids in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl FromIterator<usize> for AgentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = AgentSet::empty();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for AgentSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for AgentSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let ids: Vec<usize> = Vec::deserialize(d)?;
        if let Some(bad) = ids.iter().find(|&&i| i >= MAX_AGENTS) {
            return Err(serde::de::Error::custom(format!("agent id {bad} exceeds {MAX_AGENTS}")));
        }
        Ok(ids.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_ops() {
        let mut s = AgentSet::empty();
        s.insert(3);
        s.insert(0);
        s.insert(63);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 3, 63]);
        assert_eq!(s.len(), 3);
        s.remove(3);
        assert!(!s.contains(3));
        assert_eq!(AgentSet::all(64).len(), 64);
        assert_eq!(AgentSet::all(3), [0, 1, 2].into_iter().collect());
        assert!(!AgentSet::single(2).contains(64));
    }
}
