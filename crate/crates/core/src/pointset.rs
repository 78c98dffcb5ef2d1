//! Fixed-universe bitsets over point indices.

use std::fmt;

use serde::{Serialize, Serializer};
use smallvec::{smallvec, SmallVec};

const WORD: usize = 64;

/// A subset of `{0, …, universe-1}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet {
    universe: usize,
    words: SmallVec<[u64; 2]>,
}

impl PointSet {
    pub fn empty(universe: usize) -> Self {
        PointSet {
            universe,
            words: smallvec![0; universe.div_ceil(WORD).max(1)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut s = PointSet::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    pub fn singleton(universe: usize, i: usize) -> Self {
        let mut s = PointSet::empty(universe);
        s.insert(i);
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, it: I) -> Self {
        let mut s = PointSet::empty(universe);
        for i in it {
            s.insert(i);
        }
        s
    }

    /// Low `universe` bits of `mask`; only valid for universes of at most 64 points.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        assert!(universe <= WORD);
        let mut s = PointSet::empty(universe);
        let keep = if universe == WORD { u64::MAX } else { (1u64 << universe) - 1 };
        s.words[0] = mask & keep;
        s
    }

    /// Inverse of [`PointSet::from_mask`].
    pub fn to_mask(&self) -> u64 {
        assert!(self.universe <= WORD);
        self.words[0]
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe, "point {i} outside universe of {}", self.universe);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        if i < self.universe {
            self.words[i / WORD] &= !(1 << (i % WORD));
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / WORD] & (1 << (i % WORD)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        !self.is_disjoint(other)
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn union_with(&mut self, other: &PointSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        out
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        out
    }

    pub fn complement(&self) -> PointSet {
        PointSet::full(self.universe).difference(self)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&i| self.contains(i))
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for PointSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}
