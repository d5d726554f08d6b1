use std::fmt;

use fixedbitset::FixedBitSet;

/// Index of a world inside a model's frame. Stable across restrictions and refinements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldId(pub usize);

impl WorldId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// A set of worlds over a fixed universe of frame indices.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WorldSet {
    bits: FixedBitSet,
}

impl WorldSet {
    pub fn empty(universe: usize) -> Self {
        Self {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        Self { bits }
    }

    pub fn from_ids(universe: usize, ids: impl IntoIterator<Item = WorldId>) -> Self {
        let mut set = Self::empty(universe);
        for id in ids {
            set.insert(id);
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn contains(&self, w: WorldId) -> bool {
        self.bits.contains(w.0)
    }

    #[inline]
    pub fn insert(&mut self, w: WorldId) {
        self.bits.insert(w.0);
    }

    #[inline]
    pub fn remove(&mut self, w: WorldId) {
        self.bits.set(w.0, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = WorldId> + '_ {
        self.bits.ones().map(WorldId)
    }

    pub fn first(&self) -> Option<WorldId> {
        self.bits.minimum().map(WorldId)
    }

    pub fn union(&self, other: &WorldSet) -> WorldSet {
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        out
    }

    pub fn intersection(&self, other: &WorldSet) -> WorldSet {
        let mut out = self.clone();
        out.bits.intersect_with(&other.bits);
        out
    }

    pub fn difference(&self, other: &WorldSet) -> WorldSet {
        let mut out = self.clone();
        out.bits.difference_with(&other.bits);
        out
    }

    pub fn union_with(&mut self, other: &WorldSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &WorldSet) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &WorldSet) {
        self.bits.difference_with(&other.bits);
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &WorldSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.bits.ones()).finish()
    }
}
