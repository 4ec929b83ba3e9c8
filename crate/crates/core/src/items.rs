//! Sets of items.
//!
//! Items are 0-based internally and 1-based in files and display. Sets are
//! ordered as the integers whose bit `j` marks item `j`, which is the order
//! used for every deterministic tie-break.

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

/// A subset of the items `0..m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ItemSet {
    bits: FixedBitSet,
}

impl ItemSet {
    /// The empty set over `m` items.
    pub fn empty(m: usize) -> Self {
        ItemSet { bits: FixedBitSet::with_capacity(m) }
    }

    /// All `m` items.
    pub fn full(m: usize) -> Self {
        let mut s = Self::empty(m);
        s.bits.insert_range(..);
        s
    }

    /// The set with the listed items. Panics on an item `>= m`.
    pub fn from_items<I: IntoIterator<Item = usize>>(m: usize, items: I) -> Self {
        let mut s = Self::empty(m);
        for j in items {
            s.insert(j);
        }
        s
    }

    /// The set whose bit `j` of `mask` marks item `j`.
    pub fn from_mask(m: usize, mask: u64) -> Self {
        let mut s = Self::empty(m);
        let mut rest = mask;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            s.insert(j);
            rest &= rest - 1;
        }
        s
    }

    /// The bitmask of this set when `m <= 64`.
    pub fn to_mask(&self) -> Option<u64> {
        if self.universe() > 64 {
            return None;
        }
        Some(self.iter().fold(0u64, |acc, j| acc | (1u64 << j)))
    }

    /// Number of items in the universe.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn insert(&mut self, j: usize) {
        assert!(j < self.bits.len(), "item {j} outside universe of {}", self.bits.len());
        self.bits.insert(j);
    }

    pub fn remove(&mut self, j: usize) {
        self.bits.set(j, false);
    }

    pub fn contains(&self, j: usize) -> bool {
        self.bits.contains(j)
    }

    /// Number of items in the set.
    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    /// Items in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union(&self, other: &ItemSet) -> ItemSet {
        let mut s = self.clone();
        s.bits.union_with(&other.bits);
        s
    }

    pub fn intersection(&self, other: &ItemSet) -> ItemSet {
        let mut s = self.clone();
        s.bits.intersect_with(&other.bits);
        s
    }

    pub fn difference(&self, other: &ItemSet) -> ItemSet {
        let mut s = self.clone();
        s.bits.difference_with(&other.bits);
        s
    }

    pub fn complement(&self) -> ItemSet {
        ItemSet::full(self.universe()).difference(self)
    }

    pub fn is_subset(&self, other: &ItemSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &ItemSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    /// Items as 1-based indices, for display and files.
    pub fn to_one_based(&self) -> Vec<usize> {
        self.iter().map(|j| j + 1).collect()
    }

    /// Builds a set from 1-based indices, rejecting out-of-range entries.
    pub fn from_one_based(m: usize, items: &[usize]) -> Result<Self, usize> {
        let mut s = Self::empty(m);
        for &j in items {
            if j == 0 || j > m {
                return Err(j);
            }
            s.insert(j - 1);
        }
        Ok(s)
    }
}

impl Ord for ItemSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let a = self.bits.as_slice();
        let b = other.bits.as_slice();
        let n = a.len().max(b.len());
        for w in (0..n).rev() {
            let x = a.get(w).copied().unwrap_or(0);
            let y = b.get(w).copied().unwrap_or(0);
            match x.cmp(&y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.universe().cmp(&other.universe())
    }
}

impl PartialOrd for ItemSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, j) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        write!(f, "}}")
    }
}

/// Serialized form of an item set: its 1-based items in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemList(pub Vec<usize>);

impl From<&ItemSet> for ItemList {
    fn from(s: &ItemSet) -> Self {
        ItemList(s.to_one_based())
    }
}
