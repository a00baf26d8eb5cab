use std::fmt;

/// A subset of a frame's elements, packed into a single machine word.
///
/// Bit `i` corresponds to the frame element with index `i`. The derived `Ord`
/// (ascending bit pattern) is the canonical iteration and serialization order
/// for focal elements.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FocalSet {
    bits: u64,
}

impl FocalSet {
    pub const EMPTY: FocalSet = FocalSet { bits: 0 };

    pub const fn from_bits(bits: u64) -> FocalSet {
        FocalSet { bits }
    }

    pub const fn bits(self) -> u64 {
        self.bits
    }

    /// The one-element set `{index}`.
    pub const fn singleton(index: usize) -> FocalSet {
        debug_assert!(index < 64);
        FocalSet { bits: 1 << index }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> FocalSet {
        let mut bits = 0u64;
        for i in indices {
            debug_assert!(i < 64);
            bits |= 1 << i;
        }
        FocalSet { bits }
    }

    pub const fn cardinality(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub const fn contains(self, index: usize) -> bool {
        index < 64 && self.bits & (1 << index) != 0
    }

    pub const fn with(self, index: usize) -> FocalSet {
        debug_assert!(index < 64);
        FocalSet {
            bits: self.bits | (1 << index),
        }
    }

    pub const fn intersection(self, other: FocalSet) -> FocalSet {
        FocalSet {
            bits: self.bits & other.bits,
        }
    }

    pub const fn union(self, other: FocalSet) -> FocalSet {
        FocalSet {
            bits: self.bits | other.bits,
        }
    }

    /// Elements of `self` not in `other`.
    pub const fn difference(self, other: FocalSet) -> FocalSet {
        FocalSet {
            bits: self.bits & !other.bits,
        }
    }

    pub const fn intersects(self, other: FocalSet) -> bool {
        self.bits & other.bits != 0
    }

    pub const fn is_subset_of(self, other: FocalSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub const fn is_strict_subset_of(self, other: FocalSet) -> bool {
        self.bits != other.bits && self.is_subset_of(other)
    }

    /// Indices of the member elements, ascending.
    pub fn indices(self) -> Indices {
        Indices { bits: self.bits }
    }
}

pub struct Indices {
    bits: u64,
}

impl Iterator for Indices {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let i = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(i)
    }
}

impl fmt::Debug for FocalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
