//! Fixed-width element sets over a ground set of at most [`MAX_ELEMENTS`] elements.

use std::fmt;

/// Largest ground set an [`ElementSet`] can address.
pub const MAX_ELEMENTS: usize = 512;

const WORDS: usize = MAX_ELEMENTS / 64;

/// A set of ground elements stored as a 512-bit bitset.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElementSet {
    words: [u64; WORDS],
}

impl ElementSet {
    pub const fn new() -> Self {
        Self { words: [0; WORDS] }
    }

    pub fn singleton(e: usize) -> Self {
        let mut s = Self::new();
        s.insert(e);
        s
    }

    /// The set `{0, 1, ..., m-1}`.
    pub fn full(m: usize) -> Self {
        assert!(m <= MAX_ELEMENTS, "ground set too large");
        let mut s = Self::new();
        for (i, w) in s.words.iter_mut().enumerate() {
            let lo = i * 64;
            if m >= lo + 64 {
                *w = u64::MAX;
            } else if m > lo {
                *w = (1u64 << (m - lo)) - 1;
            }
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, e: usize) -> bool {
        assert!(e < MAX_ELEMENTS, "element {e} out of bitset range");
        let (w, b) = (e / 64, e % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, e: usize) -> bool {
        if e >= MAX_ELEMENTS {
            return false;
        }
        let (w, b) = (e / 64, e % 64);
        let present = self.words[w] & (1 << b) != 0;
        self.words[w] &= !(1 << b);
        present
    }

    #[inline]
    pub fn contains(&self, e: usize) -> bool {
        e < MAX_ELEMENTS && self.words[e / 64] & (1 << (e % 64)) != 0
    }

    pub fn with(mut self, e: usize) -> Self {
        self.insert(e);
        self
    }

    pub fn without(mut self, e: usize) -> Self {
        self.remove(e);
        self
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a |= b;
        }
        out
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a &= b;
        }
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = *self;
        for (a, b) in out.words.iter_mut().zip(other.words.iter()) {
            *a &= !b;
        }
        out
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & b == 0)
    }

    /// Largest element, if any.
    pub fn max_element(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(i * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    /// Smallest element, if any.
    pub fn min_element(&self) -> Option<usize> {
        self.iter().next()
    }

    /// Elements in ascending order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            set: self,
            word: 0,
            bits: self.words[0],
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

pub struct Iter<'a> {
    set: &'a ElementSet,
    word: usize,
    bits: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.bits != 0 {
                let tz = self.bits.trailing_zeros() as usize;
                self.bits &= self.bits - 1;
                return Some(self.word * 64 + tz);
            }
            self.word += 1;
            if self.word >= WORDS {
                return None;
            }
            self.bits = self.set.words[self.word];
        }
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Self::new();
        for e in iter {
            s.insert(e);
        }
        s
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a: ElementSet = [0, 5, 64, 511].into_iter().collect();
        assert_eq!(a.len(), 4);
        assert_eq!(a.to_vec(), vec![0, 5, 64, 511]);
        assert_eq!(a.max_element(), Some(511));
        assert!(a.contains(64));
        assert!(!a.contains(63));
        let b = ElementSet::full(65);
        assert_eq!(b.len(), 65);
        assert_eq!(a.intersection(&b).to_vec(), vec![0, 5, 64]);
        assert_eq!(a.difference(&b).to_vec(), vec![511]);
        assert!(a.difference(&b).is_disjoint(&b));
        assert!(ElementSet::new().is_subset(&a));
        assert_eq!(ElementSet::full(0), ElementSet::new());
        assert_eq!(ElementSet::full(512).len(), 512);
    }
}
