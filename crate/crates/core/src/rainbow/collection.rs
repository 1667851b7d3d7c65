use crate::bitset::ElementSet;

use super::{ColouredElement, ModelError, Ris, Signature, Universe};

/// A list of pairwise disjoint RIS's (disjoint as sets of coloured elements).
///
/// Collections are values: every move builds a new one, and a set keeps its index across
/// moves, so "the same set before and after" is simply "the same index".
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Collection {
    n: usize,
    sets: Vec<Ris>,
    used: Vec<ElementSet>,
    signature: Signature,
}

impl Collection {
    /// Validates every member and pairwise disjointness.
    pub fn new(universe: &Universe, sets: Vec<Ris>) -> Result<Self, ModelError> {
        for (i, s) in sets.iter().enumerate() {
            universe
                .check_ris(s)
                .map_err(|violation| ModelError::InvalidMember { index: i, violation })?;
        }
        Self::assemble(universe.n(), sets)
    }

    fn assemble(n: usize, sets: Vec<Ris>) -> Result<Self, ModelError> {
        let mut used = vec![ElementSet::new(); n];
        for (i, s) in sets.iter().enumerate() {
            if s.len() > n {
                return Err(ModelError::Oversized { index: i });
            }
            for e in s.iter() {
                if !(1..=n).contains(&e.c) {
                    return Err(ModelError::ColourOutOfRange(e.c));
                }
                if !used[e.c - 1].insert(e.x) {
                    return Err(ModelError::NotDisjoint { element: e, index: i });
                }
            }
        }
        let signature = Signature::from_sizes(n, sets.iter().map(Ris::len));
        Ok(Self {
            n,
            sets,
            used,
            signature,
        })
    }

    /// `slots` empty sets.
    pub fn empty(n: usize, slots: usize) -> Self {
        Self {
            n,
            sets: vec![Ris::empty(); slots],
            used: vec![ElementSet::new(); n],
            signature: Signature::zeros(n),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[Ris] {
        &self.sets
    }

    pub fn get(&self, i: usize) -> &Ris {
        &self.sets[i]
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Number of rainbow bases.
    pub fn full_count(&self) -> usize {
        self.signature.full()
    }

    /// Elements used with colour `c`.
    pub fn used(&self, c: usize) -> &ElementSet {
        &self.used[c - 1]
    }

    pub fn is_used(&self, e: ColouredElement) -> bool {
        (1..=self.n).contains(&e.c) && self.used[e.c - 1].contains(e.x)
    }

    /// Elements `x` with `(x, b)` in `UN_b`.
    pub fn unused(&self, universe: &Universe, b: usize) -> ElementSet {
        universe.class(b).difference(&self.used[b - 1])
    }

    /// `UN_b` as coloured elements, ascending.
    pub fn unused_elements(&self, universe: &Universe, b: usize) -> Vec<ColouredElement> {
        self.unused(universe, b)
            .iter()
            .map(|x| ColouredElement::new(x, b))
            .collect()
    }

    /// Index of the member containing `e`.
    pub fn locate(&self, e: ColouredElement) -> Option<usize> {
        if !self.is_used(e) {
            return None;
        }
        self.sets.iter().position(|s| s.contains(e))
    }

    /// Index of a member equal to `s`.
    pub fn position(&self, s: &Ris) -> Option<usize> {
        self.sets.iter().position(|t| t == s)
    }

    /// Largest size of a member that is not a rainbow basis (empty members count as size 0).
    pub fn istar(&self) -> Result<usize, ModelError> {
        self.sets
            .iter()
            .map(Ris::len)
            .filter(|&l| l < self.n)
            .max()
            .ok_or(ModelError::AllRb)
    }

    /// Largest member size below `i*`, if any.
    pub fn istarstar(&self) -> Result<Option<usize>, ModelError> {
        let istar = self.istar()?;
        Ok(self.sets.iter().map(Ris::len).filter(|&l| l < istar).max())
    }

    /// The collection with the listed members replaced.
    pub(crate) fn replaced(&self, updates: &[(usize, Ris)]) -> Self {
        let mut out = self.clone();
        for (i, s) in updates {
            let old = std::mem::replace(&mut out.sets[*i], s.clone());
            for e in old.iter() {
                out.used[e.c - 1].remove(e.x);
            }
            out.signature.bump(old.len(), false);
        }
        for (i, _) in updates {
            let s = &out.sets[*i];
            for e in s.iter() {
                let fresh = out.used[e.c - 1].insert(e.x);
                debug_assert!(fresh, "{e} used twice after replacing member {i}");
            }
            out.signature.bump(s.len(), true);
        }
        debug_assert!(out.check_disjoint().is_ok());
        debug_assert_eq!(
            out.signature,
            Signature::from_sizes(out.n, out.sets.iter().map(Ris::len))
        );
        out
    }

    /// The collection with one more member.
    pub fn pushed(&self, universe: &Universe, s: Ris) -> Result<Self, ModelError> {
        let mut sets = self.sets.clone();
        sets.push(s);
        Self::new(universe, sets)
    }

    fn check_disjoint(&self) -> Result<(), ModelError> {
        Self::assemble(self.n, self.sets.clone()).map(|_| ())
    }

    /// Full validation: every member an RIS of `universe`, members pairwise disjoint, caches exact.
    pub fn validate(&self, universe: &Universe) -> Result<(), ModelError> {
        let fresh = Self::new(universe, self.sets.clone())?;
        if fresh.used != self.used || fresh.signature != self.signature {
            return Err(ModelError::StaleCache);
        }
        Ok(())
    }

    /// Total number of used coloured elements.
    pub fn used_count(&self) -> usize {
        self.used.iter().map(ElementSet::len).sum()
    }
}
