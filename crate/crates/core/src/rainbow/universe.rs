use std::fmt;

use crate::bitset::ElementSet;
use crate::matroid::Matroid;

use super::{ModelError, Ris, RisViolation};

/// A ground element paired with a colour in `1..=n`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColouredElement {
    pub x: usize,
    pub c: usize,
}

impl ColouredElement {
    pub const fn new(x: usize, c: usize) -> Self {
        Self { x, c }
    }
}

impl fmt::Display for ColouredElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.c)
    }
}

impl fmt::Debug for ColouredElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Max over ground elements of the number of bases containing it.
pub fn overlap_kappa(bases: &[ElementSet]) -> usize {
    let mut counts = std::collections::HashMap::<usize, usize>::new();
    for b in bases {
        for x in b {
            *counts.entry(x).or_default() += 1;
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// The coloured universe of a base sequence: the pairs `(x, c)` with `x` in `B_c`.
///
/// A universe may be *restricted* by withdrawing coloured elements; the colour classes
/// then shrink while the bases themselves are kept for exchange arguments.
#[derive(Clone, Debug)]
pub struct Universe {
    matroid: Matroid,
    bases: Vec<ElementSet>,
    classes: Vec<ElementSet>,
    colours_of: Vec<Vec<usize>>,
}

impl Universe {
    /// Validates that every `B_c` is a base and builds `U`.
    pub fn new(matroid: Matroid, bases: Vec<ElementSet>) -> Result<Self, ModelError> {
        let n = matroid.rank();
        if bases.len() != n {
            return Err(ModelError::BaseCount {
                expected: n,
                found: bases.len(),
            });
        }
        for (i, b) in bases.iter().enumerate() {
            let colour = i + 1;
            matroid
                .check_subset(b)
                .map_err(|source| ModelError::BaseOutOfRange { colour, source })?;
            if b.len() != n || !matroid.independent(b) {
                return Err(ModelError::NotABase { colour });
            }
        }
        let classes = bases.clone();
        let mut u = Self {
            colours_of: Vec::new(),
            matroid,
            bases,
            classes,
        };
        u.index_colours();
        Ok(u)
    }

    fn index_colours(&mut self) {
        let mut colours_of = vec![Vec::new(); self.matroid.ground_size()];
        for (i, class) in self.classes.iter().enumerate() {
            for x in class {
                colours_of[x].push(i + 1);
            }
        }
        self.colours_of = colours_of;
    }

    /// The same universe with the given coloured elements withdrawn.
    pub fn restricted(&self, removed: &[ColouredElement]) -> Self {
        let mut u = self.clone();
        for e in removed {
            if (1..=u.n()).contains(&e.c) {
                u.classes[e.c - 1].remove(e.x);
            }
        }
        u.index_colours();
        u
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    /// Rank of the matroid, which is also the number of colours.
    pub fn n(&self) -> usize {
        self.bases.len()
    }

    pub fn bases(&self) -> &[ElementSet] {
        &self.bases
    }

    /// `B_c`, for `c` in `1..=n`.
    pub fn base(&self, c: usize) -> &ElementSet {
        &self.bases[c - 1]
    }

    /// Elements carrying colour `c` in this universe (equal to `B_c` unless restricted).
    pub fn class(&self, c: usize) -> &ElementSet {
        &self.classes[c - 1]
    }

    pub fn is_restricted(&self) -> bool {
        self.bases != self.classes
    }

    /// Colours of `x`, ascending.
    pub fn colours_of(&self, x: usize) -> &[usize] {
        self.colours_of.get(x).map_or(&[], |v| v.as_slice())
    }

    pub fn contains(&self, e: ColouredElement) -> bool {
        (1..=self.n()).contains(&e.c) && self.classes[e.c - 1].contains(e.x)
    }

    /// All coloured elements in ascending `(x, c)` order.
    pub fn elements(&self) -> impl Iterator<Item = ColouredElement> + '_ {
        self.colours_of
            .iter()
            .enumerate()
            .flat_map(|(x, cs)| cs.iter().map(move |&c| ColouredElement::new(x, c)))
    }

    pub fn size(&self) -> usize {
        self.classes.iter().map(|c| c.len()).sum()
    }

    pub fn kappa(&self) -> usize {
        overlap_kappa(&self.bases)
    }

    /// Checks the three RIS conditions, reporting the first one that fails.
    pub fn validate_ris(&self, candidate: &[ColouredElement]) -> Result<(), RisViolation> {
        let mut under = ElementSet::new();
        let mut colours = ElementSet::new();
        for &e in candidate {
            if !self.contains(e) {
                return Err(RisViolation::NotInUniverse(e));
            }
        }
        for &e in candidate {
            if !under.insert(e.x) {
                return Err(RisViolation::ElementRepeated(e.x));
            }
        }
        for &e in candidate {
            if !colours.insert(e.c) {
                return Err(RisViolation::ColourRepeated(e.c));
            }
        }
        if !self.matroid.independent(&under) {
            return Err(RisViolation::Dependent);
        }
        Ok(())
    }

    /// Builds a validated RIS.
    pub fn ris(&self, elems: impl IntoIterator<Item = ColouredElement>) -> Result<Ris, RisViolation> {
        let elems: Vec<_> = elems.into_iter().collect();
        self.validate_ris(&elems)?;
        Ok(Ris::from_valid(elems))
    }

    pub fn check_ris(&self, s: &Ris) -> Result<(), RisViolation> {
        self.validate_ris(s.elements())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    fn ce(x: usize, c: usize) -> ColouredElement {
        ColouredElement::new(x, c)
    }

    fn u22() -> Universe {
        Universe::new(Matroid::uniform(2, 2).unwrap(), vec![set(&[0, 1]), set(&[0, 1])]).unwrap()
    }

    #[test]
    fn build_examples() {
        let u = u22();
        let all: Vec<_> = u.elements().collect();
        assert_eq!(all, vec![ce(0, 1), ce(0, 2), ce(1, 1), ce(1, 2)]);

        let disjoint = Universe::new(
            Matroid::uniform(2, 4).unwrap(),
            vec![set(&[0, 1]), set(&[2, 3])],
        )
        .unwrap();
        let xs: ElementSet = disjoint.elements().map(|e| e.x).collect();
        assert_eq!(xs.len(), 4);

        let shared = Universe::new(
            Matroid::uniform(2, 3).unwrap(),
            vec![set(&[0, 1]), set(&[0, 2])],
        )
        .unwrap();
        assert_eq!(shared.colours_of(0), &[1, 2]);
    }

    #[test]
    fn non_base_names_colour() {
        let err = Universe::new(
            Matroid::uniform(2, 4).unwrap(),
            vec![set(&[0, 1]), set(&[2])],
        )
        .unwrap_err();
        assert_eq!(err, ModelError::NotABase { colour: 2 });
    }

    #[test]
    fn ris_examples() {
        let u = u22();
        assert!(u.validate_ris(&[ce(0, 1), ce(1, 2)]).is_ok());
        assert_eq!(
            u.validate_ris(&[ce(0, 1), ce(0, 2)]),
            Err(RisViolation::ElementRepeated(0))
        );
        assert_eq!(
            u.validate_ris(&[ce(0, 1), ce(1, 1)]),
            Err(RisViolation::ColourRepeated(1))
        );
        assert_eq!(u.validate_ris(&[ce(2, 1)]), Err(RisViolation::NotInUniverse(ce(2, 1))));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(overlap_kappa(&[set(&[0, 1]), set(&[2, 3])]), 1);
        assert_eq!(overlap_kappa(&[set(&[0, 1]), set(&[0, 2])]), 2);
        assert_eq!(overlap_kappa(&[set(&[0, 1, 2, 3]); 4]), 4);
    }

    #[test]
    fn restriction_shrinks_classes() {
        let u = u22().restricted(&[ce(0, 2)]);
        assert!(u.is_restricted());
        assert!(!u.contains(ce(0, 2)));
        assert_eq!(u.size(), 3);
        assert_eq!(u.base(2), &set(&[0, 1]));
        assert_eq!(u.colours_of(0), &[1]);
    }
}
