//! Coloured universes, rainbow independent sets, collections and their signatures.

mod collection;
mod params;
mod ris;
mod signature;
mod universe;

use thiserror::Error;

use crate::matroid::MatroidError;

pub use collection::Collection;
pub use params::BoundParams;
pub use ris::Ris;
pub use signature::{
    is_eta_maximal, is_eta_submaximal, lex_compare, submaximal_signatures, Classification,
    EtaReference, Provenance, Signature, Standing,
};
pub use universe::{overlap_kappa, ColouredElement, Universe};

/// Why a candidate set fails to be a rainbow independent set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum RisViolation {
    #[error("{0} is not a coloured element of the universe")]
    NotInUniverse(ColouredElement),
    #[error("element {0} appears twice (element projection not injective)")]
    ElementRepeated(usize),
    #[error("colour {0} appears twice (colour projection not injective)")]
    ColourRepeated(usize),
    #[error("underlying element set is dependent")]
    Dependent,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("expected {expected} bases (one per colour), found {found}")]
    BaseCount { expected: usize, found: usize },
    #[error("base of colour {colour} is not a base of the matroid")]
    NotABase { colour: usize },
    #[error("base of colour {colour}: {source}")]
    BaseOutOfRange {
        colour: usize,
        source: MatroidError,
    },
    #[error("colour {0} is outside 1..=n")]
    ColourOutOfRange(usize),
    #[error("member {index} is not an RIS: {violation}")]
    InvalidMember { index: usize, violation: RisViolation },
    #[error("member {index} has more than n elements")]
    Oversized { index: usize },
    #[error("{element} is used twice (again by member {index})")]
    NotDisjoint {
        element: ColouredElement,
        index: usize,
    },
    #[error("cached used-set or signature does not match the members")]
    StaleCache,
    #[error("all-RB collection: i* is undefined")]
    AllRb,
    #[error("signature lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("eta = n - alpha must be at least 1 (n = {n}, alpha = {alpha})")]
    EtaOutOfRange { n: usize, alpha: usize },
    #[error("submaximality undefined: {0}")]
    SubmaximalUndefined(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::ElementSet;
    use crate::matroid::Matroid;

    fn ce(x: usize, c: usize) -> ColouredElement {
        ColouredElement::new(x, c)
    }

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    fn u5() -> Universe {
        // U(5,25), disjoint blocks
        let bases = (0..5).map(|c| (5 * c..5 * c + 5).collect()).collect();
        Universe::new(Matroid::uniform(5, 25).unwrap(), bases).unwrap()
    }

    fn ris_of_size(u: &Universe, size: usize, offset: usize) -> Ris {
        u.ris((0..size).map(|c| ce(5 * c + offset, c + 1))).unwrap()
    }

    #[test]
    fn unused_examples() {
        let u = Universe::new(
            Matroid::uniform(2, 4).unwrap(),
            vec![set(&[0, 1]), set(&[2, 3])],
        )
        .unwrap();
        let coll = Collection::new(&u, vec![u.ris([ce(0, 1)]).unwrap()]).unwrap();
        assert_eq!(coll.unused_elements(&u, 1), vec![ce(1, 1)]);
        let empty = Collection::new(&u, vec![]).unwrap();
        assert_eq!(empty.unused_elements(&u, 2), vec![ce(2, 2), ce(3, 2)]);
        let full = Collection::new(&u, vec![u.ris([ce(0, 1), ce(2, 2)]).unwrap(), u.ris([ce(1, 1), ce(3, 2)]).unwrap()]).unwrap();
        assert!(full.unused_elements(&u, 1).is_empty());
    }

    #[test]
    fn istar_examples() {
        let u = u5();
        let sizes = |v: &[usize]| {
            let sets = v
                .iter()
                .enumerate()
                .map(|(i, &s)| ris_of_size(&u, s, i))
                .collect();
            Collection::new(&u, sets).unwrap()
        };
        let c = sizes(&[5, 5, 3, 2]);
        assert_eq!(c.istar(), Ok(3));
        assert_eq!(c.istarstar(), Ok(Some(2)));
        let c = sizes(&[5, 3]);
        assert_eq!(c.istar(), Ok(3));
        assert_eq!(c.istarstar(), Ok(None));
        assert_eq!(sizes(&[4, 4]).istar(), Ok(4));
        assert_eq!(sizes(&[5, 5]).istar(), Err(ModelError::AllRb));
    }

    #[test]
    fn disjointness_is_on_coloured_pairs() {
        let u = Universe::new(
            Matroid::uniform(2, 3).unwrap(),
            vec![set(&[0, 1]), set(&[0, 2])],
        )
        .unwrap();
        // element 0 shared, different colours: allowed
        let ok = Collection::new(&u, vec![u.ris([ce(0, 1)]).unwrap(), u.ris([ce(0, 2)]).unwrap()]);
        assert!(ok.is_ok());
        let bad = Collection::new(&u, vec![u.ris([ce(0, 1)]).unwrap(), u.ris([ce(0, 1)]).unwrap()]);
        assert!(matches!(bad, Err(ModelError::NotDisjoint { index: 1, .. })));
    }

    #[test]
    fn replaced_keeps_caches() {
        let u = u5();
        let coll = Collection::new(&u, vec![ris_of_size(&u, 3, 0), Ris::empty()]).unwrap();
        let moved = coll.replaced(&[(0, ris_of_size(&u, 2, 0)), (1, u.ris([ce(12, 3)]).unwrap())]);
        assert_eq!(moved.signature(), &Signature::new(vec![1, 1, 0, 0, 0]));
        assert!(moved.validate(&u).is_ok());
        assert_eq!(moved.used_count(), 3);
    }
}
