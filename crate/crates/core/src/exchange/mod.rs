//! Roots and the exchange moves available at a root: swaps, direct and indirect additions,
//! transitions, exchange injections and cyclic exchanges between two sets.

mod cyclic;
mod injection;

use std::fmt;

use thiserror::Error;

use crate::rainbow::{Collection, ColouredElement, ModelError, Ris, RisViolation, Universe};

pub use cyclic::{arrow, cyclic_exchange, ExchangePair};
pub use injection::{exchange_injection, injection_into, ExchangeInjection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExchangeError {
    #[error("colour {colour} is already present in the root set")]
    ColourPresent { colour: usize },
    #[error("colour {0} is outside 1..=n")]
    ColourOutOfRange(usize),
    #[error("root set is not a member of the collection")]
    SetNotInCollection,
    #[error("{0} is not in any member of the collection")]
    NotInAnySet(ColouredElement),
    #[error("{0} already lies in the root set")]
    InRootSet(ColouredElement),
    #[error("{0} is already used, so it cannot augment")]
    AlreadyUsed(ColouredElement),
    #[error("record for {element} is invalid against the current collection: {reason}")]
    RecordInvalid {
        element: ColouredElement,
        reason: String,
    },
    #[error("oracle-inconsistency: no exchange injection saturates the set for colour {colour}")]
    OracleInconsistency { colour: usize },
    #[error("cyclic exchange precondition: {0}")]
    CyclicPrecondition(String),
    #[error("cyclic exchange produced a non-RIS ({0}); the matroid oracle is inconsistent")]
    CyclicInvalid(RisViolation),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A triple `(𝒮, S, b)`: a collection, the index of one member, and a colour missing from it.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Root {
    collection: Collection,
    set: usize,
    colour: usize,
}

impl Root {
    pub fn new(collection: Collection, set: usize, colour: usize) -> Result<Self, ExchangeError> {
        if set >= collection.len() {
            return Err(ExchangeError::SetNotInCollection);
        }
        if !(1..=collection.n()).contains(&colour) {
            return Err(ExchangeError::ColourOutOfRange(colour));
        }
        if collection.get(set).has_colour(colour) {
            return Err(ExchangeError::ColourPresent { colour });
        }
        Ok(Self {
            collection,
            set,
            colour,
        })
    }

    /// Finds `s` among the members and builds the root.
    pub fn of_set(collection: Collection, s: &Ris, colour: usize) -> Result<Self, ExchangeError> {
        let set = collection
            .position(s)
            .ok_or(ExchangeError::SetNotInCollection)?;
        Self::new(collection, set, colour)
    }

    pub fn collection(&self) -> &Collection {
        &self.collection
    }

    pub fn into_collection(self) -> Collection {
        self.collection
    }

    /// Index of the root set.
    pub fn set_index(&self) -> usize {
        self.set
    }

    pub fn set(&self) -> &Ris {
        self.collection.get(self.set)
    }

    pub fn colour(&self) -> usize {
        self.colour
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "root(S{} {} missing {})", self.set, self.set(), self.colour)
    }
}

/// How an addable element enters the root set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum AddMode {
    /// `S + (x,c)` is an RIS.
    Direct,
    /// `S + (x,c) - removed + witness` is an RIS; `alternatives` counts all valid witnesses.
    Indirect {
        witness: ColouredElement,
        removed: ColouredElement,
        alternatives: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct AddRecord {
    pub element: ColouredElement,
    pub mode: AddMode,
}

impl AddRecord {
    pub fn is_direct(&self) -> bool {
        matches!(self.mode, AddMode::Direct)
    }

    pub fn witness(&self) -> Option<ColouredElement> {
        match self.mode {
            AddMode::Direct => None,
            AddMode::Indirect { witness, .. } => Some(witness),
        }
    }
}

/// A swappable member together with all its witnesses.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Swappable {
    pub element: ColouredElement,
    pub witnesses: Vec<ColouredElement>,
}

/// Members `(x,c)` of `S` for which some `(y,b)` in `UN_b` makes `S - (x,c) + (y,b)` an RIS.
pub fn swap_set(universe: &Universe, root: &Root) -> Vec<Swappable> {
    let s = root.set();
    let b = root.colour();
    let unused = root.collection().unused(universe, b);
    let m = universe.matroid();
    s.iter()
        .filter_map(|e| {
            let rest = s.underline().without(e.x);
            let witnesses: Vec<_> = unused
                .iter()
                .filter(|&y| !rest.contains(y) && m.independent(&rest.with(y)))
                .map(|y| ColouredElement::new(y, b))
                .collect();
            (!witnesses.is_empty()).then_some(Swappable {
                element: e,
                witnesses,
            })
        })
        .collect()
}

/// Witnesses `(y,b)` for an indirect addition of `e`, ascending; empty when `e` is not
/// indirectly addable.
pub fn indirect_witnesses(universe: &Universe, root: &Root, e: ColouredElement) -> Vec<ColouredElement> {
    let s = root.set();
    let b = root.colour();
    let Some(removed) = s.with_colour(e.c) else {
        return Vec::new();
    };
    if s.underline().contains(e.x) || !universe.contains(e) {
        return Vec::new();
    }
    let base = s.underline().without(removed.x).with(e.x);
    let m = universe.matroid();
    root.collection()
        .unused(universe, b)
        .iter()
        .filter(|&y| !base.contains(y) && m.independent(&base.with(y)))
        .map(|y| ColouredElement::new(y, b))
        .collect()
}

fn records(universe: &Universe, root: &Root, every_witness: bool) -> Vec<AddRecord> {
    let s = root.set();
    let m = universe.matroid();
    let mut out = Vec::new();
    let mut direct_ok: Vec<Option<bool>> = vec![None; m.ground_size()];
    for e in universe.elements() {
        if s.underline().contains(e.x) {
            continue;
        }
        if !s.has_colour(e.c) {
            let ok = *direct_ok[e.x].get_or_insert_with(|| m.independent(&s.underline().with(e.x)));
            if ok {
                out.push(AddRecord {
                    element: e,
                    mode: AddMode::Direct,
                });
            }
            continue;
        }
        let witnesses = indirect_witnesses(universe, root, e);
        let Some(removed) = s.with_colour(e.c) else {
            continue;
        };
        let alternatives = witnesses.len();
        let chosen: &[ColouredElement] = if every_witness {
            &witnesses
        } else {
            &witnesses[..alternatives.min(1)]
        };
        for &witness in chosen {
            out.push(AddRecord {
                element: e,
                mode: AddMode::Indirect {
                    witness,
                    removed,
                    alternatives,
                },
            });
        }
    }
    out
}

/// Every addable element, ascending, each with its mode and (for indirect ones) the least witness.
pub fn add_set(universe: &Universe, root: &Root) -> Vec<AddRecord> {
    records(universe, root, false)
}

/// Like [`add_set`] but with one record per valid witness of each indirect element.
pub fn add_records_all_witnesses(universe: &Universe, root: &Root) -> Vec<AddRecord> {
    records(universe, root, true)
}

/// The set `T` that replaces the root set when `rec.element` is added.
pub fn added_set(root: &Root, rec: &AddRecord) -> Ris {
    match rec.mode {
        AddMode::Direct => root.set().edited(&[], &[rec.element]),
        AddMode::Indirect {
            witness, removed, ..
        } => root.set().edited(&[removed], &[rec.element, witness]),
    }
}

/// Re-checks a record against the current root.
pub fn check_record(universe: &Universe, root: &Root, rec: &AddRecord) -> Result<Ris, ExchangeError> {
    let invalid = |reason: String| ExchangeError::RecordInvalid {
        element: rec.element,
        reason,
    };
    let s = root.set();
    if s.contains(rec.element) {
        return Err(ExchangeError::InRootSet(rec.element));
    }
    match rec.mode {
        AddMode::Direct => {
            if s.has_colour(rec.element.c) {
                return Err(invalid("colour already present, addition must be indirect".into()));
            }
        }
        AddMode::Indirect {
            witness, removed, ..
        } => {
            if s.with_colour(rec.element.c) != Some(removed) {
                return Err(invalid(format!("{removed} is not the root set's colour-{} member", rec.element.c)));
            }
            if witness.c != root.colour() {
                return Err(invalid(format!("witness {witness} does not carry the root colour {}", root.colour())));
            }
            if !universe.contains(witness) || root.collection().is_used(witness) {
                return Err(invalid(format!("witness {witness} is not unused")));
            }
        }
    }
    let t = added_set(root, rec);
    universe
        .check_ris(&t)
        .map_err(|v| invalid(format!("result is not an RIS: {v}")))?;
    Ok(t)
}

/// `(𝒮,S,b) -> (𝒮',S₁-(x,c),c)` where `(x,c)` currently lies in the member `S₁`.
pub fn transition(universe: &Universe, root: &Root, rec: &AddRecord) -> Result<Root, ExchangeError> {
    let t = check_record(universe, root, rec)?;
    let coll = root.collection();
    let s1 = coll
        .locate(rec.element)
        .ok_or(ExchangeError::NotInAnySet(rec.element))?;
    if s1 == root.set_index() {
        return Err(ExchangeError::InRootSet(rec.element));
    }
    let shrunk = coll.get(s1).edited(&[rec.element], &[]);
    let next = coll.replaced(&[(root.set_index(), t), (s1, shrunk)]);
    Root::new(next, s1, rec.element.c)
}

/// Adds an unused element to the root set, growing the collection's used set.
pub fn augment(universe: &Universe, root: &Root, rec: &AddRecord) -> Result<Collection, ExchangeError> {
    if root.collection().is_used(rec.element) {
        return Err(ExchangeError::AlreadyUsed(rec.element));
    }
    let t = check_record(universe, root, rec)?;
    Ok(root.collection().replaced(&[(root.set_index(), t)]))
}

/// Replaces the root set by `S - (x,c) + (y,b)` for a swappable `(x,c)` with witness `(y,b)`.
pub fn swap(
    universe: &Universe,
    root: &Root,
    out: ColouredElement,
    witness: ColouredElement,
) -> Result<Root, ExchangeError> {
    let s = root.set();
    let invalid = |reason: &str| ExchangeError::RecordInvalid {
        element: out,
        reason: reason.to_string(),
    };
    if !s.contains(out) {
        return Err(invalid("not a member of the root set"));
    }
    if witness.c != root.colour() || root.collection().is_used(witness) || !universe.contains(witness) {
        return Err(invalid("witness is not an unused element of the root colour"));
    }
    let t = s.edited(&[out], &[witness]);
    universe
        .check_ris(&t)
        .map_err(|v| ExchangeError::RecordInvalid {
            element: out,
            reason: v.to_string(),
        })?;
    let next = root.collection().replaced(&[(root.set_index(), t)]);
    Root::new(next, root.set_index(), out.c)
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

    fn u24() -> Universe {
        Universe::new(
            Matroid::uniform(2, 4).unwrap(),
            vec![set(&[0, 1]), set(&[2, 3])],
        )
        .unwrap()
    }

    fn single_root(u: &Universe) -> Root {
        let coll = Collection::new(u, vec![u.ris([ce(0, 1)]).unwrap()]).unwrap();
        Root::new(coll, 0, 2).unwrap()
    }

    #[test]
    fn make_root_examples() {
        let u = Universe::new(
            Matroid::uniform(2, 2).unwrap(),
            vec![set(&[0, 1]), set(&[0, 1])],
        )
        .unwrap();
        let s = u.ris([ce(0, 1)]).unwrap();
        let coll = Collection::new(&u, vec![s.clone()]).unwrap();
        assert!(Root::of_set(coll.clone(), &s, 2).is_ok());
        assert_eq!(
            Root::of_set(coll.clone(), &s, 1),
            Err(ExchangeError::ColourPresent { colour: 1 })
        );
        let other = u.ris([ce(1, 1)]).unwrap();
        assert_eq!(
            Root::of_set(coll, &other, 2),
            Err(ExchangeError::SetNotInCollection)
        );
    }

    #[test]
    fn swap_set_example() {
        let u = u24();
        let swaps = swap_set(&u, &single_root(&u));
        assert_eq!(
            swaps,
            vec![Swappable {
                element: ce(0, 1),
                witnesses: vec![ce(2, 2), ce(3, 2)]
            }]
        );
    }

    #[test]
    fn add_set_example() {
        let u = u24();
        let adds = add_set(&u, &single_root(&u));
        let got: Vec<_> = adds.iter().map(|r| (r.element, r.mode)).collect();
        assert_eq!(
            got,
            vec![
                (
                    ce(1, 1),
                    AddMode::Indirect {
                        witness: ce(2, 2),
                        removed: ce(0, 1),
                        alternatives: 2
                    }
                ),
                (ce(2, 2), AddMode::Direct),
                (ce(3, 2), AddMode::Direct),
            ]
        );
    }

    #[test]
    fn empty_unused_gives_no_swaps() {
        let u = u24();
        // both colour-2 elements used elsewhere
        let coll = Collection::new(
            &u,
            vec![
                u.ris([ce(0, 1)]).unwrap(),
                u.ris([ce(2, 2)]).unwrap(),
                u.ris([ce(3, 2)]).unwrap(),
            ],
        )
        .unwrap();
        let root = Root::new(coll, 0, 2).unwrap();
        assert!(swap_set(&u, &root).is_empty());
        let empty = Collection::new(&u, vec![Ris::empty()]).unwrap();
        assert!(swap_set(&u, &Root::new(empty, 0, 1).unwrap()).is_empty());
    }

    #[test]
    fn transition_swaps_roles() {
        // n=2: S = {(0,1)}, S1 = {(1,1)}; (1,1) is indirectly addable at (S, colour 2)
        let u = u24();
        let coll = Collection::new(&u, vec![u.ris([ce(0, 1)]).unwrap(), u.ris([ce(1, 1)]).unwrap()]).unwrap();
        let root = Root::new(coll, 0, 2).unwrap();
        let rec = *add_set(&u, &root)
            .iter()
            .find(|r| r.element == ce(1, 1))
            .unwrap();
        let before = root.collection().used_count();
        let next = transition(&u, &root, &rec).unwrap();
        assert_eq!(next.set_index(), 1);
        assert_eq!(next.colour(), 1);
        assert!(next.set().is_empty());
        assert_eq!(next.collection().get(0).elements(), &[ce(1, 1), ce(2, 2)]);
        assert_eq!(next.collection().len(), 2);
        assert_eq!(next.collection().used_count(), before);
        assert!(next.collection().validate(&u).is_ok());
    }

    #[test]
    fn stale_record_is_rejected() {
        let u = u24();
        let root = single_root(&u);
        let rec = AddRecord {
            element: ce(1, 1),
            mode: AddMode::Indirect {
                witness: ce(2, 1),
                removed: ce(0, 1),
                alternatives: 1,
            },
        };
        assert!(matches!(
            check_record(&u, &root, &rec),
            Err(ExchangeError::RecordInvalid { .. })
        ));
        let unused = add_set(&u, &root)[1];
        assert!(matches!(
            transition(&u, &root, &unused),
            Err(ExchangeError::NotInAnySet(_))
        ));
        assert!(augment(&u, &root, &unused).is_ok());
    }
}
