//! Cascadable elements: breadth-first search over transition chains.

use std::collections::{BTreeMap, HashSet};

use crate::exchange::{add_records_all_witnesses, augment, transition, AddRecord, Root};
use crate::rainbow::{Collection, ColouredElement, Universe};

use super::good::{good_transform, GoodPath};
use super::CascadeError;

/// One transition of a cascade.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CascadeStep {
    /// Recolouring applied to the current root before the transition (good cascades only).
    pub transform: Option<GoodPath>,
    /// Chain set the element is taken from.
    pub from: usize,
    pub record: AddRecord,
}

/// A witnessed cascadable element.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CascadeTrace {
    pub good: bool,
    pub initial: Root,
    /// `S_0, ..., S_{ℓ-1}` as member indices.
    pub chain: Vec<usize>,
    /// `ℓ - 1` transitions.
    pub steps: Vec<CascadeStep>,
    pub final_transform: Option<GoodPath>,
    /// The root at which the target is addable.
    pub final_root: Root,
    pub target: AddRecord,
    /// Member of the initial collection that holds the target, if any.
    pub origin: Option<usize>,
    /// `μ` on member indices: member `i` of the initial collection corresponds to member
    /// `mu[i]` of the final one. Moves keep positions, so this is the identity.
    pub mu: Vec<usize>,
}

impl CascadeTrace {
    pub fn element(&self) -> ColouredElement {
        self.target.element
    }

    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SearchLimits {
    /// Longest chain explored; chains longer than this give nothing.
    pub depth: usize,
    /// Cap on distinct roots kept per level.
    pub max_states: usize,
}

impl SearchLimits {
    pub fn depth(depth: usize) -> Self {
        Self {
            depth,
            max_states: 100_000,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SearchOutcome {
    pub found: BTreeMap<ColouredElement, CascadeTrace>,
    /// Distinct roots visited.
    pub states: usize,
    /// Branches dropped because a good transform failed.
    pub failed_transforms: usize,
    /// Whether `max_states` cut a level short.
    pub truncated: bool,
}

#[derive(Clone, Debug)]
pub(crate) struct State {
    pub root: Root,
    pub steps: Vec<CascadeStep>,
}

fn prepare(universe: &Universe, root: &Root, good: bool) -> Result<(Root, Option<GoodPath>), CascadeError> {
    if good {
        let (r, p) = good_transform(universe, root)?;
        Ok((r, Some(p)))
    } else {
        Ok((root.clone(), None))
    }
}

pub(crate) fn check_chain(root: &Root, chain: &[usize]) -> Result<(), CascadeError> {
    let len = root.collection().len();
    if chain.first() != Some(&root.set_index()) {
        return Err(CascadeError::InvalidChain("chain must start at the root set".into()));
    }
    for (i, &s) in chain.iter().enumerate() {
        if s >= len {
            return Err(CascadeError::InvalidChain(format!("set {s} is not a member")));
        }
        if chain[..i].contains(&s) {
            return Err(CascadeError::InvalidChain(format!("set {s} repeats")));
        }
    }
    Ok(())
}

/// All transitions from `states` that take an element of member `next`.
pub(crate) fn advance(
    universe: &Universe,
    states: &[State],
    next: usize,
    good: bool,
    max_states: usize,
    outcome: &mut SearchOutcome,
) -> Result<Vec<State>, CascadeError> {
    let mut seen: HashSet<Root> = HashSet::new();
    let mut out = Vec::new();
    for st in states {
        let (root, transform) = match prepare(universe, &st.root, good) {
            Ok(p) => p,
            Err(CascadeError::LevelBoundViolated { .. }) => {
                outcome.failed_transforms += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let pool = root.collection().get(next).clone();
        for rec in add_records_all_witnesses(universe, &root) {
            if !pool.contains(rec.element) {
                continue;
            }
            let moved = transition(universe, &root, &rec)?;
            if !seen.insert(moved.clone()) {
                continue;
            }
            if out.len() >= max_states {
                outcome.truncated = true;
                return Ok(out);
            }
            let mut steps = st.steps.clone();
            steps.push(CascadeStep {
                transform: transform.clone(),
                from: next,
                record: rec,
            });
            out.push(State { root: moved, steps });
        }
    }
    outcome.states += out.len();
    Ok(out)
}

/// Final additions from `states`, one trace per element (the first found).
pub(crate) fn finish(
    universe: &Universe,
    initial: &Root,
    chain: &[usize],
    states: &[State],
    good: bool,
    outcome: &mut SearchOutcome,
) -> Result<(), CascadeError> {
    let coll = initial.collection();
    let in_chain = |e: ColouredElement| chain.iter().any(|&s| coll.get(s).contains(e));
    for st in states {
        let (root, transform) = match prepare(universe, &st.root, good) {
            Ok(p) => p,
            Err(CascadeError::LevelBoundViolated { .. }) => {
                outcome.failed_transforms += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        for rec in add_records_all_witnesses(universe, &root) {
            if in_chain(rec.element) || outcome.found.contains_key(&rec.element) {
                continue;
            }
            let trace = CascadeTrace {
                good,
                initial: initial.clone(),
                chain: chain.to_vec(),
                steps: st.steps.clone(),
                final_transform: transform.clone(),
                final_root: root.clone(),
                target: rec,
                origin: coll.locate(rec.element),
                mu: (0..coll.len()).collect(),
            };
            outcome.found.insert(rec.element, trace);
        }
    }
    Ok(())
}

/// `CASC` (or `CASC^good`) for the chain, with search statistics.
pub fn cascade_search_with(
    universe: &Universe,
    root: &Root,
    chain: &[usize],
    limits: SearchLimits,
    good: bool,
) -> Result<SearchOutcome, CascadeError> {
    check_chain(root, chain)?;
    let mut outcome = SearchOutcome::default();
    if limits.depth == 0 || chain.len() > limits.depth {
        return Ok(outcome);
    }
    let mut states = vec![State {
        root: root.clone(),
        steps: Vec::new(),
    }];
    outcome.states = 1;
    for &next in &chain[1..] {
        states = advance(universe, &states, next, good, limits.max_states, &mut outcome)?;
        if states.is_empty() {
            return Ok(outcome);
        }
    }
    finish(universe, root, chain, &states, good, &mut outcome)?;
    Ok(outcome)
}

/// Every element cascadable from `root` along `chain`, each with one witnessing trace.
pub fn cascade_search(
    universe: &Universe,
    root: &Root,
    chain: &[usize],
    depth: usize,
) -> Result<BTreeMap<ColouredElement, CascadeTrace>, CascadeError> {
    cascade_search_with(universe, root, chain, SearchLimits::depth(depth), false).map(|o| o.found)
}

/// As [`cascade_search`], with a good transform before every step and before the final addition.
pub fn good_cascade_search(
    universe: &Universe,
    root: &Root,
    chain: &[usize],
    depth: usize,
) -> Result<BTreeMap<ColouredElement, CascadeTrace>, CascadeError> {
    cascade_search_with(universe, root, chain, SearchLimits::depth(depth), true).map(|o| o.found)
}

/// Replays a trace, re-validating every intermediate collection, and returns the collection at
/// the final root together with `μ`.
pub fn apply_cascade(universe: &Universe, trace: &CascadeTrace) -> Result<(Collection, Vec<usize>), CascadeError> {
    let corrupt = |step: usize, reason: String| CascadeError::CorruptedTrace { step, reason };
    check_chain(&trace.initial, &trace.chain).map_err(|e| corrupt(0, e.to_string()))?;
    if trace.steps.len() + 1 != trace.chain.len() {
        return Err(corrupt(0, "step count does not match the chain".into()));
    }
    let replay_transform = |i: usize, root: &Root, expected: &Option<GoodPath>| -> Result<Root, CascadeError> {
        match (trace.good, expected) {
            (false, None) => Ok(root.clone()),
            (true, Some(path)) => {
                let (r, p) = good_transform(universe, root).map_err(|e| corrupt(i, e.to_string()))?;
                if &p != path {
                    return Err(corrupt(i, "recorded good transform differs from the recomputed one".into()));
                }
                Ok(r)
            }
            _ => Err(corrupt(i, "transform presence does not match the cascade kind".into())),
        }
    };
    let mut root = trace.initial.clone();
    root.collection()
        .validate(universe)
        .map_err(|e| corrupt(0, e.to_string()))?;
    for (i, step) in trace.steps.iter().enumerate() {
        root = replay_transform(i, &root, &step.transform)?;
        if step.from != trace.chain[i + 1] {
            return Err(corrupt(i, format!("step takes from set {}, chain says {}", step.from, trace.chain[i + 1])));
        }
        if !root.collection().get(step.from).contains(step.record.element) {
            return Err(corrupt(i, format!("{} is not in set {}", step.record.element, step.from)));
        }
        root = transition(universe, &root, &step.record).map_err(|e| corrupt(i, e.to_string()))?;
        root.collection()
            .validate(universe)
            .map_err(|e| corrupt(i, e.to_string()))?;
    }
    let last = trace.steps.len();
    root = replay_transform(last, &root, &trace.final_transform)?;
    if root != trace.final_root {
        return Err(corrupt(last, "replay does not reproduce the final root".into()));
    }
    if trace.mu != (0..trace.initial.collection().len()).collect::<Vec<_>>() {
        return Err(corrupt(last, "μ is not the identity on member indices".into()));
    }
    Ok((root.into_collection(), trace.mu.clone()))
}

/// The result of adding the target at the final root.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Landing {
    /// The target was in a member, so this is the associated root.
    Transition(Root),
    /// The target was unused and the final root set grew.
    Augmented(Collection),
}

impl Landing {
    pub fn collection(&self) -> &Collection {
        match self {
            Landing::Transition(r) => r.collection(),
            Landing::Augmented(c) => c,
        }
    }
}

/// Replays the trace and then performs the final addition.
pub fn realise(universe: &Universe, trace: &CascadeTrace) -> Result<Landing, CascadeError> {
    apply_cascade(universe, trace)?;
    let root = &trace.final_root;
    if root.collection().locate(trace.target.element).is_some() {
        Ok(Landing::Transition(transition(universe, root, &trace.target)?))
    } else {
        Ok(Landing::Augmented(augment(universe, root, &trace.target)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::ElementSet;
    use crate::exchange::add_set;
    use crate::matroid::Matroid;
    use crate::rainbow::Ris;

    fn ce(x: usize, c: usize) -> ColouredElement {
        ColouredElement::new(x, c)
    }

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    /// U(2,4) with B1 = {0,1}, B2 = {2,3}; S0 = {(0,1)}, S1 = {(1,1),(2,2)}.
    fn two_sets() -> (Universe, Root) {
        let u = Universe::new(Matroid::uniform(2, 4).unwrap(), vec![set(&[0, 1]), set(&[2, 3])]).unwrap();
        let coll = Collection::new(
            &u,
            vec![u.ris([ce(0, 1)]).unwrap(), u.ris([ce(1, 1), ce(2, 2)]).unwrap()],
        )
        .unwrap();
        (u, Root::new(coll, 0, 2).unwrap())
    }

    #[test]
    fn single_set_chain_is_add_set() {
        let (u, root) = two_sets();
        let found = cascade_search(&u, &root, &[0], 3).unwrap();
        let adds: Vec<_> = add_set(&u, &root).iter().map(|r| r.element).collect();
        assert_eq!(found.keys().copied().collect::<Vec<_>>(), adds);
        for (e, t) in &found {
            assert_eq!(add_set(&u, &root).iter().find(|r| r.element == *e), Some(&t.target));
        }
    }

    #[test]
    fn depth_zero_or_short_is_empty() {
        let (u, root) = two_sets();
        assert!(cascade_search(&u, &root, &[0], 0).unwrap().is_empty());
        assert!(cascade_search(&u, &root, &[0, 1], 1).unwrap().is_empty());
    }

    #[test]
    fn two_step_chain_replays() {
        let (u, root) = two_sets();
        let found = cascade_search(&u, &root, &[0, 1], 2).unwrap();
        assert!(!found.is_empty());
        for t in found.values() {
            assert!(!root.collection().get(0).contains(t.element()));
            assert!(!root.collection().get(1).contains(t.element()));
            let (coll, mu) = apply_cascade(&u, t).unwrap();
            assert_eq!(&coll, t.final_root.collection());
            assert_eq!(mu, vec![0, 1]);
            assert_eq!(coll.len(), 2);
            assert_eq!(apply_cascade(&u, t).unwrap().0, coll);
            let landed = realise(&u, t).unwrap();
            assert!(landed.collection().validate(&u).is_ok());
        }
    }

    #[test]
    fn bad_chains_are_rejected() {
        let (u, root) = two_sets();
        assert!(matches!(cascade_search(&u, &root, &[1], 2), Err(CascadeError::InvalidChain(_))));
        assert!(matches!(cascade_search(&u, &root, &[0, 0], 2), Err(CascadeError::InvalidChain(_))));
        assert!(matches!(cascade_search(&u, &root, &[0, 5], 2), Err(CascadeError::InvalidChain(_))));
    }

    #[test]
    fn tampered_trace_is_detected() {
        let (u, root) = two_sets();
        let found = cascade_search(&u, &root, &[0, 1], 2).unwrap();
        let mut t = found.values().next().unwrap().clone();
        t.final_root = Root::new(Collection::empty(2, 2), 0, 1).unwrap();
        assert!(matches!(apply_cascade(&u, &t), Err(CascadeError::CorruptedTrace { .. })));
        let mut t = found.values().next().unwrap().clone();
        t.steps[0].from = 0;
        assert!(matches!(apply_cascade(&u, &t), Err(CascadeError::CorruptedTrace { .. })));
    }

    #[test]
    fn good_search_on_good_roots_matches_plain() {
        // disjoint bases: every root with an unused colour-b element is good
        let u = Universe::new(
            Matroid::uniform(2, 4).unwrap(),
            vec![set(&[0, 1]), set(&[2, 3])],
        )
        .unwrap();
        let coll = Collection::new(&u, vec![u.ris([ce(0, 1)]).unwrap(), Ris::empty()]).unwrap();
        let root = Root::new(coll, 0, 2).unwrap();
        let plain = cascade_search(&u, &root, &[0, 1], 2).unwrap();
        let good = good_cascade_search(&u, &root, &[0, 1], 2).unwrap();
        assert_eq!(plain.keys().collect::<Vec<_>>(), good.keys().collect::<Vec<_>>());
    }
}
