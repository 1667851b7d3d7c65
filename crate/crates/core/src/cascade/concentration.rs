//! How many addable (or cascadable) elements pile up in a single other member.

use std::collections::BTreeMap;

use crate::exchange::{add_set, Root};
use crate::rainbow::{Collection, ColouredElement, Universe};

use super::good::is_good;
use super::search::{advance, finish, CascadeTrace, SearchOutcome, State};
use super::CascadeError;

/// `r(𝒮)` (or `r^good(𝒮)`) with the root and member attaining it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Concentration {
    pub value: usize,
    pub root: Option<Root>,
    pub set: Option<usize>,
}

/// Roots `(𝒮, S_0, b)` with `|S_0| = i*(𝒮)`, by member index then colour.
fn istar_roots(coll: &Collection) -> Result<Vec<Root>, CascadeError> {
    let istar = coll.istar()?;
    let mut roots = Vec::new();
    for (i, s) in coll.sets().iter().enumerate() {
        if s.len() != istar {
            continue;
        }
        for b in s.missing_colours(coll.n()) {
            roots.push(Root::new(coll.clone(), i, b)?);
        }
    }
    Ok(roots)
}

/// The maximum over roots with `|S_0| = i*` of `max_{S' ≠ S_0} |ADD(𝒮,S_0,b) ∩ S'|`.
/// With `good` set only good roots count. Ties keep the first root and member found; with no
/// qualifying root or no other member the value is 0.
pub fn addable_concentration(universe: &Universe, coll: &Collection, good: bool) -> Result<Concentration, CascadeError> {
    let mut best = Concentration {
        value: 0,
        root: None,
        set: None,
    };
    for root in istar_roots(coll)? {
        if good && !is_good(universe, &root) {
            continue;
        }
        let mut counts = vec![0usize; coll.len()];
        for rec in add_set(universe, &root) {
            if let Some(j) = coll.locate(rec.element) {
                counts[j] += 1;
            }
        }
        counts[root.set_index()] = 0;
        for (j, &c) in counts.iter().enumerate() {
            if j != root.set_index() && (best.root.is_none() || c > best.value) {
                best = Concentration {
                    value: c,
                    root: Some(root.clone()),
                    set: Some(j),
                };
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ProbeLimits {
    /// Cap on distinct roots visited over the whole probe.
    pub max_states: usize,
}

impl Default for ProbeLimits {
    fn default() -> Self {
        Self { max_states: 200_000 }
    }
}

/// A chain `S_0, ..., S_{ℓ-1}` and a member `S_ℓ` holding at least `k` cascadable elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Probe {
    pub root: Root,
    pub chain: Vec<usize>,
    pub landing: usize,
    pub elements: Vec<ColouredElement>,
    pub traces: Vec<CascadeTrace>,
}

/// Groups the cascadable elements of a finished chain by the member holding them.
pub(crate) fn by_member(found: &BTreeMap<ColouredElement, CascadeTrace>) -> BTreeMap<usize, Vec<&CascadeTrace>> {
    let mut groups: BTreeMap<usize, Vec<&CascadeTrace>> = BTreeMap::new();
    for t in found.values() {
        if let Some(j) = t.origin {
            groups.entry(j).or_default().push(t);
        }
    }
    groups
}

/// Depth-first over chains of length at most `k`, for roots with `|S_0| = i*`. `None` when the
/// collection is all rainbow bases or the budgeted search finds nothing.
pub fn concentration_probe(universe: &Universe, coll: &Collection, k: usize, good: bool) -> Option<Probe> {
    concentration_probe_with(universe, coll, k, good, ProbeLimits::default())
}

pub fn concentration_probe_with(
    universe: &Universe,
    coll: &Collection,
    k: usize,
    good: bool,
    limits: ProbeLimits,
) -> Option<Probe> {
    if k == 0 {
        return None;
    }
    let roots = istar_roots(coll).ok()?;
    let mut budget = limits.max_states;
    for root in roots {
        let start = vec![State {
            root: root.clone(),
            steps: Vec::new(),
        }];
        if let Some(p) = probe_chain(universe, &root, vec![root.set_index()], start, k, good, &mut budget) {
            return Some(p);
        }
        if budget == 0 {
            return None;
        }
    }
    None
}

fn probe_chain(
    universe: &Universe,
    root: &Root,
    chain: Vec<usize>,
    states: Vec<State>,
    k: usize,
    good: bool,
    budget: &mut usize,
) -> Option<Probe> {
    let mut outcome = SearchOutcome::default();
    finish(universe, root, &chain, &states, good, &mut outcome).ok()?;
    for (j, traces) in by_member(&outcome.found) {
        if traces.len() >= k {
            return Some(Probe {
                root: root.clone(),
                chain,
                landing: j,
                elements: traces.iter().map(|t| t.element()).collect(),
                traces: traces.into_iter().cloned().collect(),
            });
        }
    }
    if chain.len() >= k {
        return None;
    }
    for next in 0..root.collection().len() {
        if chain.contains(&next) || *budget == 0 {
            continue;
        }
        let mut stats = SearchOutcome::default();
        let advanced = advance(universe, &states, next, good, *budget, &mut stats).ok()?;
        *budget = budget.saturating_sub(advanced.len());
        if advanced.is_empty() {
            continue;
        }
        let mut longer = chain.clone();
        longer.push(next);
        if let Some(p) = probe_chain(universe, root, longer, advanced, k, good, budget) {
            return Some(p);
        }
    }
    None
}
