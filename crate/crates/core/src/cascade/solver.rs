//! Signature hill-climbing over the exchange and cascade moves.

use std::time::{Duration, Instant};

use crate::exchange::{add_set, arrow, cyclic_exchange, AddMode, AddRecord, ExchangePair, Root};
use crate::rainbow::{BoundParams, Collection, ColouredElement, Universe};

use super::concentration::by_member;
use super::movelog::{apply_move, MoveKind, MoveLog, MoveRecord, Op, Via};
use super::search::{advance, finish, CascadeTrace, SearchOutcome, State};
use super::CascadeError;

/// Order in which candidate moves are tried. Only one ordering exists so far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MovePolicy {
    /// Move kinds in repertoire order; members by size then index; elements ascending.
    #[default]
    Canonical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverParams {
    pub bounds: BoundParams,
    /// Longest cascade chain explored.
    pub depth: usize,
    /// Whether good-cascade moves are tried (they only run when some element has two colours).
    pub good_transforms: bool,
    pub policy: MovePolicy,
    /// Recorded for provenance; the solver itself is deterministic.
    pub seed: u64,
    /// Maximum number of accepted moves.
    pub budget: usize,
    pub time_budget: Option<Duration>,
    /// Cap on roots visited per cascade search.
    pub max_states: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            bounds: BoundParams::default(),
            depth: 3,
            good_transforms: true,
            policy: MovePolicy::Canonical,
            seed: 0,
            budget: 10_000,
            time_budget: None,
            max_states: 5_000,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<(), CascadeError> {
        if self.depth == 0 {
            return Err(CascadeError::InvalidParams("depth limit must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(CascadeError::InvalidParams("iteration budget must be at least 1".into()));
        }
        if self.max_states == 0 {
            return Err(CascadeError::InvalidParams("state cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    /// No move in the repertoire increases the signature.
    LocalOptimum,
    Budget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub collection: Collection,
    pub log: MoveLog,
    pub stop: StopReason,
}

impl SolveResult {
    pub fn rainbow_bases(&self) -> usize {
        self.collection.full_count()
    }
}

struct Candidate {
    kind: MoveKind,
    best_effort: bool,
    ops: Vec<Op>,
    next: Collection,
}

struct Ctx<'a> {
    universe: &'a Universe,
    params: &'a SolverParams,
    deadline: Option<Instant>,
}

impl Ctx<'_> {
    fn out_of_time(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Applies `ops` and keeps the result only if the signature strictly increases.
    fn improving(&self, coll: &Collection, kind: MoveKind, best_effort: bool, ops: Vec<Op>) -> Option<Candidate> {
        let next = apply_move(self.universe, coll, &ops).ok()?;
        (next.signature() > coll.signature()).then_some(Candidate {
            kind,
            best_effort,
            ops,
            next,
        })
    }
}

/// Packs rainbow bases by repeatedly applying the first signature-increasing move.
///
/// Starts from `η` empty members. Each iteration tries, in order: direct extension of a member
/// by an unused element; indirect extension through a witness; a cascade ending in an
/// augmentation or a profitable transition; a cascade whose landing member then trades
/// same-coloured elements with a smaller member through a cyclic exchange; and the same cascades
/// with good transforms when some element carries several colours.
pub fn pack_rainbow_bases(universe: &Universe, params: &SolverParams) -> Result<SolveResult, CascadeError> {
    params.validate()?;
    let n = universe.n();
    let eta = params.bounds.eta(n)?;
    let ctx = Ctx {
        universe,
        params,
        deadline: params.time_budget.map(|d| Instant::now() + d),
    };
    let mut coll = Collection::empty(n, eta);
    let mut log = MoveLog::new(n, eta);
    let stop = loop {
        if log.moves.len() >= params.budget || ctx.out_of_time() {
            break StopReason::Budget;
        }
        if coll.full_count() == coll.len() {
            break StopReason::LocalOptimum;
        }
        let Some(c) = find_move(&ctx, &coll) else {
            break if ctx.out_of_time() {
                StopReason::Budget
            } else {
                StopReason::LocalOptimum
            };
        };
        // the candidate was built by apply_move; re-check the invariants the log certifies
        c.next
            .validate(universe)
            .map_err(|e| CascadeError::InvariantBreach(format!("move {}: {e}\n{log}", log.moves.len())))?;
        if c.next.signature() <= coll.signature() {
            return Err(CascadeError::InvariantBreach(format!(
                "move {} does not increase the signature\n{log}",
                log.moves.len()
            )));
        }
        log.moves.push(MoveRecord {
            kind: c.kind,
            best_effort: c.best_effort,
            signature: c.next.signature().clone(),
            ops: c.ops,
        });
        coll = c.next;
    };
    Ok(SolveResult {
        collection: coll,
        log,
        stop,
    })
}

/// Non-full members by size, then index.
fn growable(coll: &Collection) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..coll.len()).filter(|&i| coll.get(i).len() < coll.n()).collect();
    idx.sort_by_key(|&i| (coll.get(i).len(), i));
    idx
}

fn via_of(rec: &AddRecord) -> Option<Via> {
    match rec.mode {
        AddMode::Direct => None,
        AddMode::Indirect { witness, removed, .. } => Some(Via { witness, removed }),
    }
}

fn find_move(ctx: &Ctx<'_>, coll: &Collection) -> Option<Candidate> {
    extend(ctx, coll)
        .or_else(|| swap_extend(ctx, coll))
        .or_else(|| cascades(ctx, coll, false))
        .or_else(|| {
            let multi = ctx.universe.kappa() > 1;
            (ctx.params.good_transforms && multi)
                .then(|| cascades(ctx, coll, true))
                .flatten()
        })
}

fn extend(ctx: &Ctx<'_>, coll: &Collection) -> Option<Candidate> {
    let u = ctx.universe;
    for i in growable(coll) {
        let s = coll.get(i);
        for e in u.elements() {
            if s.has_colour(e.c) || s.underline().contains(e.x) || coll.is_used(e) {
                continue;
            }
            if u.matroid().independent(&s.underline().with(e.x)) {
                let ops = vec![Op::Add {
                    set: i,
                    element: e,
                    via: None,
                }];
                if let Some(c) = ctx.improving(coll, MoveKind::Extend, false, ops) {
                    return Some(c);
                }
            }
        }
    }
    None
}

fn swap_extend(ctx: &Ctx<'_>, coll: &Collection) -> Option<Candidate> {
    let u = ctx.universe;
    for i in growable(coll) {
        for b in coll.get(i).missing_colours(coll.n()) {
            let root = Root::new(coll.clone(), i, b).ok()?;
            for rec in add_set(u, &root) {
                if rec.is_direct() || coll.is_used(rec.element) {
                    continue;
                }
                let ops = vec![Op::Add {
                    set: i,
                    element: rec.element,
                    via: via_of(&rec),
                }];
                if let Some(c) = ctx.improving(coll, MoveKind::SwapExtend, false, ops) {
                    return Some(c);
                }
            }
        }
    }
    None
}

/// Ops that replay a cascade and then add its target at the final root.
fn cascade_ops(trace: &CascadeTrace) -> Vec<Op> {
    let mut ops = Vec::new();
    let mut at = trace.chain[0];
    let recolour = |ops: &mut Vec<Op>, at: usize, path: &Option<super::GoodPath>| {
        if let Some(p) = path.as_ref().filter(|p| !p.is_identity()) {
            ops.push(Op::Recolour {
                set: at,
                base: p.base_colour,
                members: p.members.clone(),
                terminal: p.terminal,
            });
        }
    };
    for step in &trace.steps {
        recolour(&mut ops, at, &step.transform);
        ops.push(Op::Move {
            from: step.from,
            to: at,
            element: step.record.element,
            via: via_of(&step.record),
        });
        at = step.from;
    }
    recolour(&mut ops, at, &trace.final_transform);
    let target = trace.target;
    match trace.final_root.collection().locate(target.element) {
        Some(from) => ops.push(Op::Move {
            from,
            to: at,
            element: target.element,
            via: via_of(&target),
        }),
        None => ops.push(Op::Add {
            set: at,
            element: target.element,
            via: via_of(&target),
        }),
    }
    ops
}

/// Roots whose member has size `i*` first, then the other non-full members by size descending.
fn cascade_roots(coll: &Collection) -> Vec<Root> {
    let mut idx: Vec<usize> = (0..coll.len()).filter(|&i| coll.get(i).len() < coll.n()).collect();
    idx.sort_by_key(|&i| (std::cmp::Reverse(coll.get(i).len()), i));
    idx.into_iter()
        .flat_map(|i| {
            coll.get(i)
                .missing_colours(coll.n())
                .filter_map(move |b| Root::new(coll.clone(), i, b).ok())
                .collect::<Vec<_>>()
        })
        .collect()
}

fn cascades(ctx: &Ctx<'_>, coll: &Collection, good: bool) -> Option<Candidate> {
    for root in cascade_roots(coll) {
        if ctx.out_of_time() {
            return None;
        }
        let start = vec![State {
            root: root.clone(),
            steps: Vec::new(),
        }];
        let mut budget = ctx.params.max_states;
        if let Some(c) = chain_moves(ctx, coll, &root, vec![root.set_index()], start, good, &mut budget) {
            return Some(c);
        }
    }
    None
}

fn chain_moves(
    ctx: &Ctx<'_>,
    coll: &Collection,
    root: &Root,
    chain: Vec<usize>,
    states: Vec<State>,
    good: bool,
    budget: &mut usize,
) -> Option<Candidate> {
    let u = ctx.universe;
    let mut outcome = SearchOutcome::default();
    finish(u, root, &chain, &states, good, &mut outcome).ok()?;
    let (augment_kind, shift_kind, exchange_kind) = if good {
        (
            MoveKind::GoodCascadeAugment,
            MoveKind::GoodCascadeShift,
            MoveKind::GoodCascadeExchange,
        )
    } else {
        (MoveKind::CascadeAugment, MoveKind::CascadeShift, MoveKind::CascadeExchange)
    };
    for trace in outcome.found.values() {
        let kind = if trace.final_root.collection().is_used(trace.element()) {
            shift_kind
        } else {
            augment_kind
        };
        if let Some(c) = ctx.improving(coll, kind, false, cascade_ops(trace)) {
            return Some(c);
        }
    }
    for (landing, traces) in by_member(&outcome.found) {
        if chain.contains(&landing) {
            continue;
        }
        if let Some(c) = exchange_move(ctx, coll, &chain, landing, &traces, exchange_kind) {
            return Some(c);
        }
    }
    if chain.len() >= ctx.params.depth {
        return None;
    }
    for next in 0..coll.len() {
        if chain.contains(&next) || *budget == 0 || ctx.out_of_time() {
            continue;
        }
        let mut stats = SearchOutcome::default();
        let advanced = advance(u, &states, next, good, *budget, &mut stats).ok()?;
        *budget = budget.saturating_sub(advanced.len());
        if advanced.is_empty() {
            continue;
        }
        let mut longer = chain.clone();
        longer.push(next);
        if let Some(c) = chain_moves(ctx, coll, root, longer, advanced, good, budget) {
            return Some(c);
        }
    }
    None
}

/// Pairs each cascadable `(x',c)` of the landing member with the colour-`c` member of `other`,
/// then drops pairs with no arrow into the remaining partners until none is left without one.
fn exchange_pairs(ctx: &Ctx<'_>, coll: &Collection, landing: usize, other: usize, targets: &[ColouredElement]) -> Vec<ExchangePair> {
    let s_l = coll.get(landing);
    let s_o = coll.get(other);
    let mut pairs: Vec<ExchangePair> = targets
        .iter()
        .filter_map(|&to| {
            let from = s_o.with_colour(to.c)?;
            (!s_l.underline().contains(from.x)).then_some(ExchangePair { from, to })
        })
        .collect();
    let m = ctx.universe.matroid();
    loop {
        let keep: Vec<bool> = pairs
            .iter()
            .map(|p| pairs.iter().any(|q| arrow(m, s_l, p.from, q.to)))
            .collect();
        if keep.iter().all(|&k| k) {
            return pairs;
        }
        let mut it = keep.into_iter();
        pairs.retain(|_| it.next().unwrap_or(false));
    }
}

fn exchange_move(
    ctx: &Ctx<'_>,
    coll: &Collection,
    chain: &[usize],
    landing: usize,
    traces: &[&CascadeTrace],
    kind: MoveKind,
) -> Option<Candidate> {
    let targets: Vec<ColouredElement> = traces.iter().map(|t| t.element()).collect();
    let beta = ctx.params.bounds.beta;
    let mut others: Vec<usize> = (0..coll.len())
        .filter(|&j| j != landing && !chain.contains(&j))
        .collect();
    others.sort_by_key(|&j| (coll.get(j).len(), j));
    for other in others {
        let pairs = exchange_pairs(ctx, coll, landing, other, &targets);
        if pairs.is_empty() {
            continue;
        }
        let Ok(chosen) = cyclic_exchange(ctx.universe, coll.get(other), coll.get(landing), &pairs) else {
            continue;
        };
        let first = chosen[0];
        let trace = traces
            .iter()
            .find(|t| t.element() == pairs[first].to)
            .expect("every pair target is a cascadable element");
        let mut ops = cascade_ops(trace);
        ops.push(Op::Exchange {
            from: other,
            to: landing,
            take: chosen.iter().map(|&i| pairs[i].from).collect(),
            release: chosen.iter().filter(|&&i| i != first).map(|&i| pairs[i].to).collect(),
        });
        let best_effort = pairs.len() < beta + 1 || targets.len() < 2 * beta + 1;
        if let Some(c) = ctx.improving(coll, kind, best_effort, ops) {
            return Some(c);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::ElementSet;
    use crate::matroid::Matroid;

    fn blocks(n: usize) -> Universe {
        let bases: Vec<ElementSet> = (0..n).map(|c| (c * n..(c + 1) * n).collect()).collect();
        Universe::new(Matroid::uniform(n, n * n).unwrap(), bases).unwrap()
    }

    #[test]
    fn uniform_blocks_pack_fully() {
        let u = blocks(3);
        let res = pack_rainbow_bases(&u, &SolverParams::default()).unwrap();
        assert_eq!(res.rainbow_bases(), 3);
        assert_eq!(res.stop, StopReason::LocalOptimum);
        assert_eq!(res.log.replay(&u).unwrap(), res.collection);
    }

    #[test]
    fn rank_one() {
        let u = blocks(1);
        let res = pack_rainbow_bases(&u, &SolverParams::default()).unwrap();
        assert_eq!(res.rainbow_bases(), 1);
    }

    #[test]
    fn budget_stops_early() {
        let u = blocks(3);
        let params = SolverParams {
            budget: 2,
            ..SolverParams::default()
        };
        let res = pack_rainbow_bases(&u, &params).unwrap();
        assert_eq!(res.stop, StopReason::Budget);
        assert_eq!(res.log.moves.len(), 2);
    }

    #[test]
    fn bad_params_rejected() {
        let u = blocks(2);
        let zero = SolverParams {
            depth: 0,
            ..SolverParams::default()
        };
        assert!(matches!(pack_rainbow_bases(&u, &zero), Err(CascadeError::InvalidParams(_))));
        let wide = SolverParams {
            bounds: BoundParams::new(0, 1, 2),
            ..SolverParams::default()
        };
        assert!(matches!(pack_rainbow_bases(&u, &wide), Err(CascadeError::Model(_))));
    }

    #[test]
    fn deterministic() {
        let u = blocks(3);
        let a = pack_rainbow_bases(&u, &SolverParams::default()).unwrap();
        let b = pack_rainbow_bases(&u, &SolverParams::default()).unwrap();
        assert_eq!(a.log.to_string(), b.log.to_string());
    }
}
