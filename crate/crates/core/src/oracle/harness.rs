//! Exhaustive and sampled checks of the exchange and cascade statements at tiny scale.
//!
//! Each harness walks a seeded stream of generated instances, counts the cases it exercised
//! and records every counterexample. Statements about η-maximal collections need `t(ℬ) < η`,
//! which never happens on unrestricted tiny instances, so those harnesses withdraw coloured
//! elements from the universe first (see [`Universe::restricted`]).

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::ElementSet;
use crate::cascade::{build_good_graph, cascade_search_with, good_transform, is_good, SearchLimits};
use crate::exchange::{
    add_records_all_witnesses, arrow, cyclic_exchange, exchange_injection, transition, ExchangePair, Root,
};
use crate::rainbow::{
    submaximal_signatures, BoundParams, Collection, ColouredElement, EtaReference, Provenance, Ris, Signature,
    Standing, Universe,
};
use crate::workbench::{emit_instance, generate_instance, Family, Instance, Mode};

use super::{brute_force_t, brute_force_tau_eta, collections_with_signature, enumerate_ris, OracleBudget, OracleError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HarnessId {
    SwapImpliesAdd,
    ExchangeInjection,
    MaxSubmaxTransition,
    CyclicExchange,
    LevelGrowth,
    OverlapIntersection,
    CascadeLandingMax,
    CascadeLandingSubmax,
}

impl HarnessId {
    pub const ALL: [HarnessId; 8] = [
        HarnessId::SwapImpliesAdd,
        HarnessId::ExchangeInjection,
        HarnessId::MaxSubmaxTransition,
        HarnessId::CyclicExchange,
        HarnessId::LevelGrowth,
        HarnessId::OverlapIntersection,
        HarnessId::CascadeLandingMax,
        HarnessId::CascadeLandingSubmax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HarnessId::SwapImpliesAdd => "swap-implies-add",
            HarnessId::ExchangeInjection => "exchange-injection",
            HarnessId::MaxSubmaxTransition => "max-submax-transition",
            HarnessId::CyclicExchange => "cyclic-exchange",
            HarnessId::LevelGrowth => "level-growth",
            HarnessId::OverlapIntersection => "overlap-intersection",
            HarnessId::CascadeLandingMax => "cascade-landing-max",
            HarnessId::CascadeLandingSubmax => "cascade-landing-submax",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|h| h.name() == s)
    }

    /// Cases a run must exercise before its zero-counterexample result means anything.
    pub fn coverage_floor(self) -> usize {
        match self {
            HarnessId::OverlapIntersection => 100,
            _ => 1000,
        }
    }
}

impl fmt::Display for HarnessId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarnessConfig {
    pub seed: u64,
    /// Generated instances per run.
    pub instances: usize,
    /// Longest chain tried in cascade harnesses.
    pub depth: usize,
    /// Most collections listed per exact signature.
    pub per_signature: usize,
    /// Budget for each exact search.
    pub budget: OracleBudget,
    /// Wall-clock cap for the whole run; hitting it marks the report incomplete.
    pub wall: Duration,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            instances: 96,
            depth: 3,
            per_signature: 100,
            budget: OracleBudget {
                wall: Duration::from_secs(20),
                max_nodes: 20_000_000,
                // restricted rank-6 universes stay small enough for the exact searches
                max_n: 6,
                ..OracleBudget::default()
            },
            wall: Duration::from_secs(300),
        }
    }
}

/// A failing case, with enough data to rebuild it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub description: String,
    /// Canonical instance text.
    pub instance: String,
    /// Coloured elements withdrawn from the universe.
    pub withdrawn: Vec<ColouredElement>,
    pub collection: String,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.description)?;
        writeln!(f, "collection: {}", self.collection)?;
        let withdrawn: Vec<String> = self.withdrawn.iter().map(ToString::to_string).collect();
        writeln!(f, "withdrawn: [{}]", withdrawn.join(" "))?;
        write!(f, "{}", self.instance)
    }
}

/// Per-instance summary in the workbench CSV layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarnessRow {
    pub instance_digest: String,
    pub n: usize,
    pub m: usize,
    pub family: String,
    pub kappa_actual: usize,
    pub beta_declared: Option<usize>,
    pub girth: String,
    /// Exact `t` of the universe the cases ran on, when computed.
    pub t: Option<usize>,
    pub cases: usize,
    pub counterexamples: usize,
    pub elapsed_ms: u64,
    pub status: &'static str,
}

impl HarnessRow {
    /// Columns follow the bench CSV header; `solver_rbs` and the bound columns stay empty and
    /// `moves` holds the number of cases.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<usize>| v.map_or_else(String::new, |v| v.to_string());
        [
            self.instance_digest.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.family.clone(),
            self.kappa_actual.to_string(),
            opt(self.beta_declared),
            self.girth.clone(),
            String::new(),
            opt(self.t),
            String::new(),
            String::new(),
            self.cases.to_string(),
            self.elapsed_ms.to_string(),
            self.status.to_string(),
        ]
        .join(",")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarnessReport {
    pub id: HarnessId,
    pub cases: usize,
    pub counterexamples: usize,
    /// Instances skipped because generation failed or an exact search ran out of budget.
    pub skipped: usize,
    /// The run stopped early on its wall-clock cap.
    pub incomplete: bool,
    pub first_counterexample: Option<Counterexample>,
    pub rows: Vec<HarnessRow>,
}

impl HarnessReport {
    fn new(id: HarnessId) -> Self {
        Self {
            id,
            cases: 0,
            counterexamples: 0,
            skipped: 0,
            incomplete: false,
            first_counterexample: None,
            rows: Vec::new(),
        }
    }

    pub fn covered(&self) -> bool {
        self.cases >= self.id.coverage_floor()
    }

    /// No counterexamples, complete, and over the coverage floor.
    pub fn passed(&self) -> bool {
        self.counterexamples == 0 && !self.incomplete && self.covered()
    }
}

impl fmt::Display for HarnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} cases, {} counterexamples, {} skipped{}",
            self.id,
            self.cases,
            self.counterexamples,
            self.skipped,
            if self.incomplete { ", incomplete" } else { "" }
        )
    }
}

/// Runs one harness over its seeded instance stream.
pub fn run_harness(id: HarnessId, config: &HarnessConfig) -> HarnessReport {
    let mut run = Run {
        report: HarnessReport::new(id),
        config: *config,
        start: Instant::now(),
    };
    match id {
        HarnessId::SwapImpliesAdd => run.unrestricted(&[2, 3, 4], swap_implies_add),
        HarnessId::ExchangeInjection => run.unrestricted(&[2, 3, 4, 5, 6], injection_cases),
        HarnessId::CyclicExchange => run.unrestricted(&[3, 4, 5, 6], cyclic_cases),
        HarnessId::LevelGrowth => run.level_growth(),
        HarnessId::MaxSubmaxTransition => run.exact(&[3, 4], |n, _| 2..=n, transition_cases),
        HarnessId::CascadeLandingMax => run.exact(&[3, 4], |n, _| 2..=n, landing_max),
        HarnessId::CascadeLandingSubmax => run.exact(&[3, 4], |n, _| 2..=n, landing_submax),
        // needs κ < n - η and three sets besides the root
        HarnessId::OverlapIntersection => run.exact(&[5], |n, kappa| 3..=n.saturating_sub(kappa + 1), overlap_cases),
    }
    run.report
}

pub fn run_all(config: &HarnessConfig) -> Vec<HarnessReport> {
    HarnessId::ALL.iter().map(|&id| run_harness(id, config)).collect()
}

const FAMILIES: [Family; 4] = [
    Family::Uniform,
    Family::Linear {
        p: Family::DEFAULT_PRIME,
    },
    Family::Graphic,
    Family::SparsePaving,
];

/// The `i`-th instance of a stream cycling through families, ranks and modes.
fn stream_instance(seed: u64, i: usize, ranks: &[usize], kappa: usize) -> Option<Instance> {
    let family = FAMILIES[i % FAMILIES.len()];
    let n = ranks[(i / FAMILIES.len()) % ranks.len()];
    let mode = if (i / (FAMILIES.len() * ranks.len())) % 2 == 1 {
        Mode::Overlapping { kappa }
    } else {
        Mode::Disjoint
    };
    generate_instance(family, n, mode, seed.wrapping_mul(0x9e37_79b9).wrapping_add(i as u64)).ok()
}

/// Cases and counterexamples collected on one universe.
struct Tally<'a> {
    instance: &'a Instance,
    withdrawn: &'a [ColouredElement],
    cases: usize,
    failures: Vec<Counterexample>,
}

impl<'a> Tally<'a> {
    fn new(instance: &'a Instance, withdrawn: &'a [ColouredElement]) -> Self {
        Self {
            instance,
            withdrawn,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, coll: &Collection, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(Counterexample {
                description: what(),
                instance: emit_instance(self.instance),
                withdrawn: self.withdrawn.to_vec(),
                collection: show(coll),
            });
        }
    }
}

fn show(coll: &Collection) -> String {
    let sets: Vec<String> = coll.sets().iter().map(ToString::to_string).collect();
    format!("[{}]", sets.join(" | "))
}

struct Run {
    report: HarnessReport,
    config: HarnessConfig,
    start: Instant,
}

impl Run {
    fn out_of_time(&mut self) -> bool {
        if self.start.elapsed() > self.config.wall {
            self.report.incomplete = true;
        }
        self.report.incomplete
    }

    fn record(&mut self, instance: &Instance, t: Option<usize>, tally: Tally<'_>, started: Instant) {
        let universe = instance.universe().ok();
        let girth = universe
            .as_ref()
            .and_then(|u| u.matroid().girth().ok())
            .map_or_else(|| "declared".to_string(), |g| g.to_string());
        let fails = tally.failures.len();
        self.report.rows.push(HarnessRow {
            instance_digest: instance.digest(),
            n: instance.n(),
            m: instance.m(),
            family: instance.family().to_string(),
            kappa_actual: crate::rainbow::overlap_kappa(&instance.bases),
            beta_declared: instance.declared.beta,
            girth,
            t,
            cases: tally.cases,
            counterexamples: fails,
            elapsed_ms: started.elapsed().as_millis() as u64,
            status: if fails == 0 { "pass" } else { "fail" },
        });
        self.report.cases += tally.cases;
        self.report.counterexamples += fails;
        if self.report.first_counterexample.is_none() {
            self.report.first_counterexample = tally.failures.into_iter().next();
        }
    }

    /// Harnesses with no maximality hypothesis run on the full universe.
    fn unrestricted(&mut self, ranks: &[usize], check: fn(&Universe, &mut ChaCha8Rng, &mut Tally<'_>)) {
        for i in 0..self.config.instances {
            if self.out_of_time() {
                return;
            }
            let Some(instance) = stream_instance(self.config.seed, i, ranks, 2) else {
                self.report.skipped += 1;
                continue;
            };
            let Ok(universe) = instance.universe() else {
                self.report.skipped += 1;
                continue;
            };
            let started = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ (i as u64).rotate_left(17));
            let mut tally = Tally::new(&instance, &[]);
            check(&universe, &mut rng, &mut tally);
            // exact t is a reporting nicety; skip it where it would dominate the run
            let t = (universe.size() <= 25)
                .then(|| brute_force_t(&universe, &self.config.budget).ok())
                .flatten();
            self.record(&instance, t, tally, started);
        }
    }

    /// Harnesses over exact η-maximal and η-submaximal collections of restricted universes.
    /// `etas` maps `(n, κ)` to the admissible range of `η`.
    fn exact(
        &mut self,
        ranks: &[usize],
        etas: fn(usize, usize) -> std::ops::RangeInclusive<usize>,
        check: fn(&ExactPool, &HarnessConfig, &mut Tally<'_>),
    ) {
        for i in 0..self.config.instances {
            if self.out_of_time() {
                return;
            }
            let Some(instance) = stream_instance(self.config.seed, i, ranks, 2) else {
                self.report.skipped += 1;
                continue;
            };
            let Ok(universe) = instance.universe() else {
                self.report.skipped += 1;
                continue;
            };
            let started = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ 0x5bd1_e995 ^ i as u64);
            let range = etas(universe.n(), universe.kappa());
            if range.is_empty() {
                self.report.skipped += 1;
                continue;
            }
            let eta = rng.gen_range(range);
            match ExactPool::build(&universe, eta, &mut rng, &self.config) {
                Ok(Some(pool)) => {
                    let mut tally = Tally::new(&instance, &pool.withdrawn);
                    check(&pool, &self.config, &mut tally);
                    self.record(&instance, Some(pool.tau.full()), tally, started);
                }
                Ok(None) | Err(_) => self.report.skipped += 1,
            }
        }
    }

    fn level_growth(&mut self) {
        for i in 0..self.config.instances {
            if self.out_of_time() {
                return;
            }
            let n = 5 + i % 4;
            let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ 0x2545_f491 ^ i as u64);
            let Some(instance) = generate_instance(
                FAMILIES[i % FAMILIES.len()],
                n,
                Mode::Overlapping { kappa: 2 },
                self.config.seed.wrapping_add(i as u64),
            )
            .ok() else {
                self.report.skipped += 1;
                continue;
            };
            let Ok(universe) = instance.universe() else {
                self.report.skipped += 1;
                continue;
            };
            let started = Instant::now();
            let mut tally = Tally::new(&instance, &[]);
            for _ in 0..64 {
                if let Some(root) = sample_bad_root(&universe, 3, &mut rng) {
                    level_growth_case(&universe, &root, 3, &mut tally);
                }
            }
            self.record(&instance, None, tally, started);
        }
    }
}

/// A random collection of `slots` disjoint RIS's, each grown greedily from a shuffled universe
/// towards a random target size in `1..=n`.
pub fn random_collection(universe: &Universe, slots: usize, rng: &mut impl Rng) -> Collection {
    let n = universe.n();
    let m = universe.matroid();
    let mut pool: Vec<ColouredElement> = universe.elements().collect();
    pool.shuffle(rng);
    let mut taken = vec![false; pool.len()];
    let mut sets = Vec::with_capacity(slots);
    for _ in 0..slots {
        let target = rng.gen_range(1..=n.max(1));
        let mut picked = Vec::new();
        let mut under = ElementSet::new();
        let mut colours = ElementSet::new();
        for (i, e) in pool.iter().enumerate() {
            if picked.len() == target {
                break;
            }
            if taken[i] || under.contains(e.x) || colours.contains(e.c) || !m.independent(&under.with(e.x)) {
                continue;
            }
            taken[i] = true;
            under.insert(e.x);
            colours.insert(e.c);
            picked.push(*e);
        }
        sets.push(universe.ris(picked).expect("greedy picks form an RIS"));
    }
    Collection::new(universe, sets).expect("greedy sets are disjoint")
}

/// Every root of the collection, as (set index, missing colour).
fn roots_of(coll: &Collection) -> Vec<(usize, usize)> {
    (0..coll.len())
        .flat_map(|i| coll.get(i).missing_colours(coll.n()).map(move |b| (i, b)).collect::<Vec<_>>())
        .collect()
}

// --- swap-implies-add ----------------------------------------------------------------------

/// `S + e` is an RIS, checked from scratch.
fn extends(universe: &Universe, s: &Ris, add: &[ColouredElement], remove: &[ColouredElement]) -> bool {
    let mut elems: Vec<ColouredElement> = s.iter().filter(|e| !remove.contains(e)).collect();
    elems.extend_from_slice(add);
    universe.validate_ris(&elems).is_ok()
}

fn swap_implies_add(universe: &Universe, rng: &mut ChaCha8Rng, tally: &mut Tally<'_>) {
    let m = universe.matroid();
    for _ in 0..12 {
        let slots = rng.gen_range(1..=universe.n());
        let coll = random_collection(universe, slots, rng);
        for (set, b) in roots_of(&coll) {
            let s = coll.get(set);
            let closure = m.closure(s.underline()).expect("RIS underline is in the ground set");
            for out in s.iter() {
                for y in coll.unused(universe, b).iter() {
                    let witness = ColouredElement::new(y, b);
                    if !extends(universe, s, &[witness], &[out]) {
                        continue;
                    }
                    let direct = extends(universe, s, &[witness], &[]);
                    let indirect = universe
                        .base(out.c)
                        .difference(&closure)
                        .iter()
                        .all(|x| extends(universe, s, &[ColouredElement::new(x, out.c), witness], &[out]));
                    tally.check(direct || indirect, &coll, || {
                        format!(
                            "S{set} missing {b}: {out} swaps for {witness}, yet {witness} is not directly addable \
                             and some element of B_{} outside cl(S) is not indirectly addable",
                            out.c
                        )
                    });
                }
            }
        }
    }
}

// --- exchange-injection --------------------------------------------------------------------

fn injection_cases(universe: &Universe, rng: &mut ChaCha8Rng, tally: &mut Tally<'_>) {
    let n = universe.n();
    let sets: Vec<Ris> = if n <= 3 {
        enumerate_ris(universe, &OracleBudget::default()).unwrap_or_default()
    } else {
        (0..40)
            .flat_map(|_| random_collection(universe, 2, rng).sets().to_vec())
            .collect()
    };
    let m = universe.matroid();
    for s in &sets {
        let coll = Collection::new(universe, vec![s.clone()]).expect("one RIS is a collection");
        for c in 1..=n {
            let ok = match exchange_injection(universe, s, c) {
                Ok(inj) => {
                    let domain: Vec<usize> = inj.map.iter().map(|&(x, _)| x).collect();
                    let image: ElementSet = inj.map.iter().map(|&(_, y)| y).collect();
                    domain == s.underline().to_vec()
                        && image.len() == domain.len()
                        && image.is_subset(universe.base(c))
                        && inj.map.iter().all(|&(x, y)| {
                            y == x || (!s.underline().contains(y) && m.independent(&s.underline().without(x).with(y)))
                        })
                }
                Err(_) => false,
            };
            tally.check(ok, &coll, || format!("no valid injection from {s} into B_{c}"));
        }
    }
}

// --- cyclic-exchange -----------------------------------------------------------------------

fn exchanged(s_prime: &Ris, pairs: &[ExchangePair], set: &[usize]) -> Vec<ColouredElement> {
    let out: Vec<ColouredElement> = set.iter().map(|&i| pairs[i].to).collect();
    let mut elems: Vec<ColouredElement> = s_prime.iter().filter(|e| !out.contains(e)).collect();
    elems.extend(set.iter().map(|&i| pairs[i].from));
    elems
}

/// The induced arrow digraph on `set` is a single directed cycle (a loop when `|set| = 1`).
fn is_chordless_cycle(arrows: &[Vec<bool>], set: &[usize]) -> bool {
    let inside = |i: usize| set.iter().filter(|&&j| arrows[i][j]).count();
    if set.len() == 1 {
        return arrows[set[0]][set[0]];
    }
    if set.iter().any(|&i| inside(i) != 1 || arrows[i][i]) {
        return false;
    }
    // follow the successor map from the first index and return to it after |set| steps
    let mut at = set[0];
    for step in 1..=set.len() {
        at = *set.iter().find(|&&j| arrows[at][j]).expect("out-degree is one");
        if at == set[0] {
            return step == set.len();
        }
    }
    false
}

fn cyclic_cases(universe: &Universe, rng: &mut ChaCha8Rng, tally: &mut Tally<'_>) {
    let n = universe.n();
    let m = universe.matroid();
    for _ in 0..200 {
        let coll = random_collection(universe, 2, rng);
        let (s, s_prime) = (coll.get(0), coll.get(1));
        let mut shared: Vec<usize> = s
            .colours()
            .intersection(s_prime.colours())
            .iter()
            .filter(|&c| !s_prime.underline().contains(s.with_colour(c).expect("shared colour").x))
            .collect();
        shared.shuffle(rng);
        let k = rng.gen_range(1..=4.min(n));
        if shared.len() < k {
            continue;
        }
        let pairs: Vec<ExchangePair> = shared[..k]
            .iter()
            .map(|&c| ExchangePair {
                from: s.with_colour(c).expect("shared colour"),
                to: s_prime.with_colour(c).expect("shared colour"),
            })
            .collect();
        let arrows: Vec<Vec<bool>> = pairs
            .iter()
            .map(|p| pairs.iter().map(|q| arrow(m, s_prime, p.from, q.to)).collect())
            .collect();
        if !arrows.iter().all(|row| row.iter().any(|&a| a)) {
            continue;
        }
        let exists = (1u32..1 << k).any(|mask| {
            let set: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
            universe.validate_ris(&exchanged(s_prime, &pairs, &set)).is_ok()
        });
        let ok = exists
            && match cyclic_exchange(universe, s, s_prime, &pairs) {
                Ok(set) => {
                    universe.validate_ris(&exchanged(s_prime, &pairs, &set)).is_ok() && is_chordless_cycle(&arrows, &set)
                }
                Err(_) => false,
            };
        tally.check(ok, &coll, || format!("{k} pairs with arrows everywhere but no valid exchange set"));
    }
}

// --- level-growth --------------------------------------------------------------------------

/// A bad root `(𝒮, S, b)` with `|𝒮| = n - alpha`: `S` takes elements of `B_b` in other
/// colours, the remaining colour-`b` elements are spread one per other set, and every other
/// set is then grown at random. `None` when `B_b` does not carry enough other colours.
pub fn sample_bad_root(universe: &Universe, alpha: usize, rng: &mut impl Rng) -> Option<Root> {
    let n = universe.n();
    if alpha >= n {
        return None;
    }
    let slots = n - alpha;
    let b = rng.gen_range(1..=n);
    let mut base: Vec<usize> = universe.class(b).iter().collect();
    base.shuffle(rng);
    let mut colours = ElementSet::new();
    let mut s_elems = Vec::new();
    let mut rest = Vec::new();
    for &x in &base {
        let mut options: Vec<usize> = universe
            .colours_of(x)
            .iter()
            .copied()
            .filter(|&c| c != b && !colours.contains(c))
            .collect();
        options.shuffle(rng);
        match options.first() {
            Some(&c) => {
                colours.insert(c);
                s_elems.push(ColouredElement::new(x, c));
            }
            None => rest.push(x),
        }
    }
    // every colour-b element outside S must be used elsewhere, one per other set
    while rest.len() > slots - 1 {
        let e = s_elems.pop()?;
        rest.push(e.x);
    }
    if s_elems.len() <= alpha {
        return None;
    }
    let m = universe.matroid();
    let s = universe.ris(s_elems).ok()?;
    let mut sets = vec![s];
    let mut used: Vec<ColouredElement> = sets[0].iter().collect();
    for j in 0..slots - 1 {
        let mut elems = Vec::new();
        if let Some(&x) = rest.get(j) {
            elems.push(ColouredElement::new(x, b));
        }
        let mut pool: Vec<ColouredElement> = universe.elements().filter(|e| e.c != b && !used.contains(e)).collect();
        pool.shuffle(rng);
        let target = rng.gen_range(1..=n);
        for e in pool {
            if elems.len() >= target {
                break;
            }
            let under: ElementSet = elems.iter().map(|f: &ColouredElement| f.x).collect();
            if under.contains(e.x) || elems.iter().any(|f| f.c == e.c) || !m.independent(&under.with(e.x)) {
                continue;
            }
            elems.push(e);
        }
        used.extend(elems.iter().copied());
        sets.push(universe.ris(elems).ok()?);
    }
    let coll = Collection::new(universe, sets).ok()?;
    let root = Root::new(coll, 0, b).ok()?;
    (!is_good(universe, &root)).then_some(root)
}

fn level_growth_case(universe: &Universe, root: &Root, alpha: usize, tally: &mut Tally<'_>) {
    let kappa = universe.kappa().max(1);
    let graph = build_good_graph(universe, root);
    let sizes = graph.cumulative_sizes();
    // the last built level is the first one holding a terminal
    let pre_terminal = sizes.len().saturating_sub(1);
    let growth = (0..pre_terminal).all(|l| sizes[l + 1] * kappa >= sizes[l] * alpha);
    let transformed = good_transform(universe, root).is_ok_and(|(next, _)| {
        next.set().underline() == root.set().underline() && is_good(universe, &next)
    });
    tally.check(graph.has_terminal() && growth && transformed, root.collection(), || {
        format!(
            "bad root on S{} missing {}: levels {:?}, terminal {}, alpha {alpha}, kappa {kappa}",
            root.set_index(),
            root.colour(),
            sizes,
            graph.has_terminal()
        )
    });
}

// --- exact pools ---------------------------------------------------------------------------

/// A restricted universe with `t < η`, its exact `τ_η`, and the η-maximal and η-submaximal
/// collections listed from it.
pub struct ExactPool {
    pub universe: Universe,
    pub withdrawn: Vec<ColouredElement>,
    pub eta: usize,
    pub tau: Signature,
    pub maximal: Vec<Collection>,
    pub submaximal: Vec<Collection>,
}

impl ExactPool {
    /// Draws withdrawals until `τ_η` has no empty slot and `t < η`: either most of one to
    /// three colour classes (each keeps at most `η-1` elements), or a random fraction of the
    /// whole universe. `None` when no draw qualifies.
    pub fn build(
        full: &Universe,
        eta: usize,
        rng: &mut impl Rng,
        config: &HarnessConfig,
    ) -> Result<Option<Self>, OracleError> {
        let n = full.n();
        if eta < 2 || eta > n {
            return Ok(None);
        }
        for _ in 0..12 {
            let mut withdrawn = withdrawal(full, eta, rng);
            let universe = full.restricted(&withdrawn);
            let (tau, _) = brute_force_tau_eta(&universe, eta, &config.budget)?;
            if tau.total() != eta || tau.full() >= eta {
                continue;
            }
            debug_assert!(brute_force_t(&universe, &config.budget).map_or(true, |t| t == tau.full()));
            let maximal = collections_with_signature(&universe, eta, &tau, config.per_signature, &config.budget)?;
            let submaximal = match submaximal_signatures(&tau, eta) {
                Ok(sigs) => {
                    let mut out = Vec::new();
                    for sig in &sigs {
                        out.extend(collections_with_signature(
                            &universe,
                            eta,
                            sig,
                            config.per_signature,
                            &config.budget,
                        )?);
                    }
                    out
                }
                Err(_) => Vec::new(),
            };
            withdrawn.sort();
            return Ok(Some(Self {
                universe,
                withdrawn,
                eta,
                tau,
                maximal,
                submaximal,
            }));
        }
        Ok(None)
    }

    pub fn reference(&self) -> EtaReference {
        EtaReference::new(self.eta, self.tau.clone(), Provenance::Exact)
    }

    /// Collections with their standing.
    fn collections(&self) -> impl Iterator<Item = (Standing, &Collection)> {
        self.maximal
            .iter()
            .map(|c| (Standing::Maximal, c))
            .chain(self.submaximal.iter().map(|c| (Standing::Submaximal, c)))
    }
}

fn withdrawal(full: &Universe, eta: usize, rng: &mut impl Rng) -> Vec<ColouredElement> {
    let n = full.n();
    let mut out = Vec::new();
    if rng.gen_bool(0.5) {
        let mut colours: Vec<usize> = (1..=n).collect();
        colours.shuffle(rng);
        for &c in &colours[..rng.gen_range(1..=n.min(3))] {
            let mut class: Vec<usize> = full.class(c).iter().collect();
            class.shuffle(rng);
            let keep = rng.gen_range(1..eta);
            out.extend(class[keep..].iter().map(|&x| ColouredElement::new(x, c)));
        }
        let mut others: Vec<ColouredElement> = full.elements().filter(|e| !out.contains(e)).collect();
        others.shuffle(rng);
        out.extend(others.into_iter().take(rng.gen_range(0..=2)));
    } else {
        let p = rng.gen_range(0.2..0.6);
        out.extend(full.elements().filter(|_| rng.gen_bool(p)));
    }
    out
}

/// Chains `[s0, ..]` of distinct member indices with at most `depth` sets.
fn chains_from(len: usize, s0: usize, depth: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![s0]];
    let mut frontier = vec![vec![s0]];
    for _ in 1..depth {
        let mut next = Vec::new();
        for chain in &frontier {
            for j in (0..len).filter(|j| !chain.contains(j)) {
                let mut c = chain.clone();
                c.push(j);
                next.push(c);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Roots `(𝒮, S0, b)` with `|S0| = i*(𝒮)`.
fn istar_roots(coll: &Collection) -> Vec<Root> {
    let Ok(istar) = coll.istar() else {
        return Vec::new();
    };
    roots_of(coll)
        .into_iter()
        .filter(|&(i, _)| coll.get(i).len() == istar)
        .filter_map(|(i, b)| Root::new(coll.clone(), i, b).ok())
        .collect()
}

fn limits(config: &HarnessConfig) -> SearchLimits {
    SearchLimits {
        depth: config.depth,
        max_states: 4096,
    }
}

fn transition_cases(pool: &ExactPool, _config: &HarnessConfig, tally: &mut Tally<'_>) {
    let u = &pool.universe;
    let n = u.n();
    let reference = pool.reference();
    let t_n1 = pool.tau.get(n - 1);
    for (standing, coll) in pool.collections() {
        for root in istar_roots(coll) {
            for rec in add_records_all_witnesses(u, &root) {
                if !coll.locate(rec.element).is_some_and(|j| j != root.set_index()) {
                    continue;
                }
                let Ok(next) = transition(u, &root, &rec) else {
                    tally.check(false, coll, || format!("transition by {} from {root} failed", rec.element));
                    continue;
                };
                let after = reference.classify(next.collection().signature()).standing;
                let size = next.set().len();
                let istar = next.collection().istar().ok();
                let ok = match (standing, t_n1 > 0) {
                    (Standing::Maximal, true) => after == Standing::Maximal && size == n - 1,
                    (Standing::Maximal, false) => {
                        after == Standing::Submaximal && size == n - 1 && istar == Some(n - 1)
                    }
                    _ => istar == Some(size) && matches!(after, Standing::Maximal | Standing::Submaximal),
                };
                tally.check(ok, coll, || {
                    format!(
                        "{standing:?} collection, tau {}, {root} by {}: lands {after:?} with |S0'| = {size}, i* = {istar:?}",
                        pool.tau, rec.element
                    )
                });
            }
        }
    }
}

fn landing_max(pool: &ExactPool, config: &HarnessConfig, tally: &mut Tally<'_>) {
    let u = &pool.universe;
    let n = u.n();
    for coll in &pool.maximal {
        for root in istar_roots(coll) {
            for chain in chains_from(coll.len(), root.set_index(), config.depth) {
                let Ok(outcome) = cascade_search_with(u, &root, &chain, limits(config), false) else {
                    continue;
                };
                for (e, trace) in &outcome.found {
                    let chain_full = chain[1..].iter().all(|&j| coll.get(j).len() == n);
                    let lands = trace.origin.is_some_and(|j| coll.get(j).len() == n);
                    tally.check(chain_full && lands, coll, || {
                        format!("maximal, chain {chain:?} from {root}: {e} lands in {:?}", trace.origin)
                    });
                }
            }
        }
    }
}

fn landing_submax(pool: &ExactPool, config: &HarnessConfig, tally: &mut Tally<'_>) {
    let u = &pool.universe;
    let n = u.n();
    for coll in &pool.submaximal {
        let t_n1 = coll.signature().get(n - 1);
        let istarstar = coll.istarstar().ok().flatten();
        for root in roots_of(coll)
            .into_iter()
            .filter(|&(i, _)| coll.get(i).len() == n - 1)
            .filter_map(|(i, b)| Root::new(coll.clone(), i, b).ok())
        {
            for chain in chains_from(coll.len(), root.set_index(), config.depth) {
                let Ok(outcome) = cascade_search_with(u, &root, &chain, limits(config), false) else {
                    continue;
                };
                for (e, trace) in &outcome.found {
                    let Some(origin) = trace.origin else {
                        tally.check(false, coll, || format!("submaximal, chain {chain:?}: {e} is unused"));
                        continue;
                    };
                    let sizes: Vec<usize> = chain[1..].iter().chain([&origin]).map(|&j| coll.get(j).len()).collect();
                    let ok = sizes.iter().all(|&s| {
                        if t_n1 >= 2 {
                            s >= n - 1
                        } else {
                            s == n || Some(s) == istarstar
                        }
                    });
                    tally.check(ok, coll, || {
                        format!(
                            "submaximal, tau {}, chain {chain:?} from {root}: {e} with sizes {sizes:?}, i** {istarstar:?}",
                            pool.tau
                        )
                    });
                }
            }
        }
    }
}

fn overlap_cases(pool: &ExactPool, config: &HarnessConfig, tally: &mut Tally<'_>) {
    let u = &pool.universe;
    let n = u.n();
    let beta = BoundParams::beta_for_girth(n, u.matroid().girth().ok().and_then(|g| g.finite()));
    for (standing, coll) in pool.collections() {
        let t_n1 = coll.signature().get(n - 1);
        let istarstar = coll.istarstar().ok().flatten();
        for root in istar_roots(coll) {
            for chain in chains_from(coll.len(), root.set_index(), config.depth) {
                let Ok(outcome) = cascade_search_with(u, &root, &chain, limits(config), true) else {
                    continue;
                };
                let mut q: BTreeMap<usize, usize> = BTreeMap::new();
                for trace in outcome.found.values() {
                    if let Some(j) = trace.origin {
                        *q.entry(j).or_default() += 1;
                    }
                }
                for (&s, &q) in &q {
                    for other in (0..coll.len()).filter(|j| *j != s && !chain.contains(j)) {
                        let size = coll.get(other).len();
                        let applies = match standing {
                            Standing::Maximal => size < n,
                            _ if t_n1 >= 2 => size + 1 < n,
                            _ => istarstar.is_some_and(|i| size < i),
                        };
                        if !applies {
                            continue;
                        }
                        let meet = coll.get(s).underline().intersection(coll.get(other).underline()).len();
                        tally.check(meet + 2 * beta >= q, coll, || {
                            format!(
                                "{standing:?}, tau {}, chain {chain:?} from {root}: q = {q} in S{s}, \
                                 |S{s} ∩ S{other}| = {meet}, beta {beta}",
                                pool.tau
                            )
                        });
                    }
                }
            }
        }
    }
}
