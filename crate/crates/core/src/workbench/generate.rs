use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::{ElementSet, MAX_ELEMENTS};
use crate::matroid::{FamilySpec, Matroid};
use crate::rainbow::{overlap_kappa, BoundParams};

use super::{Declared, GenError, Instance, Source};

const ATTEMPTS: usize = 200;
const MATROID_ATTEMPTS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Uniform,
    Linear { p: u32 },
    Graphic,
    SparsePaving,
}

impl Family {
    pub const DEFAULT_PRIME: u32 = 3;

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::Linear { .. } => "linear",
            Family::Graphic => "graphic",
            Family::SparsePaving => "sparse-paving",
        }
    }

    /// Uniform and sparse paving matroids have girth at least their rank.
    pub fn is_paving(self) -> bool {
        matches!(self, Family::Uniform | Family::SparsePaving)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Linear { p } if *p != Self::DEFAULT_PRIME => write!(f, "linear:{p}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    /// `uniform`, `graphic`, `sparse-paving`, `linear` (GF(3)) or `linear:<p>`.
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "uniform" => Ok(Family::Uniform),
            "graphic" => Ok(Family::Graphic),
            "sparse-paving" => Ok(Family::SparsePaving),
            "linear" => Ok(Family::Linear { p: Self::DEFAULT_PRIME }),
            _ => {
                let p = s
                    .strip_prefix("linear:")
                    .ok_or_else(|| format!("unknown family `{s}`"))?
                    .parse::<u32>()
                    .map_err(|e| format!("bad prime in `{s}`: {e}"))?;
                if !crate::matroid::is_prime(p) {
                    return Err(format!("{p} is not prime"));
                }
                Ok(Family::Linear { p })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Disjoint,
    Overlapping { kappa: usize },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Disjoint => f.write_str("disjoint"),
            Mode::Overlapping { kappa } => write!(f, "overlapping-k{kappa}"),
        }
    }
}

/// A seeded instance with the default ground-set size for the mode.
pub fn generate_instance(family: Family, n: usize, mode: Mode, seed: u64) -> Result<Instance, GenError> {
    generate_with_ground(family, n, mode, seed, None)
}

/// Default shared ground set for `κ`-overlapping sequences: enough room that every element
/// is needed by at most `κ` bases, with `n` spare elements for the rejection sampler.
pub fn overlapping_ground(n: usize, kappa: usize) -> usize {
    if kappa <= 1 {
        n * n
    } else {
        (n * n).div_ceil(kappa) + n
    }
    .min(n * n)
}

/// As [`generate_instance`], with an explicit ground-set size for overlapping mode.
pub fn generate_with_ground(
    family: Family,
    n: usize,
    mode: Mode,
    seed: u64,
    ground: Option<usize>,
) -> Result<Instance, GenError> {
    if n == 0 {
        return Err(GenError::Infeasible("rank must be at least 1".into()));
    }
    let m = match mode {
        Mode::Disjoint => n * n,
        Mode::Overlapping { kappa: 0 } => return Err(GenError::Infeasible("kappa must be at least 1".into())),
        Mode::Overlapping { kappa } => {
            let m = ground.unwrap_or_else(|| overlapping_ground(n, kappa));
            if m < n {
                return Err(GenError::Infeasible(format!("ground set {m} is smaller than rank {n}")));
            }
            if m * kappa < n * n {
                return Err(GenError::Infeasible(format!(
                    "kappa={kappa} with m={m}: {n} bases need {} element slots, only {} exist",
                    n * n,
                    m * kappa
                )));
            }
            m
        }
    };
    if m > MAX_ELEMENTS {
        return Err(GenError::Infeasible(format!("ground set {m} exceeds the {MAX_ELEMENTS}-element cap")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (spec, bases) = match mode {
        Mode::Disjoint => disjoint(family, n, &mut rng)?,
        Mode::Overlapping { kappa } => overlapping(family, n, m, kappa, &mut rng)?,
    };
    let matroid = Matroid::build(spec.clone()).map_err(|e| GenError::Infeasible(e.to_string()))?;
    let kappa = match mode {
        Mode::Disjoint => 1,
        Mode::Overlapping { kappa } => kappa,
    };
    debug_assert!(overlap_kappa(&bases) <= kappa);
    let beta = matroid
        .girth()
        .ok()
        .map(|g| BoundParams::beta_for_girth(n, g.finite()));
    let instance = Instance {
        matroid: spec,
        bases,
        declared: Declared {
            beta,
            kappa: Some(kappa),
        },
        provenance: Some(Source {
            generator: format!("{family}-{mode}"),
            seed,
        }),
    };
    instance.validate().map_err(|e| GenError::Infeasible(e.to_string()))?;
    Ok(instance)
}

fn blocks(n: usize) -> Vec<ElementSet> {
    (0..n).map(|c| (c * n..(c + 1) * n).collect()).collect()
}

fn disjoint(family: Family, n: usize, rng: &mut ChaCha8Rng) -> Result<(FamilySpec, Vec<ElementSet>), GenError> {
    let m = n * n;
    match family {
        Family::Uniform => Ok((FamilySpec::Uniform { k: n, m }, blocks(n))),
        Family::Linear { p } => {
            let mut rows = vec![vec![0u32; m]; n];
            for c in 0..n {
                let block = invertible(p, n, rng)?;
                for (r, row) in block.into_iter().enumerate() {
                    rows[r][c * n..(c + 1) * n].copy_from_slice(&row);
                }
            }
            Ok((FamilySpec::Linear { p, m, rows }, blocks(n)))
        }
        Family::Graphic => {
            let vertices = n + 1;
            let edges: Vec<[usize; 2]> = (0..n).flat_map(|_| spanning_tree(vertices, rng)).collect();
            Ok((FamilySpec::Graphic { vertices, edges }, blocks(n)))
        }
        Family::SparsePaving => {
            let bases = blocks(n);
            let hyperplanes = circuit_hyperplanes(n, m, &bases, rng);
            Ok((FamilySpec::SparsePaving { k: n, m, hyperplanes }, bases))
        }
    }
}

fn overlapping(
    family: Family,
    n: usize,
    m: usize,
    kappa: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(FamilySpec, Vec<ElementSet>), GenError> {
    // a sampled matroid may admit no such sequence at all (a cut edge needed by every
    // spanning tree, say), so the matroid is resampled too
    for _ in 0..MATROID_ATTEMPTS {
        let spec = overlapping_matroid(family, n, m, rng)?;
        let matroid = Matroid::build(spec.clone()).map_err(|e| GenError::Infeasible(e.to_string()))?;
        if let Some(bases) = sample_bases(&matroid, n, kappa, rng) {
            return Ok((spec, bases));
        }
    }
    Err(GenError::Infeasible(format!(
        "no {kappa}-overlapping base sequence found for {family} n={n} m={m}"
    )))
}

fn overlapping_matroid(family: Family, n: usize, m: usize, rng: &mut ChaCha8Rng) -> Result<FamilySpec, GenError> {
    Ok(match family {
        Family::Uniform => FamilySpec::Uniform { k: n, m },
        Family::Linear { p } => {
            let mut found = None;
            for _ in 0..ATTEMPTS {
                let rows: Vec<Vec<u32>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..p)).collect()).collect();
                let spec = FamilySpec::Linear { p, m, rows };
                if Matroid::build(spec.clone()).is_ok_and(|mat| mat.rank() == n) {
                    found = Some(spec);
                    break;
                }
            }
            found.ok_or_else(|| GenError::Infeasible(format!("no rank-{n} matrix over GF({p}) found")))?
        }
        Family::Graphic => {
            let vertices = n + 1;
            let mut edges = spanning_tree(vertices, rng);
            while edges.len() < m {
                let a = rng.gen_range(0..vertices);
                let b = rng.gen_range(0..vertices);
                if a != b {
                    edges.push([a.min(b), a.max(b)]);
                }
            }
            edges.shuffle(rng);
            FamilySpec::Graphic { vertices, edges }
        }
        Family::SparsePaving => {
            let hyperplanes = circuit_hyperplanes(n, m, &[], rng);
            FamilySpec::SparsePaving { k: n, m, hyperplanes }
        }
    })
}

/// Random greedy bases, least-loaded elements first, rejecting any attempt that would put an
/// element in more than `kappa` bases.
fn sample_bases(matroid: &Matroid, n: usize, kappa: usize, rng: &mut ChaCha8Rng) -> Option<Vec<ElementSet>> {
    let m = matroid.ground_size();
    'attempt: for _ in 0..ATTEMPTS {
        let mut load = vec![0usize; m];
        let mut bases = Vec::with_capacity(n);
        for _ in 0..n {
            let mut order: Vec<usize> = (0..m).filter(|&x| load[x] < kappa).collect();
            order.shuffle(rng);
            order.sort_by_key(|&x| load[x]);
            let mut b = ElementSet::new();
            for x in order {
                if b.len() == n {
                    break;
                }
                if matroid.independent(&b.with(x)) {
                    b.insert(x);
                }
            }
            if b.len() < n {
                continue 'attempt;
            }
            for x in b.iter() {
                load[x] += 1;
            }
            bases.push(b);
        }
        return Some(bases);
    }
    None
}

/// Uniform random spanning tree of the complete graph (Aldous-Broder walk).
fn spanning_tree(vertices: usize, rng: &mut ChaCha8Rng) -> Vec<[usize; 2]> {
    let mut seen = vec![false; vertices];
    let mut at = rng.gen_range(0..vertices);
    seen[at] = true;
    let mut edges = Vec::with_capacity(vertices - 1);
    while edges.len() + 1 < vertices {
        let mut next = rng.gen_range(0..vertices - 1);
        if next >= at {
            next += 1;
        }
        if !seen[next] {
            seen[next] = true;
            edges.push([at.min(next), at.max(next)]);
        }
        at = next;
    }
    edges
}

fn invertible(p: u32, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec<u32>>, GenError> {
    for _ in 0..ATTEMPTS {
        let rows: Vec<Vec<u32>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..p)).collect()).collect();
        let spec = FamilySpec::Linear { p, m: n, rows: rows.clone() };
        if Matroid::build(spec).is_ok_and(|mat| mat.rank() == n) {
            return Ok(rows);
        }
    }
    Err(GenError::Infeasible(format!("no invertible {n}x{n} matrix over GF({p}) found")))
}

/// Random `k`-sets pairwise meeting in at most `k-2` elements, avoiding the given bases.
fn circuit_hyperplanes(k: usize, m: usize, avoid: &[ElementSet], rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    if k < 2 || m <= k {
        return Vec::new();
    }
    let target = rng.gen_range(0..=k);
    let mut chosen: Vec<ElementSet> = Vec::new();
    for _ in 0..50 * k {
        if chosen.len() == target {
            break;
        }
        let h: ElementSet = sample(rng, m, k).into_iter().collect();
        if avoid.contains(&h) || chosen.iter().any(|c| c.intersection(&h).len() + 2 > k) {
            continue;
        }
        chosen.push(h);
    }
    chosen.iter().map(ElementSet::to_vec).collect()
}
