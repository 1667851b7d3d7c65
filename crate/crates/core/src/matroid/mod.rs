//! Finite matroids given by an independence oracle.
//!
//! Four concrete families sit behind one [`Matroid`] value: uniform, linear over a
//! prime field, graphic (cycle matroids of multigraphs) and sparse paving matroids
//! described by their circuit-hyperplanes. Rank, closure and circuits are derived
//! from the oracle; per-family rank shortcuts must agree with [`Matroid::greedy_rank`].

mod gfp;
mod graphic;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::{ElementSet, MAX_ELEMENTS};

pub use gfp::is_prime;
pub use graphic::shortest_cycle;

/// Default ground-set size up to which girth may be found by subset enumeration.
pub const DEFAULT_GIRTH_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatroidError {
    #[error("invalid {family} matroid: {reason}")]
    InvalidSpec { family: &'static str, reason: String },
    #[error("element {element} is outside the ground set of size {ground}")]
    ElementOutOfRange { element: usize, ground: usize },
    #[error("set is independent, so it contains no circuit")]
    NotDependent,
    #[error("distinguished element {0} is not in the set")]
    NotInSet(usize),
    #[error("girth-too-expensive: ground set of {ground} elements exceeds exhaustive cap {cap}")]
    GirthTooExpensive { ground: usize, cap: usize },
}

/// How a matroid is described on disk and in memory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "kebab-case")]
pub enum FamilySpec {
    /// U(k, m): every set of at most `k` elements is independent.
    Uniform { k: usize, m: usize },
    /// Columns of a `rows.len() x m` matrix over GF(p).
    Linear { p: u32, m: usize, rows: Vec<Vec<u32>> },
    /// Cycle matroid; element `i` is `edges[i]`.
    Graphic {
        vertices: usize,
        edges: Vec<[usize; 2]>,
    },
    /// Rank-`k` sparse paving matroid whose listed `k`-sets are exactly its circuit-hyperplanes.
    SparsePaving {
        k: usize,
        m: usize,
        hyperplanes: Vec<Vec<usize>>,
    },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Uniform { .. } => "uniform",
            FamilySpec::Linear { .. } => "linear",
            FamilySpec::Graphic { .. } => "graphic",
            FamilySpec::SparsePaving { .. } => "sparse-paving",
        }
    }

    pub fn ground_size(&self) -> usize {
        match self {
            FamilySpec::Uniform { m, .. }
            | FamilySpec::Linear { m, .. }
            | FamilySpec::SparsePaving { m, .. } => *m,
            FamilySpec::Graphic { edges, .. } => edges.len(),
        }
    }
}

/// Size of a smallest circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Girth::Finite(g) => Some(g),
            Girth::Infinite => None,
        }
    }

    /// Whether the girth is at least `bound`.
    pub fn at_least(self, bound: usize) -> bool {
        match self {
            Girth::Finite(g) => g >= bound,
            Girth::Infinite => true,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Uniform {
        k: usize,
    },
    Linear(gfp::ColumnMatrix),
    Graphic {
        vertices: usize,
        edges: Vec<[usize; 2]>,
    },
    SparsePaving {
        k: usize,
        hyperplanes: HashSet<ElementSet>,
    },
}

/// An immutable matroid on the ground set `0..m`.
#[derive(Clone, Debug)]
pub struct Matroid {
    spec: FamilySpec,
    ground: usize,
    rank: usize,
    repr: Repr,
}

impl PartialEq for Matroid {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}

impl Eq for Matroid {}

fn invalid(family: &'static str, reason: impl Into<String>) -> MatroidError {
    MatroidError::InvalidSpec {
        family,
        reason: reason.into(),
    }
}

impl Matroid {
    /// Validates a family description and builds its oracle.
    pub fn build(spec: FamilySpec) -> Result<Self, MatroidError> {
        let family = spec.name();
        let ground = spec.ground_size();
        if ground == 0 {
            return Err(invalid(family, "ground set must be non-empty"));
        }
        if ground > MAX_ELEMENTS {
            return Err(invalid(
                family,
                format!("ground set of {ground} exceeds the {MAX_ELEMENTS}-element cap"),
            ));
        }
        let repr = match &spec {
            FamilySpec::Uniform { k, m } => {
                if k > m {
                    return Err(invalid(family, format!("rank k={k} exceeds m={m}")));
                }
                Repr::Uniform { k: *k }
            }
            FamilySpec::Linear { p, m, rows } => {
                if !gfp::is_prime(*p) {
                    return Err(invalid(family, format!("p={p} is not prime")));
                }
                if *p > 65_521 {
                    return Err(invalid(family, format!("p={p} exceeds 65521")));
                }
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != *m {
                        return Err(invalid(
                            family,
                            format!("row {i} has {} entries, expected m={m}", row.len()),
                        ));
                    }
                    if let Some((j, v)) = row.iter().enumerate().find(|(_, &v)| v >= *p) {
                        return Err(invalid(
                            family,
                            format!("entry ({i},{j})={v} is not reduced mod p={p}"),
                        ));
                    }
                }
                Repr::Linear(gfp::ColumnMatrix::from_rows(*p, rows, *m))
            }
            FamilySpec::Graphic { vertices, edges } => {
                if *vertices == 0 {
                    return Err(invalid(family, "graph needs at least one vertex"));
                }
                if let Some((i, e)) = edges
                    .iter()
                    .enumerate()
                    .find(|(_, e)| e[0] >= *vertices || e[1] >= *vertices)
                {
                    return Err(invalid(
                        family,
                        format!("edge {i} = {e:?} references a vertex >= {vertices}"),
                    ));
                }
                Repr::Graphic {
                    vertices: *vertices,
                    edges: edges.clone(),
                }
            }
            FamilySpec::SparsePaving { k, m, hyperplanes } => {
                if *k > *m {
                    return Err(invalid(family, format!("rank k={k} exceeds m={m}")));
                }
                let mut sets = HashSet::new();
                let mut ordered = Vec::with_capacity(hyperplanes.len());
                for (i, h) in hyperplanes.iter().enumerate() {
                    let set: ElementSet = h.iter().copied().filter(|&e| e < *m).collect();
                    if h.iter().any(|&e| e >= *m) {
                        return Err(invalid(
                            family,
                            format!("hyperplane {i} references an element >= m={m}"),
                        ));
                    }
                    if set.len() != *k || h.len() != *k {
                        return Err(invalid(
                            family,
                            format!("hyperplane {i} must list exactly k={k} distinct elements"),
                        ));
                    }
                    if *k == 0 {
                        return Err(invalid(family, "rank 0 admits no circuit-hyperplanes"));
                    }
                    if !sets.insert(set) {
                        return Err(invalid(family, format!("hyperplane {i} is listed twice")));
                    }
                    ordered.push(set);
                }
                for i in 0..ordered.len() {
                    for j in i + 1..ordered.len() {
                        let common = ordered[i].intersection(&ordered[j]).len();
                        if common + 2 > *k {
                            return Err(invalid(
                                family,
                                format!(
                                    "hyperplanes {i} and {j} share {common} elements, more than k-2"
                                ),
                            ));
                        }
                    }
                }
                if *m == *k && !ordered.is_empty() {
                    return Err(invalid(
                        family,
                        "listing the whole ground set leaves no base of size k",
                    ));
                }
                Repr::SparsePaving {
                    k: *k,
                    hyperplanes: sets,
                }
            }
        };
        let mut matroid = Matroid {
            spec,
            ground,
            rank: 0,
            repr,
        };
        matroid.rank = matroid.fast_rank(&ElementSet::full(ground));
        Ok(matroid)
    }

    pub fn uniform(k: usize, m: usize) -> Result<Self, MatroidError> {
        Self::build(FamilySpec::Uniform { k, m })
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn ground_size(&self) -> usize {
        self.ground
    }

    pub fn ground_set(&self) -> ElementSet {
        ElementSet::full(self.ground)
    }

    /// Rank of the whole matroid.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn check_subset(&self, a: &ElementSet) -> Result<(), MatroidError> {
        match a.max_element() {
            Some(e) if e >= self.ground => Err(MatroidError::ElementOutOfRange {
                element: e,
                ground: self.ground,
            }),
            _ => Ok(()),
        }
    }

    pub fn is_independent(&self, a: &ElementSet) -> Result<bool, MatroidError> {
        self.check_subset(a)?;
        Ok(self.independent(a))
    }

    /// Oracle query without the range check; `a` must lie inside the ground set.
    pub fn independent(&self, a: &ElementSet) -> bool {
        debug_assert!(self.check_subset(a).is_ok());
        match &self.repr {
            Repr::Uniform { k } => a.len() <= *k,
            Repr::Linear(mat) => a.len() <= mat.rows() && mat.independent_columns(a.iter()),
            Repr::Graphic { vertices, edges } => graphic::is_forest(*vertices, edges, a),
            Repr::SparsePaving { k, hyperplanes } => {
                let len = a.len();
                len < *k || (len == *k && !hyperplanes.contains(a))
            }
        }
    }

    pub fn rank_of(&self, a: &ElementSet) -> Result<usize, MatroidError> {
        self.check_subset(a)?;
        Ok(self.fast_rank(a))
    }

    fn fast_rank(&self, a: &ElementSet) -> usize {
        match &self.repr {
            Repr::Uniform { k } => a.len().min(*k),
            Repr::Linear(mat) => mat.rank_of_columns(a.iter()),
            Repr::Graphic { vertices, edges } => graphic::forest_rank(*vertices, edges, a),
            Repr::SparsePaving { k, hyperplanes } => {
                let len = a.len();
                if len < *k {
                    len
                } else if len == *k && hyperplanes.contains(a) {
                    k - 1
                } else {
                    // a (k+1)-set contains at most one circuit-hyperplane
                    *k
                }
            }
        }
    }

    /// Rank by the greedy scan, valid in every matroid.
    pub fn greedy_rank(&self, a: &ElementSet) -> usize {
        let mut basis = ElementSet::new();
        for e in a {
            let grown = basis.with(e);
            if self.independent(&grown) {
                basis = grown;
            }
        }
        basis.len()
    }

    pub fn closure(&self, a: &ElementSet) -> Result<ElementSet, MatroidError> {
        self.check_subset(a)?;
        let r = self.fast_rank(a);
        Ok((0..self.ground)
            .filter(|&e| a.contains(e) || self.fast_rank(&a.with(e)) == r)
            .collect())
    }

    /// A circuit inside the dependent set `a`, found by deleting elements while the
    /// remainder stays dependent. When `through` is given and `a - through` is
    /// independent, the circuit contains `through`.
    pub fn find_circuit(
        &self,
        a: &ElementSet,
        through: Option<usize>,
    ) -> Result<ElementSet, MatroidError> {
        self.check_subset(a)?;
        if let Some(x) = through {
            if !a.contains(x) {
                return Err(MatroidError::NotInSet(x));
            }
        }
        if self.independent(a) {
            return Err(MatroidError::NotDependent);
        }
        let mut circuit = *a;
        for e in a {
            if Some(e) == through {
                continue;
            }
            let smaller = circuit.without(e);
            if !self.independent(&smaller) {
                circuit = smaller;
            }
        }
        Ok(circuit)
    }

    pub fn girth(&self) -> Result<Girth, MatroidError> {
        self.girth_with_cap(DEFAULT_GIRTH_CAP)
    }

    pub fn girth_with_cap(&self, cap: usize) -> Result<Girth, MatroidError> {
        match &self.repr {
            Repr::Uniform { k } => Ok(uniform_girth(*k, self.ground)),
            Repr::SparsePaving { k, hyperplanes } if !hyperplanes.is_empty() => {
                Ok(Girth::Finite(*k))
            }
            Repr::SparsePaving { k, .. } => Ok(uniform_girth(*k, self.ground)),
            Repr::Graphic { vertices, edges } => Ok(graphic::shortest_cycle(*vertices, edges)
                .map_or(Girth::Infinite, Girth::Finite)),
            Repr::Linear(_) if self.rank == self.ground => Ok(Girth::Infinite),
            Repr::Linear(_) => {
                if self.ground > cap {
                    return Err(MatroidError::GirthTooExpensive {
                        ground: self.ground,
                        cap,
                    });
                }
                Ok(self.exhaustive_girth())
            }
        }
    }

    /// Girth by scanning subsets in order of size; exponential in the ground set.
    pub fn exhaustive_girth(&self) -> Girth {
        for size in 1..=self.ground.min(self.rank + 1) {
            let mut found = false;
            for_each_subset(self.ground, size, &mut |s| {
                if !self.independent(s) {
                    found = true;
                }
                !found
            });
            if found {
                return Girth::Finite(size);
            }
        }
        Girth::Infinite
    }
}

fn uniform_girth(k: usize, m: usize) -> Girth {
    if m > k {
        Girth::Finite(k + 1)
    } else {
        Girth::Infinite
    }
}

/// Calls `visit` on every `size`-subset of `0..m` in lexicographic order until it returns false.
pub fn for_each_subset(m: usize, size: usize, visit: &mut dyn FnMut(&ElementSet) -> bool) {
    fn go(
        start: usize,
        m: usize,
        left: usize,
        cur: &mut ElementSet,
        visit: &mut dyn FnMut(&ElementSet) -> bool,
    ) -> bool {
        if left == 0 {
            return visit(cur);
        }
        for e in start..=m - left {
            cur.insert(e);
            let more = go(e + 1, m, left - 1, cur, visit);
            cur.remove(e);
            if !more {
                return false;
            }
        }
        true
    }
    if size > m {
        return;
    }
    let mut cur = ElementSet::new();
    go(0, m, size, &mut cur, visit);
}
