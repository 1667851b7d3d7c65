use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::ModelError;

/// Counts of sets by size: entry `i-1` is the number of sets of size `i`, for `i` in `1..=n`.
///
/// Signatures are ordered by comparing the size-`n` entry first, then `n-1`, and so on,
/// so more rainbow bases always wins and ties are broken by the larger partial sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    counts: Vec<usize>,
}

impl Signature {
    pub fn new(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    pub fn zeros(n: usize) -> Self {
        Self { counts: vec![0; n] }
    }

    /// Signature of a family of sets with the given sizes; empty sets are not counted.
    pub fn from_sizes(n: usize, sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = vec![0; n];
        for s in sizes {
            assert!(s <= n, "set of size {s} exceeds rank {n}");
            if s > 0 {
                counts[s - 1] += 1;
            }
        }
        Self { counts }
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// `τ_i`, for `1 <= i <= n`.
    pub fn get(&self, i: usize) -> usize {
        assert!((1..=self.n()).contains(&i), "signature index {i} out of 1..={}", self.n());
        self.counts[i - 1]
    }

    pub(crate) fn bump(&mut self, size: usize, up: bool) {
        if size == 0 {
            return;
        }
        if up {
            self.counts[size - 1] += 1;
        } else {
            self.counts[size - 1] -= 1;
        }
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.counts
    }

    /// Number of non-empty sets counted.
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Number of rainbow bases, `τ_n`.
    pub fn full(&self) -> usize {
        self.counts.last().copied().unwrap_or(0)
    }

    /// Largest non-full size present among `eta` slots, where slots beyond the counted
    /// sets are empty. `None` when every slot is full.
    pub fn istar(&self, eta: usize) -> Option<usize> {
        let n = self.n();
        (1..n)
            .rev()
            .find(|&i| self.get(i) > 0)
            .or_else(|| (self.total() < eta).then_some(0))
    }
}

/// Compares two signatures, last coordinate first.
pub fn lex_compare(a: &Signature, b: &Signature) -> Result<Ordering, ModelError> {
    if a.n() != b.n() {
        return Err(ModelError::LengthMismatch(a.n(), b.n()));
    }
    Ok(a.counts.iter().rev().cmp(b.counts.iter().rev()))
}

impl Ord for Signature {
    /// Signatures of different lengths are ordered by length first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n()
            .cmp(&other.n())
            .then_with(|| self.counts.iter().rev().cmp(other.counts.iter().rev()))
    }
}

impl PartialOrd for Signature {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Signature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let inner = s
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| format!("signature `{s}` must be parenthesised"))?;
        let counts = inner
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad count `{t}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if counts.is_empty() {
            return Err("empty signature".into());
        }
        Ok(Self { counts })
    }
}

/// Whether a maximality judgement rests on an exhaustive search or on the best signature seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Exact,
    Heuristic,
}

/// The reference signature `τ_η` for collections of at most `eta` sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaReference {
    pub eta: usize,
    pub tau: Signature,
    pub provenance: Provenance,
}

/// How a signature relates to the reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Standing {
    Maximal,
    Submaximal,
    Other,
}

/// A classification together with the provenance of the reference it was made against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Classification {
    pub standing: Standing,
    pub provenance: Provenance,
}

impl EtaReference {
    pub fn new(eta: usize, tau: Signature, provenance: Provenance) -> Self {
        Self {
            eta,
            tau,
            provenance,
        }
    }

    /// The submaximal signature, when defined.
    pub fn submaximal(&self) -> Result<Signature, ModelError> {
        submaximal_signatures(&self.tau, self.eta).map(|mut v| v.remove(0))
    }

    pub fn classify(&self, sig: &Signature) -> Classification {
        let standing = if is_eta_maximal(sig, &self.tau) {
            Standing::Maximal
        } else if is_eta_submaximal(sig, &self.tau, self.eta) {
            Standing::Submaximal
        } else {
            Standing::Other
        };
        Classification {
            standing,
            provenance: self.provenance,
        }
    }
}

/// The signatures reachable from `tau` by deleting one element of a rainbow basis and adding
/// one element to a set of size `i*`. There is exactly one, selected by `i*`:
///
/// - `i* = n-2`: `(.., t_{n-2}-1, 2, t_n-1)`
/// - `i* = n-3`: `(.., t_{n-3}-1, 1, 1, t_n-1)`
/// - `i* <= n-4`: `(.., t_{i*}-1, 1, 0, .., 0, 1, t_n-1)`
///
/// The middle case is often printed with a last coordinate of `t_{n-1}`; since `t_{n-1} = 0`
/// here and one rainbow basis loses an element, the last coordinate is `t_n - 1` as in the
/// other two cases. Empty slots (size 0) count toward `eta`.
pub fn submaximal_signatures(tau: &Signature, eta: usize) -> Result<Vec<Signature>, ModelError> {
    let n = tau.n();
    let undefined = |reason: &str| ModelError::SubmaximalUndefined(reason.to_string());
    if n < 2 {
        return Err(undefined("rank below 2"));
    }
    if tau.full() == 0 {
        return Err(undefined("t_n = 0"));
    }
    if tau.get(n - 1) != 0 {
        return Err(undefined("t_{n-1} != 0"));
    }
    let istar = tau
        .istar(eta)
        .ok_or_else(|| undefined("i* undefined: every slot holds a rainbow basis"))?;
    let mut out = tau.counts.clone();
    // out[i-1] is t_i; index 0 (empty sets) lives outside the vector
    let dec = |i: usize, out: &mut Vec<usize>| {
        if i > 0 {
            out[i - 1] -= 1;
        }
    };
    if istar + 2 == n {
        dec(istar, &mut out);
        out[n - 2] = 2;
    } else if istar + 3 == n {
        dec(istar, &mut out);
        out[n - 3] = 1;
        out[n - 2] = 1;
    } else {
        dec(istar, &mut out);
        out[istar] = 1;
        for v in out.iter_mut().take(n - 2).skip(istar + 1) {
            *v = 0;
        }
        out[n - 2] = 1;
    }
    out[n - 1] -= 1;
    Ok(vec![Signature::new(out)])
}

pub fn is_eta_maximal(sig: &Signature, tau: &Signature) -> bool {
    sig == tau
}

pub fn is_eta_submaximal(sig: &Signature, tau: &Signature, eta: usize) -> bool {
    submaximal_signatures(tau, eta).is_ok_and(|v| v.contains(sig))
}
