use std::collections::HashMap;

use crate::rainbow::{Collection, Ris, Signature, Universe};

use super::enumerate::{enumerate_ris, UniverseIndex};
use super::{Meter, OracleBudget, OracleError};

/// Sizes sorted descending, padded with zeros to the number of slots. Lexicographic order on
/// these coincides with the signature order.
type Profile = Vec<u8>;

struct TauSearch<'a> {
    sets: &'a [(u64, u8)],
    memo: HashMap<(u64, usize), (Profile, Option<usize>)>,
    meter: Meter,
}

impl TauSearch<'_> {
    /// Best profile for `slots` sets inside `avail`, plus the first set of one witness.
    fn best(&mut self, avail: u64, slots: usize) -> Result<Profile, OracleError> {
        if slots == 0 || avail == 0 {
            return Ok(vec![0; slots]);
        }
        if let Some((p, _)) = self.memo.get(&(avail, slots)) {
            return Ok(p.clone());
        }
        self.meter.tick()?;
        let mut best: Profile = vec![0; slots];
        let mut pick = None;
        for (i, &(m, size)) in self.sets.iter().enumerate() {
            if size < best[0] {
                break;
            }
            if m & avail != m {
                continue;
            }
            let rest = avail & !m;
            if optimistic(size, rest.count_ones() as usize, slots) <= best {
                continue;
            }
            let mut p = vec![size];
            p.extend(self.best(rest, slots - 1)?);
            p.sort_unstable_by(|a, b| b.cmp(a));
            if p > best {
                best = p;
                pick = Some(i);
            }
        }
        self.memo.insert((avail, slots), (best.clone(), pick));
        Ok(best)
    }

    fn witness(&self, mut avail: u64, mut slots: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while slots > 0 {
            let Some(&(_, Some(i))) = self.memo.get(&(avail, slots)) else {
                break;
            };
            out.push(i);
            avail &= !self.sets[i].0;
            slots -= 1;
        }
        out
    }
}

/// Lex-largest profile a first set of size `first` could lead to, given `elements` coloured
/// elements left for the other `slots - 1` sets, none larger than `first`.
fn optimistic(first: u8, mut elements: usize, slots: usize) -> Profile {
    let mut p = vec![first];
    for _ in 1..slots {
        let s = elements.min(first as usize);
        p.push(s as u8);
        elements -= s;
    }
    p
}

/// `τ_η` by exhaustive search over collections of at most `eta` disjoint RIS's, memoised on
/// (unused coloured elements, slots left), with one witness padded to `eta` sets by empty sets.
pub fn brute_force_tau_eta(
    universe: &Universe,
    eta: usize,
    budget: &OracleBudget,
) -> Result<(Signature, Collection), OracleError> {
    let ris = sorted_ris(universe, budget)?;
    let idx = UniverseIndex::new(universe);
    let sets: Vec<(u64, u8)> = ris.iter().map(|r| (idx.mask(r), r.len() as u8)).collect();
    let mut search = TauSearch {
        sets: &sets,
        memo: HashMap::new(),
        meter: budget.meter(),
    };
    let profile = search.best(idx.all(), eta)?;
    let mut members: Vec<Ris> = search
        .witness(idx.all(), eta)
        .into_iter()
        .map(|i| ris[i].clone())
        .collect();
    members.resize(eta, Ris::empty());
    let witness = Collection::new(universe, members).expect("witness sets are disjoint RIS's");
    let tau = Signature::from_sizes(universe.n(), profile.iter().map(|&s| s as usize));
    debug_assert_eq!(witness.signature(), &tau);
    Ok((tau, witness))
}

/// Every collection of `eta` slots whose signature is `sig`, up to `limit` of them.
///
/// Collections are canonical: sets by size descending, equal sizes by enumeration order,
/// empty slots last. Two results never hold the same family of sets.
pub fn collections_with_signature(
    universe: &Universe,
    eta: usize,
    sig: &Signature,
    limit: usize,
    budget: &OracleBudget,
) -> Result<Vec<Collection>, OracleError> {
    assert_eq!(sig.n(), universe.n(), "signature length must equal the rank");
    assert!(sig.total() <= eta, "signature {sig} has more than {eta} sets");
    let ris = sorted_ris(universe, budget)?;
    let idx = UniverseIndex::new(universe);
    let masks: Vec<u64> = ris.iter().map(|r| idx.mask(r)).collect();
    let mut sizes: Vec<usize> = Vec::new();
    for i in (1..=sig.n()).rev() {
        sizes.extend(std::iter::repeat_n(i, sig.get(i)));
    }
    // first index of each size in the sorted list
    let start = |size: usize| ris.iter().position(|r| r.len() == size).unwrap_or(ris.len());
    let starts: Vec<usize> = (0..=universe.n()).map(start).collect();
    let mut meter = budget.meter();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    let mut ctx = Listing {
        ris: &ris,
        masks: &masks,
        sizes: &sizes,
        starts: &starts,
        limit,
        out: &mut out,
        universe,
        eta,
    };
    ctx.run(0, idx.all(), 0, &mut chosen, &mut meter)?;
    Ok(out)
}

struct Listing<'a> {
    ris: &'a [Ris],
    masks: &'a [u64],
    sizes: &'a [usize],
    starts: &'a [usize],
    limit: usize,
    out: &'a mut Vec<Collection>,
    universe: &'a Universe,
    eta: usize,
}

impl Listing<'_> {
    fn run(
        &mut self,
        depth: usize,
        avail: u64,
        from: usize,
        chosen: &mut Vec<usize>,
        meter: &mut Meter,
    ) -> Result<(), OracleError> {
        meter.tick()?;
        if self.out.len() >= self.limit {
            return Ok(());
        }
        if depth == self.sizes.len() {
            let mut sets: Vec<Ris> = chosen.iter().map(|&i| self.ris[i].clone()).collect();
            sets.resize(self.eta, Ris::empty());
            self.out
                .push(Collection::new(self.universe, sets).expect("listed sets are disjoint RIS's"));
            return Ok(());
        }
        let size = self.sizes[depth];
        let lo = if depth > 0 && self.sizes[depth - 1] == size {
            from
        } else {
            self.starts[size]
        };
        for i in lo..self.ris.len() {
            if self.ris[i].len() != size {
                break;
            }
            let m = self.masks[i];
            if m & avail != m {
                continue;
            }
            chosen.push(i);
            self.run(depth + 1, avail & !m, i + 1, chosen, meter)?;
            chosen.pop();
        }
        Ok(())
    }
}

/// Nonempty RIS's, largest first; ties keep enumeration order.
fn sorted_ris(universe: &Universe, budget: &OracleBudget) -> Result<Vec<Ris>, OracleError> {
    let mut ris = enumerate_ris(universe, budget)?;
    ris.sort_by_key(|r| std::cmp::Reverse(r.len()));
    Ok(ris)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::ElementSet;
    use crate::matroid::Matroid;
    use crate::rainbow::lex_compare;
    use crate::rainbow::ColouredElement;

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    fn u22() -> Universe {
        Universe::new(Matroid::uniform(2, 2).unwrap(), vec![set(&[0, 1]), set(&[0, 1])]).unwrap()
    }

    fn blocks(n: usize) -> Universe {
        let bases: Vec<ElementSet> = (0..n).map(|c| (c * n..(c + 1) * n).collect()).collect();
        Universe::new(Matroid::uniform(n, n * n).unwrap(), bases).unwrap()
    }

    #[test]
    fn u22_eta_two_packs_both_bases() {
        let (tau, w) = brute_force_tau_eta(&u22(), 2, &OracleBudget::default()).unwrap();
        assert_eq!(tau, Signature::new(vec![0, 2]));
        assert_eq!(w.signature(), &tau);
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn eta_one_is_a_single_largest_set() {
        let (tau, w) = brute_force_tau_eta(&blocks(3), 1, &OracleBudget::default()).unwrap();
        assert_eq!(tau, Signature::new(vec![0, 0, 1]));
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn witness_is_padded() {
        let (tau, w) = brute_force_tau_eta(&blocks(2), 4, &OracleBudget::default()).unwrap();
        assert_eq!(tau, Signature::new(vec![0, 2]));
        assert_eq!(w.len(), 4);
        assert!(w.get(3).is_empty());
    }

    #[test]
    fn restriction_leaves_partial_sets() {
        // drop (0,1) and (1,1): colour 1 is gone, every set has size at most 2
        let u = blocks(3).restricted(&[ColouredElement::new(0, 1), ColouredElement::new(1, 1)]);
        let (tau, _) = brute_force_tau_eta(&u, 3, &OracleBudget::default()).unwrap();
        assert_eq!(tau, Signature::new(vec![0, 2, 1]));
    }

    #[test]
    fn monotone_in_eta() {
        let u = blocks(3).restricted(&[ColouredElement::new(0, 1)]);
        let b = OracleBudget::default();
        let mut prev = Signature::zeros(3);
        for eta in 1..=4 {
            let (tau, _) = brute_force_tau_eta(&u, eta, &b).unwrap();
            assert!(lex_compare(&tau, &prev).unwrap().is_ge(), "eta {eta}: {tau} < {prev}");
            prev = tau;
        }
    }

    #[test]
    fn listing_matches_tau() {
        let u = u22();
        let b = OracleBudget::default();
        let (tau, _) = brute_force_tau_eta(&u, 2, &b).unwrap();
        let all = collections_with_signature(&u, 2, &tau, usize::MAX, &b).unwrap();
        // {(0,1),(1,2)} with {(0,2),(1,1)} is the only packing
        assert_eq!(all.len(), 1);
        let one = collections_with_signature(&u, 2, &Signature::new(vec![1, 1]), usize::MAX, &b).unwrap();
        // an RB plus one of its complement's two elements: 2 RBs x 2 singletons
        assert_eq!(one.len(), 4);
        for c in &one {
            assert_eq!(c.signature(), &Signature::new(vec![1, 1]));
        }
    }
}
