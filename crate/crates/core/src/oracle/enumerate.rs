use std::collections::HashMap;

use crate::bitset::ElementSet;
use crate::rainbow::{ColouredElement, Ris, Universe};

use super::{Meter, OracleBudget, OracleError};

/// Positions of the coloured elements of a universe (at most 64) as bits of a `u64`.
#[derive(Clone, Debug)]
pub struct UniverseIndex {
    elements: Vec<ColouredElement>,
    position: HashMap<ColouredElement, usize>,
    colour_masks: Vec<u64>,
}

impl UniverseIndex {
    pub fn new(universe: &Universe) -> Self {
        let elements: Vec<ColouredElement> = universe.elements().collect();
        assert!(elements.len() <= 64, "universe too large for u64 masks");
        let position = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut colour_masks = vec![0u64; universe.n()];
        for (i, e) in elements.iter().enumerate() {
            colour_masks[e.c - 1] |= 1 << i;
        }
        Self {
            elements,
            position,
            colour_masks,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, i: usize) -> ColouredElement {
        self.elements[i]
    }

    pub fn position(&self, e: ColouredElement) -> Option<usize> {
        self.position.get(&e).copied()
    }

    /// Bits of the colour-`c` elements.
    pub fn colour_mask(&self, c: usize) -> u64 {
        self.colour_masks[c - 1]
    }

    pub fn all(&self) -> u64 {
        if self.elements.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.elements.len()) - 1
        }
    }

    pub fn mask(&self, s: &Ris) -> u64 {
        s.iter()
            .map(|e| 1u64 << self.position[&e])
            .fold(0, |a, b| a | b)
    }

    pub fn members(&self, mask: u64) -> Vec<ColouredElement> {
        (0..self.elements.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| self.elements[i])
            .collect()
    }
}

/// Colour-by-colour backtracking over RIS's. With `full` only rainbow bases are kept;
/// otherwise every nonempty RIS is.
fn backtrack(universe: &Universe, budget: &OracleBudget, full: bool) -> Result<Vec<Ris>, OracleError> {
    budget.check(universe)?;
    let mut meter = budget.meter();
    let mut out = Vec::new();
    let mut chosen: Vec<ColouredElement> = Vec::new();
    rec(universe, 1, &mut chosen, &ElementSet::new(), full, &mut out, &mut meter)?;
    Ok(out)
}

fn rec(
    universe: &Universe,
    c: usize,
    chosen: &mut Vec<ColouredElement>,
    under: &ElementSet,
    full: bool,
    out: &mut Vec<Ris>,
    meter: &mut Meter,
) -> Result<(), OracleError> {
    meter.tick()?;
    let n = universe.n();
    if c > n {
        if !chosen.is_empty() && (!full || chosen.len() == n) {
            out.push(universe.ris(chosen.iter().copied()).expect("built independent and rainbow"));
        }
        return Ok(());
    }
    if !full {
        rec(universe, c + 1, chosen, under, full, out, meter)?;
    }
    for x in universe.class(c).iter() {
        if under.contains(x) {
            continue;
        }
        let next = under.with(x);
        if !universe.matroid().independent(&next) {
            continue;
        }
        chosen.push(ColouredElement::new(x, c));
        rec(universe, c + 1, chosen, &next, full, out, meter)?;
        chosen.pop();
    }
    Ok(())
}

/// All rainbow bases, ordered by their colour-1 element, then colour-2, and so on.
pub fn enumerate_rainbow_bases(universe: &Universe, budget: &OracleBudget) -> Result<Vec<Ris>, OracleError> {
    backtrack(universe, budget, true)
}

/// All nonempty RIS's.
pub fn enumerate_ris(universe: &Universe, budget: &OracleBudget) -> Result<Vec<Ris>, OracleError> {
    backtrack(universe, budget, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{FamilySpec, Matroid};

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    fn ce(x: usize, c: usize) -> ColouredElement {
        ColouredElement::new(x, c)
    }

    #[test]
    fn u22_has_two_rbs() {
        let u = Universe::new(Matroid::uniform(2, 2).unwrap(), vec![set(&[0, 1]), set(&[0, 1])]).unwrap();
        let rbs = enumerate_rainbow_bases(&u, &OracleBudget::default()).unwrap();
        let got: Vec<Vec<ColouredElement>> = rbs.iter().map(|r| r.elements().to_vec()).collect();
        assert_eq!(got, vec![vec![ce(0, 1), ce(1, 2)], vec![ce(0, 2), ce(1, 1)]]);
    }

    #[test]
    fn rank_one() {
        let u = Universe::new(Matroid::uniform(1, 1).unwrap(), vec![set(&[0])]).unwrap();
        assert_eq!(enumerate_rainbow_bases(&u, &OracleBudget::default()).unwrap().len(), 1);
    }

    #[test]
    fn parallel_columns_prune_transversals() {
        // GF(2) rank 2: columns a, a, b, b. B1 = {0,2}, B2 = {1,3}.
        // Transversals: 4, but {0,1} and {2,3} are parallel pairs, so only 2 are bases.
        let m = Matroid::build(FamilySpec::Linear {
            p: 2,
            m: 4,
            rows: vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]],
        })
        .unwrap();
        let u = Universe::new(m, vec![set(&[0, 2]), set(&[1, 3])]).unwrap();
        let rbs = enumerate_rainbow_bases(&u, &OracleBudget::default()).unwrap();
        assert_eq!(rbs.len(), 2);
        for r in &rbs {
            assert!(u.matroid().independent(r.underline()));
        }
    }

    #[test]
    fn ris_counts_disjoint_uniform() {
        // U(2,4) with disjoint blocks: every rainbow transversal of any size is independent,
        // so there are (1+2)^2 - 1 nonempty RIS's
        let u = Universe::new(Matroid::uniform(2, 4).unwrap(), vec![set(&[0, 1]), set(&[2, 3])]).unwrap();
        assert_eq!(enumerate_ris(&u, &OracleBudget::default()).unwrap().len(), 8);
    }

    #[test]
    fn budget_rejects_large() {
        let bases: Vec<ElementSet> = (0..6).map(|c| (c * 6..(c + 1) * 6).collect()).collect();
        let u = Universe::new(Matroid::uniform(6, 36).unwrap(), bases).unwrap();
        assert!(matches!(
            enumerate_rainbow_bases(&u, &OracleBudget::default()),
            Err(OracleError::TooLarge { what: "rank", .. })
        ));
    }

    #[test]
    fn index_round_trip() {
        let u = Universe::new(Matroid::uniform(2, 4).unwrap(), vec![set(&[0, 1]), set(&[2, 3])]).unwrap();
        let idx = UniverseIndex::new(&u);
        let r = u.ris([ce(1, 1), ce(2, 2)]).unwrap();
        assert_eq!(idx.members(idx.mask(&r)), r.elements());
        assert_eq!(idx.colour_mask(2).count_ones(), 2);
    }
}
