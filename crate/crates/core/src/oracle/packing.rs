use crate::rainbow::Universe;

use super::enumerate::{enumerate_rainbow_bases, UniverseIndex};
use super::{Meter, OracleBudget, OracleError};

/// Order in which candidate rainbow bases are branched on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackingOrder {
    /// Fewest conflicting bases first.
    FewestConflicts,
    /// Enumeration order.
    Enumeration,
}

/// `t(ℬ)`: the largest number of pairwise disjoint rainbow bases.
pub fn brute_force_t(universe: &Universe, budget: &OracleBudget) -> Result<usize, OracleError> {
    brute_force_t_with(universe, budget, PackingOrder::FewestConflicts)
}

/// Exact set packing by branch and bound.
///
/// Every rainbow basis has exactly one element of each colour, so a packing can be extended by
/// at most `min_c |available colour-c elements|` more bases. The search branches on one
/// available element of the scarcest colour: it is either covered by some basis of the packing
/// or dropped.
pub fn brute_force_t_with(universe: &Universe, budget: &OracleBudget, order: PackingOrder) -> Result<usize, OracleError> {
    let rbs = enumerate_rainbow_bases(universe, budget)?;
    if rbs.is_empty() {
        return Ok(0);
    }
    let idx = UniverseIndex::new(universe);
    let masks: Vec<u64> = rbs.iter().map(|r| idx.mask(r)).collect();
    let conflicts: Vec<usize> = masks
        .iter()
        .map(|&a| masks.iter().filter(|&&b| a & b != 0).count())
        .collect();
    let mut by_element: Vec<Vec<usize>> = vec![Vec::new(); idx.len()];
    for (r, &m) in masks.iter().enumerate() {
        for (e, list) in by_element.iter_mut().enumerate() {
            if m >> e & 1 == 1 {
                list.push(r);
            }
        }
    }
    if order == PackingOrder::FewestConflicts {
        for list in &mut by_element {
            list.sort_by_key(|&r| (conflicts[r], r));
        }
    }
    let colours: Vec<u64> = (1..=universe.n()).map(|c| idx.colour_mask(c)).collect();
    let ceiling = colours.iter().map(|m| m.count_ones() as usize).min().unwrap_or(0);
    let mut search = Packing {
        masks: &masks,
        by_element: &by_element,
        colours: &colours,
        best: 0,
        ceiling,
        meter: budget.meter(),
    };
    search.run(idx.all(), 0)?;
    Ok(search.best)
}

struct Packing<'a> {
    masks: &'a [u64],
    by_element: &'a [Vec<usize>],
    colours: &'a [u64],
    best: usize,
    ceiling: usize,
    meter: Meter,
}

impl Packing<'_> {
    fn run(&mut self, available: u64, count: usize) -> Result<(), OracleError> {
        self.meter.tick()?;
        self.best = self.best.max(count);
        if self.best == self.ceiling {
            return Ok(());
        }
        let (scarcest, room) = self
            .colours
            .iter()
            .map(|&m| m & available)
            .map(|m| (m, m.count_ones() as usize))
            .min_by_key(|&(_, k)| k)
            .expect("rank is at least 1");
        if count + room <= self.best {
            return Ok(());
        }
        let e = scarcest.trailing_zeros() as usize;
        for &r in &self.by_element[e] {
            let m = self.masks[r];
            if m & available == m {
                self.run(available & !m, count + 1)?;
                if self.best == self.ceiling {
                    return Ok(());
                }
            }
        }
        self.run(available & !(1u64 << e), count)
    }
}

/// Include/exclude recursion over the rainbow bases with no bounding, for cross-checking.
pub fn naive_t(universe: &Universe, budget: &OracleBudget) -> Result<usize, OracleError> {
    let rbs = enumerate_rainbow_bases(universe, budget)?;
    let idx = UniverseIndex::new(universe);
    let masks: Vec<u64> = rbs.iter().map(|r| idx.mask(r)).collect();
    let mut meter = budget.meter();
    fn go(masks: &[u64], used: u64, meter: &mut Meter) -> Result<usize, OracleError> {
        meter.tick()?;
        let Some((&first, rest)) = masks.split_first() else {
            return Ok(0);
        };
        let skip = go(rest, used, meter)?;
        if first & used != 0 {
            return Ok(skip);
        }
        Ok(skip.max(1 + go(rest, used | first, meter)?))
    }
    go(&masks, 0, &mut meter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::ElementSet;
    use crate::matroid::{FamilySpec, Matroid};

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    fn blocks(n: usize) -> Universe {
        let bases: Vec<ElementSet> = (0..n).map(|c| (c * n..(c + 1) * n).collect()).collect();
        Universe::new(Matroid::uniform(n, n * n).unwrap(), bases).unwrap()
    }

    #[test]
    fn small_values() {
        let b = OracleBudget::default();
        let u22 = Universe::new(Matroid::uniform(2, 2).unwrap(), vec![set(&[0, 1]), set(&[0, 1])]).unwrap();
        assert_eq!(brute_force_t(&u22, &b), Ok(2));
        assert_eq!(brute_force_t(&blocks(3), &b), Ok(3));
        assert_eq!(brute_force_t(&blocks(1), &b), Ok(1));
        assert_eq!(naive_t(&u22, &b), Ok(2));
    }

    #[test]
    fn restricted_universe_lowers_t() {
        let b = OracleBudget::default();
        let u = blocks(2);
        // withdraw (0,1): colour 1 keeps a single element, so one RB at most
        let r = u.restricted(&[crate::rainbow::ColouredElement::new(0, 1)]);
        assert_eq!(brute_force_t(&r, &b), Ok(1));
        assert_eq!(naive_t(&r, &b), Ok(1));
    }

    #[test]
    fn orderings_agree_on_graphic() {
        // K4 edges 0..6; three spanning trees sharing edges
        let m = Matroid::build(FamilySpec::Graphic {
            vertices: 4,
            edges: vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]],
        })
        .unwrap();
        let u = Universe::new(m, vec![set(&[0, 1, 2]), set(&[0, 3, 4]), set(&[1, 3, 5])]).unwrap();
        let b = OracleBudget::default();
        let a = brute_force_t_with(&u, &b, PackingOrder::FewestConflicts).unwrap();
        let e = brute_force_t_with(&u, &b, PackingOrder::Enumeration).unwrap();
        assert_eq!(a, e);
        assert_eq!(a, naive_t(&u, &b).unwrap());
    }
}
