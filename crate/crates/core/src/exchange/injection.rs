use crate::bitset::ElementSet;
use crate::matroid::Matroid;
use crate::rainbow::{Ris, Universe};

use super::ExchangeError;

/// An injection `φ_c` from the underlying set of an RIS into `B_c` with every
/// `underline(S) - x + φ_c(x)` independent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExchangeInjection {
    pub colour: usize,
    /// `(x, φ_c(x))` pairs, ascending in `x`.
    pub map: Vec<(usize, usize)>,
}

impl ExchangeInjection {
    pub fn image(&self, x: usize) -> Option<usize> {
        self.map.iter().find(|&&(a, _)| a == x).map(|&(_, y)| y)
    }
}

/// Lexicographically least injection saturating `underline(S)`, found by bipartite matching
/// on the edges `(x, y)` with `y = x`, or `y` outside `underline(S)` and `S - x + y` independent.
pub fn exchange_injection(universe: &Universe, s: &Ris, colour: usize) -> Result<ExchangeInjection, ExchangeError> {
    if !(1..=universe.n()).contains(&colour) {
        return Err(ExchangeError::ColourOutOfRange(colour));
    }
    injection_into(universe.matroid(), s.underline(), universe.base(colour))
        .map(|map| ExchangeInjection { colour, map })
        .ok_or(ExchangeError::OracleInconsistency { colour })
}

/// The matching behind [`exchange_injection`] for an independent set `under` and a base
/// `base`; `None` when no saturating matching exists.
pub fn injection_into(m: &Matroid, under: &ElementSet, base: &ElementSet) -> Option<Vec<(usize, usize)>> {
    let left: Vec<usize> = under.iter().collect();
    let right: Vec<usize> = base.iter().collect();
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&x| {
            let rest = under.without(x);
            right
                .iter()
                .enumerate()
                .filter(|&(_, &y)| y == x || (!under.contains(y) && m.independent(&rest.with(y))))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    // Fix left vertices in order, each to the smallest partner that still admits a
    // saturating matching of the rest.
    let mut fixed: Vec<Option<usize>> = vec![None; left.len()];
    for i in 0..left.len() {
        let choice = adj[i].iter().copied().find(|&j| {
            fixed[i] = Some(j);
            saturates(&adj, &fixed, right.len())
        });
        fixed[i] = Some(choice?);
    }
    Some(
        left.iter()
            .zip(fixed)
            .map(|(&x, j)| (x, right[j.expect("every vertex fixed")]))
            .collect(),
    )
}

/// Whether the left side can be matched completely, honouring the pre-fixed choices.
fn saturates(adj: &[Vec<usize>], fixed: &[Option<usize>], right: usize) -> bool {
    let mut owner: Vec<Option<usize>> = vec![None; right];
    for (i, f) in fixed.iter().enumerate() {
        if let Some(j) = *f {
            if owner[j].is_some() {
                return false;
            }
            owner[j] = Some(i);
        }
    }
    for i in 0..adj.len() {
        if fixed[i].is_some() {
            continue;
        }
        let mut seen = vec![false; right];
        if !augment(i, adj, fixed, &mut owner, &mut seen) {
            return false;
        }
    }
    true
}

fn augment(
    i: usize,
    adj: &[Vec<usize>],
    fixed: &[Option<usize>],
    owner: &mut [Option<usize>],
    seen: &mut [bool],
) -> bool {
    for &j in &adj[i] {
        if seen[j] {
            continue;
        }
        seen[j] = true;
        let current = owner[j];
        match current {
            None => {
                owner[j] = Some(i);
                return true;
            }
            Some(k) if fixed[k].is_none() && augment(k, adj, fixed, owner, seen) => {
                owner[j] = Some(i);
                return true;
            }
            _ => {}
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::ElementSet;
    use crate::matroid::{FamilySpec, Matroid};
    use crate::rainbow::ColouredElement;

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn uniform_sets_match_in_order() {
        let m = Matroid::uniform(2, 4).unwrap();
        let map = injection_into(&m, &set(&[0, 1]), &set(&[2, 3])).unwrap();
        assert_eq!(map, vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn uniform_example() {
        let u = Universe::new(
            Matroid::uniform(2, 4).unwrap(),
            vec![set(&[0, 1]), set(&[2, 3])],
        )
        .unwrap();
        let s = u.ris([ColouredElement::new(0, 1)]).unwrap();
        let phi = exchange_injection(&u, &s, 2).unwrap();
        assert_eq!(phi.map, vec![(0, 2)]);
    }

    #[test]
    fn shared_elements_map_to_themselves() {
        let u = Universe::new(
            Matroid::uniform(2, 3).unwrap(),
            vec![set(&[0, 1]), set(&[0, 2])],
        )
        .unwrap();
        let s = u.ris([ColouredElement::new(0, 1)]).unwrap();
        let phi = exchange_injection(&u, &s, 2).unwrap();
        assert_eq!(phi.image(0), Some(0));
    }

    #[test]
    fn graphic_spanning_tree() {
        // square 0-1-2-3-0 plus diagonal 0-2; edges numbered 0..5
        let m = Matroid::build(FamilySpec::Graphic {
            vertices: 4,
            edges: vec![[0, 1], [1, 2], [2, 3], [3, 0], [0, 2]],
        })
        .unwrap();
        let bases = vec![set(&[0, 1, 2]), set(&[1, 2, 3]), set(&[1, 3, 4])];
        let u = Universe::new(m.clone(), bases).unwrap();
        let s = u.ris([ColouredElement::new(0, 1), ColouredElement::new(1, 2)]).unwrap();
        let phi = exchange_injection(&u, &s, 3).unwrap();
        let under = s.underline();
        let mut images = ElementSet::new();
        for &(x, y) in &phi.map {
            assert!(images.insert(y), "not injective");
            assert!(y == x || !under.contains(y));
            assert!(m.independent(&under.without(x).with(y)));
        }
        assert_eq!(phi.map.len(), 2);
    }
}
