use std::collections::VecDeque;

use crate::matroid::Matroid;
use crate::rainbow::{ColouredElement, Ris, Universe};

use super::ExchangeError;

/// `(x_i, c_i)` in `S` paired with `(x_i', c_i)` in `S'`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ExchangePair {
    pub from: ColouredElement,
    pub to: ColouredElement,
}

/// `(x,c) -> (x',c')`: `underline(S') - x' + x` is independent. Colours play no part.
pub fn arrow(m: &Matroid, s_prime: &Ris, x: ColouredElement, x_prime: ColouredElement) -> bool {
    m.independent(&s_prime.underline().without(x_prime.x).with(x.x))
}

/// A nonempty index set `I` (ascending) such that
/// `S' - {(x_i',c_i) : i ∈ I} + {(x_i,c_i) : i ∈ I}` is an RIS.
///
/// A pair whose element points to its own partner gives `I = {i}` (smallest such `i`).
/// Otherwise `I` is a shortest cycle of the arrow digraph `i -> j` (arrow from `x_i` to
/// `x_j'`); a shortest cycle carries no chords, which is what makes the exchange valid.
pub fn cyclic_exchange(
    universe: &Universe,
    s: &Ris,
    s_prime: &Ris,
    pairs: &[ExchangePair],
) -> Result<Vec<usize>, ExchangeError> {
    let pre = |msg: String| ExchangeError::CyclicPrecondition(msg);
    if pairs.is_empty() {
        return Err(pre("no pairs given".into()));
    }
    for (i, p) in pairs.iter().enumerate() {
        if p.from.c != p.to.c {
            return Err(pre(format!("pair {i} joins different colours")));
        }
        if !s.contains(p.from) {
            return Err(pre(format!("{} is not in S", p.from)));
        }
        if !s_prime.contains(p.to) {
            return Err(pre(format!("{} is not in S'", p.to)));
        }
        if s_prime.underline().contains(p.from.x) {
            return Err(pre(format!("element {} already lies in S'", p.from.x)));
        }
        if pairs[..i].iter().any(|q| q.from.c == p.from.c) {
            return Err(pre(format!("colour {} repeats", p.from.c)));
        }
    }
    let m = universe.matroid();
    let k = pairs.len();
    let out: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            (0..k)
                .filter(|&j| arrow(m, s_prime, pairs[i].from, pairs[j].to))
                .collect()
        })
        .collect();
    if let Some(i) = (0..k).find(|&i| out[i].is_empty()) {
        return Err(pre(format!("{} has no arrow into the paired elements", pairs[i].from)));
    }

    let chosen = match (0..k).find(|&i| out[i].contains(&i)) {
        Some(i) => vec![i],
        None => shortest_cycle(&out).expect("every vertex has an out-arc, so a cycle exists"),
    };
    let remove: Vec<_> = chosen.iter().map(|&i| pairs[i].to).collect();
    let add: Vec<_> = chosen.iter().map(|&i| pairs[i].from).collect();
    let result = s_prime.edited(&remove, &add);
    universe
        .check_ris(&result)
        .map_err(ExchangeError::CyclicInvalid)?;
    let mut chosen = chosen;
    chosen.sort_unstable();
    Ok(chosen)
}

/// Vertices of a shortest directed cycle, in cycle order; ties go to the smallest start.
fn shortest_cycle(out: &[Vec<usize>]) -> Option<Vec<usize>> {
    let k = out.len();
    let mut best: Option<Vec<usize>> = None;
    for start in 0..k {
        let mut parent = vec![usize::MAX; k];
        let mut seen = vec![false; k];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut closing = None;
        'bfs: while let Some(u) = queue.pop_front() {
            for &w in &out[u] {
                if w == start {
                    closing = Some(u);
                    break 'bfs;
                }
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        if let Some(mut u) = closing {
            let mut cycle = vec![u];
            while u != start {
                u = parent[u];
                cycle.push(u);
            }
            cycle.reverse();
            if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
                best = Some(cycle);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::ElementSet;
    use crate::matroid::FamilySpec;

    fn ce(x: usize, c: usize) -> ColouredElement {
        ColouredElement::new(x, c)
    }

    #[test]
    fn shortest_cycle_prefers_short() {
        // 0 -> 1 -> 2 -> 0 and 1 -> 0
        let out = vec![vec![1], vec![2, 0], vec![0]];
        assert_eq!(shortest_cycle(&out), Some(vec![0, 1]));
        assert_eq!(shortest_cycle(&[vec![1], vec![]]), None);
    }

    #[test]
    fn singleton_when_partner_arrow() {
        // U(3,6): every small set independent, so every pair points to its own partner
        let bases: Vec<ElementSet> = vec![
            [0, 1, 2].into_iter().collect(),
            [3, 4, 5].into_iter().collect(),
            [0, 3, 4].into_iter().collect(),
        ];
        let u = Universe::new(Matroid::uniform(3, 6).unwrap(), bases).unwrap();
        let s = u.ris([ce(1, 1)]).unwrap();
        let sp = u.ris([ce(2, 1), ce(5, 2)]).unwrap();
        let pairs = [ExchangePair { from: ce(1, 1), to: ce(2, 1) }];
        assert_eq!(cyclic_exchange(&u, &s, &sp, &pairs), Ok(vec![0]));
    }

    #[test]
    fn two_cycle_from_parallel_classes() {
        // GF(2), rank 2. Columns: 0=a, 1=b, 2=a+b, 3=a, 4=b, 5=a+b.
        // Each x_i is parallel to the partner it does not replace, so only cross arrows exist.
        let m = Matroid::build(FamilySpec::Linear {
            p: 2,
            m: 6,
            rows: vec![vec![1, 0, 1, 1, 0, 1], vec![0, 1, 1, 0, 1, 1]],
        })
        .unwrap();
        // colour 1 base {1, 3}, colour 2 base {0, 4}
        let bases = vec![[1, 3].into_iter().collect(), [0, 4].into_iter().collect()];
        let u = Universe::new(m.clone(), bases).unwrap();
        let s = u.ris([ce(1, 1), ce(0, 2)]).unwrap();
        let sp = u.ris([ce(3, 1), ce(4, 2)]).unwrap();
        // 1 (=b) replacing 3 (=a) leaves {4=b, 1=b}: dependent, so no self-arrow; likewise 0 for 4
        let pairs = [
            ExchangePair { from: ce(1, 1), to: ce(3, 1) },
            ExchangePair { from: ce(0, 2), to: ce(4, 2) },
        ];
        assert!(!arrow(&m, &sp, pairs[0].from, pairs[0].to));
        assert!(arrow(&m, &sp, pairs[0].from, pairs[1].to));
        assert!(arrow(&m, &sp, pairs[1].from, pairs[0].to));
        assert_eq!(cyclic_exchange(&u, &s, &sp, &pairs), Ok(vec![0, 1]));
    }

    #[test]
    fn arrow_examples() {
        let m = Matroid::build(FamilySpec::Linear {
            p: 2,
            m: 3,
            rows: vec![vec![1, 1, 0], vec![0, 0, 1]],
        })
        .unwrap();
        let bases = vec![[0, 2].into_iter().collect(), [1, 2].into_iter().collect()];
        let u = Universe::new(m.clone(), bases).unwrap();
        let sp = u.ris([ce(0, 1), ce(2, 2)]).unwrap();
        assert!(arrow(&m, &sp, ce(0, 1), ce(0, 1)));
        // 1 is parallel to 0, so putting it next to 0 in place of 2 is dependent
        assert!(!arrow(&m, &sp, ce(1, 2), ce(2, 2)));
    }

    #[test]
    fn violated_hypothesis_is_an_error() {
        let m = Matroid::build(FamilySpec::Linear {
            p: 2,
            m: 3,
            rows: vec![vec![1, 1, 0], vec![0, 0, 1]],
        })
        .unwrap();
        let bases = vec![[0, 2].into_iter().collect(), [1, 2].into_iter().collect()];
        let u = Universe::new(m, bases).unwrap();
        let s = u.ris([ce(1, 2)]).unwrap();
        let sp = u.ris([ce(0, 1), ce(2, 2)]).unwrap();
        let pairs = [ExchangePair { from: ce(1, 2), to: ce(2, 2) }];
        assert!(matches!(
            cyclic_exchange(&u, &s, &sp, &pairs),
            Err(ExchangeError::CyclicPrecondition(_))
        ));
    }
}
