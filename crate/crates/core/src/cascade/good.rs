//! Turning a bad root into a good one by recolouring along a shortest path in the
//! layered graph `G(𝒮, S, b)`.

use std::collections::HashMap;

use crate::exchange::Root;
use crate::rainbow::{ColouredElement, Ris, Universe};

use super::CascadeError;

/// Whether some unused `(y,b)` has `y` outside `underline(S)`.
pub fn is_good(universe: &Universe, root: &Root) -> bool {
    let unused = root.collection().unused(universe, root.colour());
    !unused.difference(root.set().underline()).is_empty()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GoodVertex {
    /// The level-0 vertex `(O, b)`.
    Base { colour: usize },
    /// A member of the root set.
    Member(ColouredElement),
    /// An unused coloured element whose element avoids the root set.
    Terminal(ColouredElement),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct GoodNode {
    pub vertex: GoodVertex,
    pub level: usize,
    /// Index of the first vertex that discovered this one.
    pub parent: Option<usize>,
}

/// The layered graph, built up to the first level holding a terminal (or a fixed point).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GoodGraph {
    pub nodes: Vec<GoodNode>,
    /// Node indices per level, in discovery order.
    pub levels: Vec<Vec<usize>>,
}

impl GoodGraph {
    pub fn has_terminal(&self) -> bool {
        self.terminals().next().is_some()
    }

    /// Terminal node indices in discovery order.
    pub fn terminals(&self) -> impl Iterator<Item = usize> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| matches!(n.vertex, GoodVertex::Terminal(_)))
            .map(|(i, _)| i)
    }

    /// `|V_ℓ|` (vertices at distance at most `ℓ`) for every built level.
    pub fn cumulative_sizes(&self) -> Vec<usize> {
        let mut total = 0;
        self.levels
            .iter()
            .map(|l| {
                total += l.len();
                total
            })
            .collect()
    }

    /// Node indices from the base to `node`.
    pub fn path_to(&self, node: usize) -> Vec<usize> {
        let mut path = vec![node];
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

/// Builds `G(𝒮, S, b)`.
///
/// Level 1 holds, for each unused `(y,b)`, the member of `S` on element `y`, or the terminal
/// `(y,b)` when `y` is not in `underline(S)`. Level `ℓ+1` is reached from each member `(x,c)`
/// on level `ℓ` through the unused `(x',c)`: the member of `S` on `x'` if new, else a terminal.
/// Members of a level are expanded in ascending `(x,c)` order and each `UN_c` is scanned in
/// ascending element order.
pub fn build_good_graph(universe: &Universe, root: &Root) -> GoodGraph {
    let s = root.set();
    let coll = root.collection();
    let mut nodes = vec![GoodNode {
        vertex: GoodVertex::Base {
            colour: root.colour(),
        },
        level: 0,
        parent: None,
    }];
    let mut levels = vec![vec![0]];
    let mut index: HashMap<GoodVertex, usize> = HashMap::new();
    index.insert(nodes[0].vertex, 0);

    loop {
        let level = levels.len();
        let mut frontier: Vec<usize> = levels[level - 1].clone();
        frontier.sort_by_key(|&i| match nodes[i].vertex {
            GoodVertex::Member(e) => (e, 0),
            GoodVertex::Base { colour } => (ColouredElement::new(0, colour), 0),
            GoodVertex::Terminal(e) => (e, 1),
        });
        let mut next = Vec::new();
        for &from in &frontier {
            let colour = match nodes[from].vertex {
                GoodVertex::Base { colour } => colour,
                GoodVertex::Member(e) => e.c,
                GoodVertex::Terminal(_) => continue,
            };
            for y in coll.unused(universe, colour).iter() {
                let vertex = match s.with_element(y) {
                    Some(member) => GoodVertex::Member(member),
                    None => GoodVertex::Terminal(ColouredElement::new(y, colour)),
                };
                if index.contains_key(&vertex) {
                    continue;
                }
                index.insert(vertex, nodes.len());
                next.push(nodes.len());
                nodes.push(GoodNode {
                    vertex,
                    level,
                    parent: Some(from),
                });
            }
        }
        if next.is_empty() {
            break;
        }
        let terminal = next
            .iter()
            .any(|&i| matches!(nodes[i].vertex, GoodVertex::Terminal(_)));
        levels.push(next);
        if terminal {
            break;
        }
    }
    GoodGraph { nodes, levels }
}

/// The recolouring path behind a good transform.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GoodPath {
    /// The root colour `b`.
    pub base_colour: usize,
    /// `(x_1,c_1), ..., (x_h,c_h)`, members of the root set along the path.
    pub members: Vec<ColouredElement>,
    /// `(x_{h+1}, c_h)`: an unused element avoiding the root set.
    pub terminal: ColouredElement,
    /// `S' = S - {(x_i,c_i)} + {(x_1,b), (x_2,c_1), ..., (x_h,c_{h-1})}`.
    pub new_set: Ris,
    /// `b' = c_h` (or `b` when the path is empty).
    pub new_colour: usize,
}

impl GoodPath {
    pub fn is_identity(&self) -> bool {
        self.members.is_empty()
    }
}

/// Applies the recolouring `members`/`base_colour` to `s`; no validation.
pub fn recolour(s: &Ris, base_colour: usize, members: &[ColouredElement]) -> (Ris, usize) {
    let mut prev = base_colour;
    let mut added = Vec::with_capacity(members.len());
    for m in members {
        added.push(ColouredElement::new(m.x, prev));
        prev = m.c;
    }
    (s.edited(members, &added), prev)
}

/// `(𝒮,S,b) -> (𝒮',S',b')` with `S'` good and `underline(S') = underline(S)`.
/// A root that is already good is returned unchanged with an empty path.
pub fn good_transform(universe: &Universe, root: &Root) -> Result<(Root, GoodPath), CascadeError> {
    if let Some(y) = root
        .collection()
        .unused(universe, root.colour())
        .difference(root.set().underline())
        .min_element()
    {
        let path = GoodPath {
            base_colour: root.colour(),
            members: Vec::new(),
            terminal: ColouredElement::new(y, root.colour()),
            new_set: root.set().clone(),
            new_colour: root.colour(),
        };
        return Ok((root.clone(), path));
    }
    let graph = build_good_graph(universe, root);
    let terminal = graph.terminals().next().ok_or(CascadeError::LevelBoundViolated {
        levels: graph.levels.len(),
    })?;
    let path = graph.path_to(terminal);
    let members: Vec<ColouredElement> = path[1..path.len() - 1]
        .iter()
        .map(|&i| match graph.nodes[i].vertex {
            GoodVertex::Member(e) => e,
            _ => unreachable!("inner path vertices are members"),
        })
        .collect();
    let GoodVertex::Terminal(end) = graph.nodes[terminal].vertex else {
        unreachable!()
    };
    let (new_set, new_colour) = recolour(root.set(), root.colour(), &members);
    universe
        .check_ris(&new_set)
        .map_err(|v| CascadeError::InvariantBreach(format!("recoloured set is not an RIS: {v}")))?;
    let coll = root.collection().replaced(&[(root.set_index(), new_set.clone())]);
    let next = Root::new(coll, root.set_index(), new_colour)?;
    debug_assert!(is_good(universe, &next));
    Ok((
        next,
        GoodPath {
            base_colour: root.colour(),
            members,
            terminal: end,
            new_set,
            new_colour,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitset::ElementSet;
    use crate::matroid::Matroid;
    use crate::rainbow::Collection;

    fn ce(x: usize, c: usize) -> ColouredElement {
        ColouredElement::new(x, c)
    }

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    fn worked() -> (Universe, Root) {
        let u = Universe::new(
            Matroid::uniform(3, 6).unwrap(),
            vec![set(&[0, 1, 2]), set(&[0, 3, 5]), set(&[1, 3, 4])],
        )
        .unwrap();
        let s = u.ris([ce(0, 2), ce(1, 3)]).unwrap();
        let sp = u.ris([ce(2, 1), ce(3, 2), ce(4, 3)]).unwrap();
        let coll = Collection::new(&u, vec![s, sp]).unwrap();
        (u.clone(), Root::new(coll, 0, 1).unwrap())
    }

    #[test]
    fn worked_bad_root() {
        let (u, root) = worked();
        assert!(!is_good(&u, &root));
        let g = build_good_graph(&u, &root);
        let level = |l: usize| -> Vec<GoodVertex> { g.levels[l].iter().map(|&i| g.nodes[i].vertex).collect() };
        assert_eq!(level(1), vec![GoodVertex::Member(ce(0, 2)), GoodVertex::Member(ce(1, 3))]);
        assert_eq!(level(2), vec![GoodVertex::Terminal(ce(5, 2)), GoodVertex::Terminal(ce(3, 3))]);
        assert_eq!(g.nodes[g.levels[2][0]].parent, Some(g.levels[1][0]));
        assert_eq!(g.nodes[g.levels[2][1]].parent, Some(g.levels[1][1]));

        let (next, path) = good_transform(&u, &root).unwrap();
        assert_eq!(path.new_set.elements(), &[ce(0, 1), ce(1, 3)]);
        assert_eq!(path.new_colour, 2);
        assert_eq!(path.terminal, ce(5, 2));
        assert_eq!(next.set().underline(), root.set().underline());
        assert!(is_good(&u, &next));
        assert!(next.collection().validate(&u).is_ok());
    }

    #[test]
    fn good_root_is_fixed() {
        let (u, root) = worked();
        let coll = root.collection().clone();
        // S' missing no colour... use S with colour 1 missing but (2,1) free instead
        let freed = coll.replaced(&[(1, u.ris([ce(3, 2), ce(4, 3)]).unwrap())]);
        let r = Root::new(freed, 0, 1).unwrap();
        assert!(is_good(&u, &r));
        let (same, path) = good_transform(&u, &r).unwrap();
        assert_eq!(same, r);
        assert!(path.is_identity());
        assert_eq!(path.terminal, ce(2, 1));
        let g = build_good_graph(&u, &r);
        assert!(g
            .levels[1]
            .iter()
            .any(|&i| matches!(g.nodes[i].vertex, GoodVertex::Terminal(_))));
    }

    #[test]
    fn no_unused_means_bad() {
        let u = Universe::new(
            Matroid::uniform(1, 2).unwrap(),
            vec![set(&[0])],
        )
        .unwrap();
        let coll = Collection::new(&u, vec![Ris::empty(), u.ris([ce(0, 1)]).unwrap()]).unwrap();
        let root = Root::new(coll, 0, 1).unwrap();
        assert!(!is_good(&u, &root));
        assert!(matches!(
            good_transform(&u, &root),
            Err(CascadeError::LevelBoundViolated { .. })
        ));
    }
}
