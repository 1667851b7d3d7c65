//! Cycle matroid helpers: union-find forest test and shortest cycle.

use std::collections::VecDeque;

use crate::bitset::ElementSet;

pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Size of a spanning forest of the chosen edges.
pub fn forest_rank(vertices: usize, edges: &[[usize; 2]], set: &ElementSet) -> usize {
    let mut uf = UnionFind::new(vertices);
    set.iter()
        .filter(|&e| uf.union(edges[e][0], edges[e][1]))
        .count()
}

pub fn is_forest(vertices: usize, edges: &[[usize; 2]], set: &ElementSet) -> bool {
    let mut uf = UnionFind::new(vertices);
    set.iter().all(|e| uf.union(edges[e][0], edges[e][1]))
}

/// Length of a shortest cycle of the multigraph, or `None` when it is a forest.
pub fn shortest_cycle(vertices: usize, edges: &[[usize; 2]]) -> Option<usize> {
    if edges.iter().any(|[u, v]| u == v) {
        return Some(1);
    }
    let mut seen = std::collections::HashSet::new();
    for &[u, v] in edges {
        if !seen.insert((u.min(v), u.max(v))) {
            return Some(2);
        }
    }
    let mut adj = vec![Vec::new(); vertices];
    for (id, &[u, v]) in edges.iter().enumerate() {
        adj[u].push((v, id));
        adj[v].push((u, id));
    }
    let mut best: Option<usize> = None;
    for root in 0..vertices {
        let mut dist = vec![usize::MAX; vertices];
        let mut via = vec![usize::MAX; vertices];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &(w, id) in &adj[u] {
                if id == via[u] {
                    continue;
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    via[w] = id;
                    queue.push_back(w);
                } else {
                    let len = dist[u] + dist[w] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}
