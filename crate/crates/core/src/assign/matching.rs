//! Maximum-cardinality bipartite matching by augmenting paths, and the
//! König vertex cover read off a maximum matching.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Bipartite graph with left vertices (users) and right vertices (units).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    num_right: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(num_left: usize, num_right: usize) -> Self {
        Self {
            num_right,
            adj: vec![Vec::new(); num_left],
        }
    }

    pub fn from_edges(num_left: usize, num_right: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(num_left, num_right);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.adj.len() || v >= self.num_right {
            return Err(Error::Contract(format!("edge ({u}, {v}) is out of range")));
        }
        if !self.adj[u].contains(&v) {
            self.adj[u].push(v);
            self.adj[u].sort_unstable();
        }
        Ok(())
    }

    pub fn num_left(&self) -> usize {
        self.adj.len()
    }

    pub fn num_right(&self) -> usize {
        self.num_right
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(num_left: usize, num_right: usize) -> Self {
        Self {
            left: vec![None; num_left],
            right: vec![None; num_right],
        }
    }

    pub fn size(&self) -> usize {
        self.left.iter().filter(|m| m.is_some()).count()
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.left
            .iter()
            .enumerate()
            .filter_map(|(u, v)| v.map(|v| (u, v)))
            .collect()
    }

    fn check(&self, graph: &BipartiteGraph) -> Result<()> {
        if self.left.len() != graph.num_left() || self.right.len() != graph.num_right() {
            return Err(Error::Contract("matching does not fit the graph".into()));
        }
        for (u, v) in self.pairs() {
            if self.right[v] != Some(u) || !graph.has_edge(u, v) {
                return Err(Error::Contract(format!("({u}, {v}) is not a matched graph edge")));
            }
        }
        if self.right.iter().enumerate().any(|(v, u)| u.is_some_and(|u| self.left[u] != Some(v))) {
            return Err(Error::Contract("matching is inconsistent".into()));
        }
        Ok(())
    }
}

fn augment(graph: &BipartiteGraph, u: usize, seen: &mut [bool], m: &mut Matching) -> bool {
    for &v in graph.neighbors(u) {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        let free = match m.right[v] {
            None => true,
            Some(w) => augment(graph, w, seen, m),
        };
        if free {
            m.left[u] = Some(v);
            m.right[v] = Some(u);
            return true;
        }
    }
    false
}

/// Maximum matching, grown from scratch.
pub fn max_matching(graph: &BipartiteGraph) -> Matching {
    let mut m = Matching::empty(graph.num_left(), graph.num_right());
    extend_matching(graph, &mut m);
    m
}

/// Grow `matching` to maximum cardinality by augmenting paths from every
/// free left vertex. `matching` must be valid in `graph`.
pub fn extend_matching(graph: &BipartiteGraph, matching: &mut Matching) {
    let mut seen = vec![false; graph.num_right()];
    for u in 0..graph.num_left() {
        if matching.left[u].is_none() {
            seen.iter_mut().for_each(|s| *s = false);
            augment(graph, u, &mut seen, matching);
        }
    }
}

/// Rows (left vertices) and columns (right vertices) covering every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCover {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl VertexCover {
    pub fn size(&self) -> usize {
        self.rows.len() + self.cols.len()
    }

    pub fn covers(&self, u: usize, v: usize) -> bool {
        self.rows.contains(&u) || self.cols.contains(&v)
    }
}

/// König cover from a maximum matching: with `Z` the vertices reachable from
/// free left vertices by alternating paths, the cover is
/// `(left \ Z) ∪ (right ∩ Z)` and has exactly `|matching|` vertices.
/// Fails if an augmenting path exists, i.e. the matching is not maximum.
pub fn min_vertex_cover(graph: &BipartiteGraph, matching: &Matching) -> Result<VertexCover> {
    matching.check(graph)?;
    let mut left_seen = vec![false; graph.num_left()];
    let mut right_seen = vec![false; graph.num_right()];
    let mut queue: VecDeque<usize> = (0..graph.num_left()).filter(|&u| matching.left[u].is_none()).collect();
    for &u in &queue {
        left_seen[u] = true;
    }
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if right_seen[v] || matching.left[u] == Some(v) {
                continue;
            }
            right_seen[v] = true;
            match matching.right[v] {
                None => return Err(Error::Contract("matching is not maximum: augmenting path found".into())),
                Some(w) => {
                    if !left_seen[w] {
                        left_seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    Ok(VertexCover {
        rows: (0..graph.num_left()).filter(|&u| !left_seen[u]).collect(),
        cols: (0..graph.num_right()).filter(|&v| right_seen[v]).collect(),
    })
}
