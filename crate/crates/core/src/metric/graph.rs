use std::cmp::Ordering;
use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::GraphError;

/// An undirected weighted edge stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    /// Builds an edge with canonical endpoint order.
    pub fn new(a: usize, b: usize, w: f64) -> Edge {
        if a <= b {
            Edge { u: a, v: b, w }
        } else {
            Edge { u: b, v: a, w }
        }
    }

    /// The global edge order: weight, then `u`, then `v`.
    pub fn order(&self, other: &Edge) -> Ordering {
        self.w
            .total_cmp(&other.w)
            .then(self.u.cmp(&other.u))
            .then(self.v.cmp(&other.v))
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn key(&self) -> (usize, usize) {
        (self.u, self.v)
    }
}

/// Sorts edges by `(weight, u, v)`.
pub fn sort_edges(edges: &mut [Edge]) {
    edges.sort_by(Edge::order);
}

/// A simple undirected graph with positive finite edge weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<WeightedGraph, GraphError> {
        let mut seen = HashSet::with_capacity(edges.len());
        let mut canon = Vec::with_capacity(edges.len());
        for e in edges {
            let e = Edge::new(e.u, e.v, e.w);
            if e.v >= n {
                return Err(GraphError::InvalidVertex { vertex: e.v, n });
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop { vertex: e.u });
            }
            if !e.w.is_finite() || e.w <= 0.0 {
                return Err(GraphError::BadWeight {
                    u: e.u,
                    v: e.v,
                    weight: e.w,
                });
            }
            if !seen.insert(e.key()) {
                return Err(GraphError::DuplicateEdge { u: e.u, v: e.v });
            }
            canon.push(e);
        }
        Ok(WeightedGraph { n, edges: canon })
    }

    /// Builds a graph from edges already known to be valid and canonical.
    pub(crate) fn from_trusted(n: usize, edges: Vec<Edge>) -> WeightedGraph {
        debug_assert!(edges.iter().all(|e| e.u < e.v && e.v < n && e.w > 0.0));
        WeightedGraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut edges = self.edges.clone();
        sort_edges(&mut edges);
        edges
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::build(self.n, &self.edges)
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex { vertex: v, n: self.n })
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut sets = DisjointSets::new(self.n);
        let mut parts = self.n;
        for e in &self.edges {
            if sets.union(e.u, e.v) {
                parts -= 1;
            }
        }
        parts == 1
    }
}

/// Compressed adjacency lists. Each entry carries the neighbor, the weight
/// and the index of the edge in the source edge slice.
#[derive(Clone, Debug)]
pub struct Adjacency {
    offsets: Vec<usize>,
    entries: Vec<(usize, f64, usize)>,
}

impl Adjacency {
    pub fn build(n: usize, edges: &[Edge]) -> Adjacency {
        let mut degree = vec![0usize; n + 1];
        for e in edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let mut cursor = offsets.clone();
        let mut entries = vec![(0, 0.0, 0); offsets[n]];
        for (idx, e) in edges.iter().enumerate() {
            entries[cursor[e.u]] = (e.v, e.w, idx);
            cursor[e.u] += 1;
            entries[cursor[e.v]] = (e.u, e.w, idx);
            cursor[e.v] += 1;
        }
        Adjacency { offsets, entries }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64, usize)] {
        &self.entries[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }
}

/// Union-find with path halving and union by size.
#[derive(Clone, Debug)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> DisjointSets {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `true` when `a` and `b` were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonicalizes_and_rejects_bad_edges() {
        let g = WeightedGraph::new(3, vec![Edge { u: 2, v: 0, w: 1.0 }]).unwrap();
        assert_eq!(g.edges()[0].key(), (0, 2));

        assert!(matches!(
            WeightedGraph::new(2, vec![Edge::new(1, 1, 1.0)]),
            Err(GraphError::SelfLoop { vertex: 1 })
        ));
        assert!(matches!(
            WeightedGraph::new(2, vec![Edge::new(0, 1, 0.0)]),
            Err(GraphError::BadWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(2, vec![Edge::new(0, 1, f64::NAN)]),
            Err(GraphError::BadWeight { .. })
        ));
        assert!(matches!(
            WeightedGraph::new(2, vec![Edge::new(0, 2, 1.0)]),
            Err(GraphError::InvalidVertex { vertex: 2, n: 2 })
        ));
        assert!(matches!(
            WeightedGraph::new(2, vec![Edge::new(0, 1, 1.0), Edge::new(1, 0, 2.0)]),
            Err(GraphError::DuplicateEdge { u: 0, v: 1 })
        ));
    }

    #[test]
    fn edge_order_breaks_ties_by_endpoints() {
        let mut edges = vec![
            Edge::new(1, 2, 1.0),
            Edge::new(0, 2, 1.0),
            Edge::new(0, 1, 1.0),
            Edge::new(0, 3, 0.5),
        ];
        sort_edges(&mut edges);
        let keys: Vec<_> = edges.iter().map(Edge::key).collect();
        assert_eq!(keys, vec![(0, 3), (0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn adjacency_lists_both_directions() {
        let g = WeightedGraph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)]).unwrap();
        let adj = g.adjacency();
        assert_eq!(adj.degree(1), 2);
        assert_eq!(adj.neighbors(0), &[(1, 1.0, 0)]);
        assert_eq!(adj.neighbors(2), &[(1, 2.0, 1)]);
        assert!(g.is_connected());
        let h = WeightedGraph::new(3, vec![Edge::new(0, 1, 1.0)]).unwrap();
        assert!(!h.is_connected());
    }
}
