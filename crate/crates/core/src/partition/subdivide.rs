use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::metric::{mst, Edge, WeightedGraph};
use crate::spanner::Spanner;

use super::PartitionError;

// Keeps exact multiples of w0 from picking up an extra piece through
// rounding in w / w0.
const PIECE_ROUNDING: f64 = 1.0 - 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MstSummary {
    /// MST edges in `(weight, u, v)` order.
    pub mst_edges: Vec<Edge>,
    pub total_weight: f64,
    /// Average MST edge weight `total_weight / (n - 1)`.
    pub w0: f64,
    pub n: usize,
}

pub fn mst_summary(g: &WeightedGraph) -> Result<MstSummary, PartitionError> {
    if g.n() < 2 {
        return Err(PartitionError::SingleVertex);
    }
    let t = mst(g).map_err(|_| PartitionError::DisconnectedGraph)?;
    let total_weight = t.total_weight();
    Ok(MstSummary {
        mst_edges: t.sorted_edges(),
        total_weight,
        w0: total_weight / (g.n() - 1) as f64,
        n: g.n(),
    })
}

/// The spanner with every MST edge heavier than `w0` replaced by a chain of
/// equal pieces of weight at most `w0`. Vertices `0..n` are the original
/// ones; the rest are virtual.
#[derive(Clone, Debug)]
pub struct SubdividedSpanner {
    graph: WeightedGraph,
    n_original: usize,
    w0: f64,
    virtual_flags: Vec<bool>,
    /// For each edge of `graph`, the original MST edge it is a piece of.
    origin: Vec<Option<Edge>>,
    mst_weight: f64,
}

impl SubdividedSpanner {
    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn n_original(&self) -> usize {
        self.n_original
    }

    pub fn n_total(&self) -> usize {
        self.graph.n()
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn is_virtual(&self, v: usize) -> bool {
        self.virtual_flags[v]
    }

    pub fn virtual_flags(&self) -> &[bool] {
        &self.virtual_flags
    }

    pub fn origin(&self, edge: usize) -> Option<Edge> {
        self.origin[edge]
    }

    pub fn is_mst_piece(&self, edge: usize) -> bool {
        self.origin[edge].is_some()
    }

    /// Indices of MST pieces in `graph().edges()`.
    pub fn mst_pieces(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.origin.len()).filter(|&i| self.origin[i].is_some())
    }

    pub fn piece_count(&self) -> usize {
        self.origin.iter().filter(|o| o.is_some()).count()
    }

    /// Weight of the original MST.
    pub fn mst_weight(&self) -> f64 {
        self.mst_weight
    }

    /// Spanner edges that are not MST pieces, with their indices.
    pub fn non_mst_edges(&self) -> impl Iterator<Item = (usize, Edge)> + '_ {
        self.graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.origin[*i].is_none())
            .map(|(i, e)| (i, *e))
    }
}

/// Number of pieces an MST edge of weight `w` is cut into.
pub(crate) fn piece_count(w: f64, w0: f64) -> usize {
    if w <= w0 {
        1
    } else {
        ((w / w0) * PIECE_ROUNDING).ceil().max(1.0) as usize
    }
}

/// Subdivides the MST edges of `s`. `summary` must describe the MST of the
/// spanner's base graph, which a greedy spanner contains.
pub fn subdivide(s: &Spanner, summary: &MstSummary) -> SubdividedSpanner {
    let n = s.n();
    let w0 = summary.w0;
    let mst_keys: HashSet<(usize, usize)> = summary.mst_edges.iter().map(Edge::key).collect();
    let mut edges = Vec::new();
    let mut origin = Vec::new();
    let mut next = n;
    for &e in &summary.mst_edges {
        let k = piece_count(e.w, w0);
        let piece = e.w / k as f64;
        let mut prev = e.u;
        for step in 0..k {
            let cur = if step + 1 == k {
                e.v
            } else {
                next += 1;
                next - 1
            };
            edges.push(Edge::new(prev, cur, piece));
            origin.push(Some(e));
            prev = cur;
        }
    }
    for &e in s.edges() {
        if !mst_keys.contains(&e.key()) {
            edges.push(e);
            origin.push(None);
        }
    }
    let mut virtual_flags = vec![false; next];
    for f in &mut virtual_flags[n..] {
        *f = true;
    }
    SubdividedSpanner {
        graph: WeightedGraph::from_trusted(next, edges),
        n_original: n,
        w0,
        virtual_flags,
        origin,
        mst_weight: summary.total_weight,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn spanner_of(n: usize, edges: Vec<Edge>) -> Spanner {
        let g = Arc::new(WeightedGraph::new(n, edges.clone()).unwrap());
        Spanner::from_edges(g, edges, 0.5).unwrap()
    }

    #[test]
    fn average_weight() {
        let path = WeightedGraph::new(4, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0), Edge::new(2, 3, 1.0)]).unwrap();
        assert_eq!(mst_summary(&path).unwrap().w0, 1.0);
        let two = WeightedGraph::new(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 2.0)]).unwrap();
        assert_eq!(mst_summary(&two).unwrap().w0, 1.5);
        let pair = WeightedGraph::new(2, vec![Edge::new(0, 1, 7.0)]).unwrap();
        assert_eq!(mst_summary(&pair).unwrap().w0, 7.0);
        let lone = WeightedGraph::new(1, vec![]).unwrap();
        assert_eq!(mst_summary(&lone), Err(PartitionError::SingleVertex));
        let split = WeightedGraph::new(3, vec![Edge::new(0, 1, 1.0)]).unwrap();
        assert_eq!(mst_summary(&split), Err(PartitionError::DisconnectedGraph));
    }

    #[test]
    fn piece_counts() {
        assert_eq!(piece_count(2.5, 1.0), 3);
        assert_eq!(piece_count(2.0, 1.0), 2);
        assert_eq!(piece_count(1.0, 1.0), 1);
        assert_eq!(piece_count(0.3, 1.0), 1);
        assert_eq!(piece_count(0.3 * 3.0, 0.3), 3);
    }

    #[test]
    fn light_mst_is_untouched() {
        let s = spanner_of(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]);
        let summary = mst_summary(s.base()).unwrap();
        let sp = subdivide(&s, &summary);
        assert_eq!(sp.n_total(), 3);
        assert_eq!(sp.graph().m(), 2);
        assert!(sp.virtual_flags().iter().all(|v| !v));
    }

    #[test]
    fn heavy_edge_split_evenly() {
        // MST weights 0.5 and 2.5 give w0 = 1.5; the heavy edge becomes two
        // pieces of 1.25, and the non-MST edge stays whole.
        let s = spanner_of(
            3,
            vec![Edge::new(0, 1, 0.5), Edge::new(1, 2, 2.5), Edge::new(0, 2, 2.9)],
        );
        let summary = mst_summary(s.base()).unwrap();
        assert_eq!(summary.w0, 1.5);
        let sp = subdivide(&s, &summary);
        assert_eq!(sp.n_total(), 4);
        assert!(sp.is_virtual(3));
        let pieces: Vec<Edge> = sp.mst_pieces().map(|i| sp.graph().edges()[i]).collect();
        assert_eq!(pieces, vec![Edge::new(0, 1, 0.5), Edge::new(1, 3, 1.25), Edge::new(2, 3, 1.25)]);
        assert_eq!(sp.non_mst_edges().map(|(_, e)| e).collect::<Vec<_>>(), vec![Edge::new(0, 2, 2.9)]);
        assert_eq!(sp.origin(1), Some(Edge::new(1, 2, 2.5)));
    }
}
