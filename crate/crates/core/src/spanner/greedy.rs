use std::collections::HashMap;
use std::sync::Arc;

use crate::metric::{Distance, Edge, MetricSpace, SearchWorkspace, WeightedGraph};

use super::SpannerError;

/// A subgraph of a base graph built for stretch `1 + eps`.
#[derive(Clone, Debug)]
pub struct Spanner {
    base: Arc<WeightedGraph>,
    edges: Vec<Edge>,
    eps: f64,
}

impl Spanner {
    /// Wraps an edge list as a spanner of `base`. Every edge must be an
    /// edge of `base`; the stored weight is the base weight.
    pub fn from_edges(
        base: Arc<WeightedGraph>,
        edges: Vec<Edge>,
        eps: f64,
    ) -> Result<Spanner, SpannerError> {
        check_eps(eps)?;
        let index: HashMap<(usize, usize), f64> =
            base.edges().iter().map(|e| (e.key(), e.w)).collect();
        let mut own = Vec::with_capacity(edges.len());
        let mut seen = std::collections::HashSet::new();
        for e in edges {
            let e = Edge::new(e.u, e.v, e.w);
            let w = *index
                .get(&e.key())
                .ok_or(SpannerError::NotInBase { u: e.u, v: e.v })?;
            if !seen.insert(e.key()) {
                return Err(SpannerError::DuplicateEdge { u: e.u, v: e.v });
            }
            own.push(Edge { w, ..e });
        }
        crate::metric::sort_edges(&mut own);
        Ok(Spanner { base, edges: own, eps })
    }

    pub fn base(&self) -> &WeightedGraph {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<WeightedGraph> {
        &self.base
    }

    /// Spanner edges in `(weight, u, v)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn graph(&self) -> WeightedGraph {
        WeightedGraph::from_trusted(self.n(), self.edges.clone())
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<(), SpannerError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(SpannerError::InvalidEps { eps })
    }
}

/// One step of the greedy scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GreedyStep {
    pub edge: Edge,
    /// What the bounded search found between the endpoints on the spanner
    /// built so far, with cutoff `(1 + eps) * w`.
    pub found: Distance,
    pub accepted: bool,
}

/// Greedy (1+eps)-spanner: scan edges by `(weight, u, v)` and keep `xy`
/// exactly when `(1 + eps) * w(xy) < d_S(x, y)` on the current spanner.
pub fn greedy_spanner(
    g: impl Into<Arc<WeightedGraph>>,
    eps: f64,
) -> Result<Spanner, SpannerError> {
    let g = g.into();
    let edges = run(&g, eps, |_, _| 0.0, |_| {})?;
    Ok(Spanner { base: g, edges, eps })
}

/// Same construction on the metric graph of `m`, with the search steered by
/// metric distances to the target. Produces the same edges as
/// [`greedy_spanner`] on `metric_graph(m)`.
pub fn greedy_spanner_metric(
    m: &MetricSpace,
    g: impl Into<Arc<WeightedGraph>>,
    eps: f64,
) -> Result<Spanner, SpannerError> {
    let g = g.into();
    if g.n() != m.len() {
        return Err(SpannerError::SizeMismatch {
            graph: g.n(),
            metric: m.len(),
        });
    }
    let edges = run(&g, eps, |x, t| m.distance(x, t) * LOWER_BOUND_SHRINK, |_| {})?;
    Ok(Spanner { base: g, edges, eps })
}

/// Greedy construction that also returns every scan decision.
pub fn greedy_spanner_traced(
    g: impl Into<Arc<WeightedGraph>>,
    eps: f64,
) -> Result<(Spanner, Vec<GreedyStep>), SpannerError> {
    let g = g.into();
    let mut steps = Vec::with_capacity(g.m());
    let edges = run(&g, eps, |_, _| 0.0, |s| steps.push(s))?;
    Ok((Spanner { base: g, edges, eps }, steps))
}

// Keeps the metric lower bound strictly admissible under rounding of the
// path sums it is compared against.
const LOWER_BOUND_SHRINK: f64 = 1.0 - 1e-12;

fn run<H, O>(g: &WeightedGraph, eps: f64, lower: H, mut observe: O) -> Result<Vec<Edge>, SpannerError>
where
    H: Fn(usize, usize) -> f64,
    O: FnMut(GreedyStep),
{
    check_eps(eps)?;
    if !g.is_connected() {
        return Err(SpannerError::DisconnectedGraph);
    }
    let n = g.n();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut ws = SearchWorkspace::new(n);
    let mut kept = Vec::new();
    for edge in g.sorted_edges() {
        let cutoff = (1.0 + eps) * edge.w;
        let t = edge.v;
        let found = ws.bounded(adj.as_slice(), edge.u, t, cutoff, |x| lower(x, t));
        let accepted = found.finite().is_none();
        if accepted {
            adj[edge.u].push((edge.v, edge.w));
            adj[edge.v].push((edge.u, edge.w));
            kept.push(edge);
        }
        observe(GreedyStep { edge, found, accepted });
    }
    Ok(kept)
}
