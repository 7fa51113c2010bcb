use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metric::{mst, single_source, DistanceOracle, Edge, WeightedGraph};

use super::{Spanner, SpannerError};

/// Relative slack allowed on top of `1 + eps` when checking stretch.
pub const STRETCH_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StretchReport {
    pub max_stretch: f64,
    /// A pair attaining `max_stretch`, smallest `(x, y)` among ties.
    pub worst_pair: Option<(usize, usize)>,
}

impl StretchReport {
    pub fn within(&self, eps: f64) -> bool {
        self.max_stretch <= (1.0 + eps) * (1.0 + STRETCH_SLACK)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpannerMetrics {
    pub lightness: f64,
    pub sparsity: f64,
    pub max_stretch: f64,
    pub mst_weight: f64,
    pub n: usize,
    pub m_spanner: usize,
}

fn worse(a: (f64, Option<(usize, usize)>), b: (f64, Option<(usize, usize)>)) -> (f64, Option<(usize, usize)>) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => match (a.1, b.1) {
            (None, _) => b,
            (_, None) => a,
            (Some(p), Some(q)) => {
                if p <= q {
                    a
                } else {
                    b
                }
            }
        },
    }
}

fn stretch_with<D>(s: &Spanner, base_distances: D) -> StretchReport
where
    D: Fn(usize) -> Vec<f64> + Sync,
{
    let n = s.n();
    let adj = s.graph().adjacency();
    let (max_stretch, worst_pair) = (0..n)
        .into_par_iter()
        .map(|x| {
            let ds = single_source(&adj, x);
            let dg = base_distances(x);
            let mut best = (1.0, None);
            for y in (x + 1)..n {
                let ratio = if ds[y].is_infinite() { f64::INFINITY } else { ds[y] / dg[y] };
                best = worse(best, (ratio, Some((x, y))));
            }
            best
        })
        .reduce(|| (1.0, None), worse);
    StretchReport { max_stretch, worst_pair }
}

/// Exact all-pairs stretch, with base distances from Dijkstra on the base
/// graph.
pub fn verify_stretch(s: &Spanner) -> StretchReport {
    let base = s.base().adjacency();
    stretch_with(s, |x| single_source(&base, x))
}

/// Exact all-pairs stretch against an explicit distance oracle for the
/// base (for metric graphs, the metric itself).
pub fn verify_stretch_with(s: &Spanner, oracle: &dyn DistanceOracle) -> StretchReport {
    stretch_with(s, |x| (0..s.n()).map(|y| oracle.distance(x, y)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MstCheck {
    /// MST edges of the base graph missing from the spanner.
    pub missing: Vec<Edge>,
    pub base_mst_weight: f64,
    /// `None` when the spanner is disconnected.
    pub spanner_mst_weight: Option<f64>,
}

impl MstCheck {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.missing.is_empty()
            && self
                .spanner_mst_weight
                .is_some_and(|w| (w - self.base_mst_weight).abs() <= rel_tol * self.base_mst_weight)
    }
}

pub fn check_mst_containment(s: &Spanner) -> Result<MstCheck, SpannerError> {
    let base_mst = mst(s.base()).map_err(|_| SpannerError::DisconnectedGraph)?;
    let have: HashSet<(usize, usize)> = s.edges().iter().map(Edge::key).collect();
    let missing = base_mst
        .edges()
        .iter()
        .filter(|e| !have.contains(&e.key()))
        .copied()
        .collect();
    let spanner_mst_weight = mst(&s.graph()).ok().map(|t| t.total_weight());
    Ok(MstCheck {
        missing,
        base_mst_weight: base_mst.total_weight(),
        spanner_mst_weight,
    })
}

fn metrics_from(s: &Spanner, stretch: StretchReport, mst_weight: f64) -> SpannerMetrics {
    let n = s.n();
    SpannerMetrics {
        lightness: s.weight() / mst_weight,
        sparsity: s.m() as f64 / n as f64,
        max_stretch: stretch.max_stretch,
        mst_weight,
        n,
        m_spanner: s.m(),
    }
}

fn base_mst_weight(g: &WeightedGraph) -> Result<f64, SpannerError> {
    mst(g).map(|t| t.total_weight()).map_err(|_| SpannerError::DisconnectedGraph)
}

pub fn spanner_metrics(s: &Spanner) -> Result<SpannerMetrics, SpannerError> {
    let w = base_mst_weight(s.base())?;
    Ok(metrics_from(s, verify_stretch(s), w))
}

pub fn spanner_metrics_with(
    s: &Spanner,
    oracle: &dyn DistanceOracle,
) -> Result<SpannerMetrics, SpannerError> {
    let w = base_mst_weight(s.base())?;
    Ok(metrics_from(s, verify_stretch_with(s, oracle), w))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::metric::{metric_graph, MetricSpace, Norm, PointSet};
    use crate::spanner::greedy_spanner;

    fn triangle() -> (MetricSpace, Arc<WeightedGraph>) {
        let h = 3f64.sqrt() / 2.0;
        let m = MetricSpace::from_points(
            PointSet::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]).unwrap(),
            Norm::L2,
        );
        let g = Arc::new(metric_graph(&m).unwrap());
        (m, g)
    }

    #[test]
    fn identity_has_stretch_one() {
        let (_, g) = triangle();
        let s = Spanner::from_edges(g.clone(), g.edges().to_vec(), 0.5).unwrap();
        let r = verify_stretch(&s);
        assert_eq!(r.max_stretch, 1.0);
    }

    #[test]
    fn collinear_path_has_stretch_one() {
        let m = MetricSpace::from_points(
            PointSet::new(vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap(),
            Norm::L2,
        );
        let s = greedy_spanner(metric_graph(&m).unwrap(), 0.5).unwrap();
        let r = verify_stretch(&s);
        assert_eq!(r.max_stretch, 1.0);
        assert_eq!(verify_stretch_with(&s, &m), r);
    }

    #[test]
    fn removed_triangle_edge_doubles() {
        let (m, g) = triangle();
        let edges: Vec<Edge> = g.edges().iter().filter(|e| e.key() != (0, 2)).copied().collect();
        let s = Spanner::from_edges(g, edges, 0.5).unwrap();
        let r = verify_stretch(&s);
        assert!((r.max_stretch - 2.0).abs() < 1e-12);
        assert_eq!(r.worst_pair, Some((0, 2)));
        assert!(!r.within(0.5));
        assert_eq!(verify_stretch_with(&s, &m).worst_pair, Some((0, 2)));
    }

    #[test]
    fn metrics_examples() {
        let (m, g) = triangle();
        let s = greedy_spanner(g, 0.5).unwrap();
        let met = spanner_metrics_with(&s, &m).unwrap();
        assert!((met.lightness - 1.5).abs() < 1e-12);
        assert_eq!(met.m_spanner, 3);

        let pair = MetricSpace::from_points(PointSet::new(vec![vec![0.0], vec![4.0]]).unwrap(), Norm::L2);
        let s = greedy_spanner(metric_graph(&pair).unwrap(), 0.5).unwrap();
        let met = spanner_metrics(&s).unwrap();
        assert_eq!(met.sparsity, 0.5);
        assert_eq!(met.lightness, 1.0);
    }

    #[test]
    fn disconnected_spanner_reports_infinite_stretch() {
        let (_, g) = triangle();
        let s = Spanner::from_edges(g, vec![Edge::new(0, 1, 1.0)], 0.5).unwrap();
        let r = verify_stretch(&s);
        assert!(r.max_stretch.is_infinite());
        assert_eq!(r.worst_pair, Some((0, 2)));
        let c = check_mst_containment(&s).unwrap();
        assert!(!c.holds(1e-9));
        assert_eq!(c.spanner_mst_weight, None);
    }
}
