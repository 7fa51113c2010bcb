use serde::{Deserialize, Serialize};

use super::{Edge, MetricError, WeightedGraph};

/// Relative tolerance used when validating explicit distance matrices.
pub const METRIC_TOLERANCE: f64 = 1e-9;

/// A finite set of points with a common ambient dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>) -> Result<PointSet, MetricError> {
        let dim = match points.first() {
            Some(p) if !p.is_empty() => p.len(),
            Some(_) => return Err(MetricError::ZeroDimension),
            None => return Err(MetricError::Empty),
        };
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(MetricError::DimensionMismatch {
                    index: i,
                    expected: dim,
                    found: p.len(),
                });
            }
            if let Some(c) = p.iter().find(|c| !c.is_finite()) {
                return Err(MetricError::NonFiniteCoordinate { index: i, value: *c });
            }
            coords.extend_from_slice(p);
        }
        Ok(PointSet { dim, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }
}

/// The Lp norms supported for coordinate inputs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Norm {
    L1,
    #[default]
    L2,
    LInf,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Norm::L1 => diffs.sum(),
            Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Norm::LInf => diffs.fold(0.0, f64::max),
        }
    }
}

impl std::str::FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "1" => Ok(Norm::L1),
            "l2" | "2" => Ok(Norm::L2),
            "linf" | "inf" => Ok(Norm::LInf),
            other => Err(format!("unknown norm `{other}` (expected l1, l2 or linf)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MetricKind {
    Lp { points: PointSet, norm: Norm },
    Matrix { n: usize, data: Vec<f64> },
}

/// A finite metric space: either coordinates under an Lp norm or a
/// validated distance matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSpace {
    kind: MetricKind,
}

/// Anything that can report the distance between two vertices of the
/// underlying space.
pub trait DistanceOracle: Sync {
    fn len(&self) -> usize;
    fn distance(&self, a: usize, b: usize) -> f64;
    /// Ambient dimension when the space comes from coordinates.
    fn ambient_dim(&self) -> Option<usize> {
        None
    }
}

impl MetricSpace {
    pub fn from_points(points: PointSet, norm: Norm) -> MetricSpace {
        MetricSpace {
            kind: MetricKind::Lp { points, norm },
        }
    }

    pub fn kind(&self) -> &MetricKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            MetricKind::Lp { points, .. } => points.len(),
            MetricKind::Matrix { n, .. } => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        match &self.kind {
            MetricKind::Lp { points, norm } => norm.distance(points.point(a), points.point(b)),
            MetricKind::Matrix { n, data } => data[a * n + b],
        }
    }

    pub fn points(&self) -> Option<&PointSet> {
        match &self.kind {
            MetricKind::Lp { points, .. } => Some(points),
            MetricKind::Matrix { .. } => None,
        }
    }
}

impl DistanceOracle for MetricSpace {
    fn len(&self) -> usize {
        MetricSpace::len(self)
    }

    fn distance(&self, a: usize, b: usize) -> f64 {
        MetricSpace::distance(self, a, b)
    }

    fn ambient_dim(&self) -> Option<usize> {
        self.points().map(PointSet::dim)
    }
}

/// Validates a square distance matrix and wraps it as a metric space.
pub fn validate_metric(matrix: &[Vec<f64>]) -> Result<MetricSpace, MetricError> {
    let n = matrix.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(MetricError::NotSquare {
                row: i,
                len: row.len(),
                n,
            });
        }
        data.extend_from_slice(row);
    }
    let at = |i: usize, j: usize| data[i * n + j];
    for i in 0..n {
        let d = at(i, i);
        if d != 0.0 {
            return Err(MetricError::NonzeroDiagonal { index: i, value: d });
        }
        for j in (i + 1)..n {
            let (a, b) = (at(i, j), at(j, i));
            if !a.is_finite() || !b.is_finite() {
                return Err(MetricError::NonFiniteDistance { i, j });
            }
            if (a - b).abs() > METRIC_TOLERANCE * a.abs().max(b.abs()) {
                return Err(MetricError::AsymmetricMatrix { i, j, dij: a, dji: b });
            }
            if a <= 0.0 {
                return Err(MetricError::NonpositiveDistance { i, j, value: a });
            }
        }
    }
    for i in 0..n {
        for k in (i + 1)..n {
            let direct = at(i, k);
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let detour = at(i, j) + at(j, k);
                if direct > detour * (1.0 + METRIC_TOLERANCE) {
                    return Err(MetricError::TriangleViolation {
                        i,
                        k,
                        via: j,
                        direct,
                        detour,
                    });
                }
            }
        }
    }
    Ok(MetricSpace {
        kind: MetricKind::Matrix { n, data },
    })
}

/// The complete graph on the points of `m`, weighted by distance.
pub fn metric_graph(m: &MetricSpace) -> Result<WeightedGraph, MetricError> {
    let n = m.len();
    if n < 2 {
        return Err(MetricError::SinglePoint);
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            let w = m.distance(u, v);
            if !(w > 0.0) || !w.is_finite() {
                return Err(MetricError::CoincidentPoints { i: u, j: v });
            }
            edges.push(Edge { u, v, w });
        }
    }
    Ok(WeightedGraph::from_trusted(n, edges))
}
