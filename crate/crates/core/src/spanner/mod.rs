//! Greedy (1+eps)-spanner construction and exact verification of its
//! stretch, lightness and sparsity.

mod greedy;
mod verify;

use std::collections::HashMap;
use std::sync::Arc;

pub use greedy::{greedy_spanner, greedy_spanner_metric, greedy_spanner_traced, GreedyStep, Spanner};
pub use verify::{
    check_mst_containment, spanner_metrics, spanner_metrics_with, verify_stretch,
    verify_stretch_with, MstCheck, SpannerMetrics, StretchReport, STRETCH_SLACK,
};

use crate::metric::io::{fmt_weight, write_edges};
use crate::metric::{Edge, WeightedGraph};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpannerError {
    #[error("eps must lie strictly between 0 and 1, got {eps}")]
    InvalidEps { eps: f64 },
    #[error("base graph is disconnected")]
    DisconnectedGraph,
    #[error("edge ({u},{v}) is not an edge of the base graph")]
    NotInBase { u: usize, v: usize },
    #[error("edge ({u},{v}) listed twice")]
    DuplicateEdge { u: usize, v: usize },
    #[error("graph has {graph} vertices but the metric has {metric} points")]
    SizeMismatch { graph: usize, metric: usize },
    #[error("spanner file line {line}: {message}")]
    Format { line: usize, message: String },
}

/// Spanner file: a `# n m eps` header followed by `u v weight` lines in
/// `(weight, u, v)` order.
pub fn write_spanner(s: &Spanner) -> String {
    format!("# {} {} {}\n{}", s.n(), s.m(), fmt_weight(s.eps()), write_edges(s.edges()))
}

/// Reads a spanner file written by [`write_spanner`] against its base
/// graph. File weights must agree with the base to 1e-9 relative; the base
/// weights are kept.
/// A spanner file before it is checked against a base graph.
#[derive(Clone, Debug, PartialEq)]
pub struct SpannerFile {
    pub n: usize,
    /// Edge count promised by the header.
    pub declared: usize,
    pub eps: f64,
    pub edges: Vec<Edge>,
}

impl SpannerFile {
    pub fn parse(text: &str) -> Result<SpannerFile, SpannerError> {
        let bad = |line: usize, message: String| SpannerError::Format { line, message };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let (hline, header) = lines
            .by_ref()
            .find(|(_, l)| !l.is_empty())
            .ok_or_else(|| bad(0, "empty file".into()))?;
        let fields: Vec<&str> = header
            .strip_prefix('#')
            .ok_or_else(|| bad(hline, "missing `# n m eps` header".into()))?
            .split_whitespace()
            .collect();
        if fields.len() != 3 {
            return Err(bad(hline, format!("header needs 3 fields, found {}", fields.len())));
        }
        let n: usize = fields[0].parse().map_err(|_| bad(hline, "bad n".into()))?;
        let declared: usize = fields[1].parse().map_err(|_| bad(hline, "bad m".into()))?;
        let eps: f64 = fields[2].parse().map_err(|_| bad(hline, "bad eps".into()))?;
        let mut edges = Vec::with_capacity(declared);
        for (line, body) in lines {
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = body.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(bad(line, "expected `u v weight`".into()));
            }
            let u: usize = parts[0].parse().map_err(|_| bad(line, "bad vertex".into()))?;
            let v: usize = parts[1].parse().map_err(|_| bad(line, "bad vertex".into()))?;
            let w: f64 = parts[2].parse().map_err(|_| bad(line, "bad weight".into()))?;
            if u == v {
                return Err(bad(line, format!("self-loop at {u}")));
            }
            edges.push(Edge::new(u, v, w));
        }
        Ok(SpannerFile { n, declared, eps, edges })
    }

    /// Checks vertex count and weights against `base`; the header edge
    /// count is ignored.
    pub fn into_spanner(self, base: Arc<WeightedGraph>) -> Result<Spanner, SpannerError> {
        if self.n != base.n() {
            return Err(SpannerError::Format {
                line: 1,
                message: format!("file has n = {}, base graph has {}", self.n, base.n()),
            });
        }
        let weights: HashMap<(usize, usize), f64> = base.edges().iter().map(|e| (e.key(), e.w)).collect();
        for e in &self.edges {
            let base_w = *weights.get(&e.key()).ok_or(SpannerError::NotInBase { u: e.u, v: e.v })?;
            if (base_w - e.w).abs() > 1e-9 * base_w {
                return Err(SpannerError::Format {
                    line: 0,
                    message: format!("edge ({},{}) weight {} disagrees with base weight {base_w}", e.u, e.v, e.w),
                });
            }
        }
        Spanner::from_edges(base, self.edges, self.eps)
    }
}

pub fn parse_spanner(text: &str, base: Arc<WeightedGraph>) -> Result<Spanner, SpannerError> {
    let file = SpannerFile::parse(text)?;
    if file.edges.len() != file.declared {
        return Err(SpannerError::Format {
            line: 1,
            message: format!("header promises {} edges, found {}", file.declared, file.edges.len()),
        });
    }
    file.into_spanner(base)
}
