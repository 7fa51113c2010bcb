//! Small hand-built levels shared by the unit tests.

use std::sync::Arc;

use crate::metric::{Edge, WeightedGraph};
use crate::partition::{mst_summary, subdivide, SubdividedSpanner};
use crate::spanner::Spanner;

use super::canonical::{canonical_pair, CanonicalContext, CanonicalFailure, CanonicalPair};
use super::cluster::{Cluster, Origin, Space};
use super::level::{BuiltLevel, LevelBuilder, LevelInput};
use super::tree::{ClusterTree, TreeEdge};

pub struct Fixture {
    pub sp: SubdividedSpanner,
    pub prev: Vec<Cluster>,
    pub tree: ClusterTree,
}

/// A unit-weight tree on `k` vertices plus heavier non-tree spanner edges.
/// Each vertex is a lower-level cluster of diameter 1 holding one unit.
pub fn fixture(k: usize, tree_edges: &[(usize, usize)], extra: &[Edge]) -> Fixture {
    let mut es: Vec<Edge> = tree_edges.iter().map(|&(a, b)| Edge::new(a, b, 1.0)).collect();
    es.extend_from_slice(extra);
    let g = Arc::new(WeightedGraph::new(k, es.clone()).unwrap());
    let s = Spanner::from_edges(g, es, 0.5).unwrap();
    let sp = subdivide(&s, &mst_summary(s.base()).unwrap());
    let prev = (0..k)
        .map(|v| Cluster {
            id: v,
            level: 0,
            vertices: vec![v],
            members: Vec::new(),
            struct_edges: Vec::new(),
            diameter: 1.0,
            center: Some(v),
            origin: Origin::Base,
            augmented_phase3: false,
            augmented_phase4: false,
            phase4: None,
            undersized: false,
            credit_units: 1.0,
        })
        .collect();
    let tree = ClusterTree::from_parts(
        vec![1.0; k],
        tree_edges.iter().enumerate().map(|(i, &(a, b))| TreeEdge { a, b, piece: i }).collect(),
    );
    Fixture { sp, prev, tree }
}

pub fn path(k: usize) -> Vec<(usize, usize)> {
    (0..k - 1).map(|i| (i, i + 1)).collect()
}

/// Legs of the given lengths hanging off vertex 0, numbered leg by leg.
pub fn spider(legs: &[usize]) -> (usize, Vec<(usize, usize)>) {
    let mut edges = Vec::new();
    let mut next = 1;
    for &len in legs {
        let mut prev = 0;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    (next, edges)
}

/// Runs all four phases on a fixture whose clusters are its vertices.
pub fn built(f: &Fixture, extra: &[Edge], ell: f64, eps: f64, g: f64) -> BuiltLevel {
    let space = Space::new(&f.sp);
    let owner: Vec<usize> = (0..f.prev.len()).collect();
    LevelBuilder::new(LevelInput {
        space: &space,
        prev: &f.prev,
        owner: &owner,
        tree: &f.tree,
        level: 1,
        ell,
        eps,
        g,
    })
    .run(extra)
}

/// Canonical pairs of every Phase-1/2 cluster of `b`, with unit credits.
pub fn pairs(f: &Fixture, b: &BuiltLevel, ell: f64, eps: f64, g: f64) -> Vec<Option<Result<CanonicalPair, CanonicalFailure>>> {
    let owner: Vec<usize> = (0..f.prev.len()).collect();
    let units = vec![1.0; f.prev.len()];
    let ctx = CanonicalContext {
        tree: &f.tree,
        owner: &owner,
        units: &units,
        piece_units: 1.0,
        ell,
        eps,
        g,
    };
    b.drafts
        .iter()
        .enumerate()
        .map(|(id, d)| {
            d.from_phase12().then(|| {
                let p = b.diameter_paths[id].clone().unwrap_or_default();
                canonical_pair(&ctx, d, &b.clusters[id], &p, b.connecting_pieces[id])
            })
        })
        .collect()
}
