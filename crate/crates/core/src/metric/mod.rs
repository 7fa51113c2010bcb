//! Finite metric spaces, weighted graphs, shortest paths, minimum spanning
//! trees and the packing-property test.

mod graph;
pub mod io;
mod mst;
mod packing;
mod paths;
mod points;

pub use graph::{sort_edges, Adjacency, DisjointSets, Edge, WeightedGraph};
pub use mst::mst;
pub use packing::{greedy_net, packing_bound, packing_test, Center, PackingOutcome};
pub use paths::{
    shortest_path, single_source, single_source_with_pred, Distance, Neighbors, PathResult,
    SearchWorkspace,
};
pub use points::{
    metric_graph, validate_metric, DistanceOracle, MetricKind, MetricSpace, Norm, PointSet,
    METRIC_TOLERANCE,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("metric space has no points")]
    Empty,
    #[error("points must have at least one coordinate")]
    ZeroDimension,
    #[error("point {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("point {index} has a non-finite coordinate {value}")]
    NonFiniteCoordinate { index: usize, value: f64 },
    #[error("row {row} has {len} entries in a {n}x{n} matrix")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("diagonal entry {index} is {value}, expected 0")]
    NonzeroDiagonal { index: usize, value: f64 },
    #[error("distance between {i} and {j} is not finite")]
    NonFiniteDistance { i: usize, j: usize },
    #[error("d({i},{j}) = {dij} but d({j},{i}) = {dji}")]
    AsymmetricMatrix { i: usize, j: usize, dij: f64, dji: f64 },
    #[error("d({i},{j}) = {value} must be positive")]
    NonpositiveDistance { i: usize, j: usize, value: f64 },
    #[error("triangle inequality fails: d({i},{k}) = {direct} > d({i},{via}) + d({via},{k}) = {detour}")]
    TriangleViolation { i: usize, k: usize, via: usize, direct: f64, detour: f64 },
    #[error("a metric graph needs at least two points")]
    SinglePoint,
    #[error("points {i} and {j} coincide")]
    CoincidentPoints { i: usize, j: usize },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("self-loop at vertex {vertex}")]
    SelfLoop { vertex: usize },
    #[error("edge ({u},{v}) has invalid weight {weight}")]
    BadWeight { u: usize, v: usize, weight: f64 },
    #[error("edge ({u},{v}) appears twice")]
    DuplicateEdge { u: usize, v: usize },
    #[error("graph is disconnected")]
    DisconnectedGraph,
    #[error("cutoff must be positive, got {cutoff}")]
    BadCutoff { cutoff: f64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PackingError {
    #[error("radii must be positive (R = {big_r}, r = {small_r})")]
    BadRadius { big_r: f64, small_r: f64 },
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("point index {index} out of range")]
    InvalidPoint { index: usize },
    #[error("center has {found} coordinates, expected {expected}")]
    CenterDimension { expected: usize, found: usize },
    #[error("coordinate centers need a coordinate metric")]
    CoordinateCenterOnMatrix,
    #[error("point {index} lies at distance {distance} > R = {radius} from the center")]
    NotInBall { index: usize, distance: f64, radius: f64 },
    #[error("points {i} and {j} are {distance} apart, not more than r = {separation}")]
    PairTooClose { i: usize, j: usize, distance: f64, separation: f64 },
}
