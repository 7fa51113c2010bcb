use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::metric::{DistanceOracle, Edge};

use super::CertError;

/// Clusters of one level contracted to nodes and joined by the next
/// level's spanner edges.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterGraph {
    pub nodes: usize,
    /// One spanner edge per adjacent pair, the first in `(weight, u, v)`
    /// order, keyed by the node pair.
    pub edges: BTreeMap<(usize, usize), Edge>,
    pub adj: Vec<Vec<usize>>,
    /// Spanner edges with both ends in one cluster.
    pub self_loops: Vec<Edge>,
    /// Spanner edges repeating an adjacent pair, with the edge kept first.
    pub parallel: Vec<(Edge, Edge)>,
    pub max_degree: usize,
}

impl ClusterGraph {
    pub fn is_simple(&self) -> bool {
        self.self_loops.is_empty() && self.parallel.is_empty()
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }
}

/// `owner` maps each vertex to its cluster (or `usize::MAX`).
pub fn build_cluster_graph(owner: &[usize], nodes: usize, edges: &[Edge]) -> Result<ClusterGraph, CertError> {
    let mut sorted = edges.to_vec();
    crate::metric::sort_edges(&mut sorted);
    let mut kg = ClusterGraph {
        nodes,
        edges: BTreeMap::new(),
        adj: vec![Vec::new(); nodes],
        self_loops: Vec::new(),
        parallel: Vec::new(),
        max_degree: 0,
    };
    for e in sorted {
        let lookup = |v: usize| match owner.get(v) {
            Some(&c) if c < nodes => Ok(c),
            _ => Err(CertError::UncoveredEndpoint { vertex: v }),
        };
        let (a, b) = (lookup(e.u)?, lookup(e.v)?);
        if a == b {
            kg.self_loops.push(e);
            continue;
        }
        let key = (a.min(b), a.max(b));
        if let Some(&kept) = kg.edges.get(&key) {
            kg.parallel.push((kept, e));
            continue;
        }
        kg.edges.insert(key, e);
        kg.adj[a].push(b);
        kg.adj[b].push(a);
    }
    for list in &mut kg.adj {
        list.sort_unstable();
    }
    kg.max_degree = kg.adj.iter().map(Vec::len).max().unwrap_or(0);
    Ok(kg)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub hubs_checked: usize,
    pub pairs_checked: usize,
    /// Center pairs around a hub at distance at most `eps * ell`.
    pub close_pairs: Vec<(usize, usize, f64)>,
    /// Hub and neighbor centers farther apart than `3 ell`.
    pub far_neighbors: Vec<(usize, usize, f64)>,
    /// Neighbors with no center (virtual clusters), which must be isolated.
    pub virtual_incident: Vec<usize>,
    /// Smallest center distance seen, divided by `eps * ell`.
    pub min_separation_ratio: Option<f64>,
    /// Largest hub-to-neighbor center distance, divided by `ell`.
    pub max_reach_ratio: Option<f64>,
}

impl SeparationReport {
    pub fn ok(&self) -> bool {
        self.close_pairs.is_empty() && self.far_neighbors.is_empty() && self.virtual_incident.is_empty()
    }
}

const KEEP: usize = 20;

/// For every hub and its neighbors in `kg`: centers pairwise farther than
/// `eps * ell`, and each neighbor center within `3 ell` of the hub's.
pub fn check_center_separation(
    kg: &ClusterGraph,
    centers: &[Option<usize>],
    oracle: &dyn DistanceOracle,
    ell: f64,
    eps: f64,
) -> SeparationReport {
    let mut r = SeparationReport::default();
    let sep = eps * ell;
    for hub in 0..kg.nodes {
        if kg.adj[hub].is_empty() {
            continue;
        }
        r.hubs_checked += 1;
        let mut group = Vec::with_capacity(kg.adj[hub].len() + 1);
        for &x in std::iter::once(&hub).chain(&kg.adj[hub]) {
            match centers[x] {
                Some(c) => group.push((x, c)),
                None => {
                    if r.virtual_incident.len() < KEEP && !r.virtual_incident.contains(&x) {
                        r.virtual_incident.push(x);
                    }
                }
            }
        }
        let Some(&(_, hc)) = group.first().filter(|g| g.0 == hub) else {
            continue;
        };
        for &(x, c) in &group[1..] {
            let d = oracle.distance(hc, c);
            r.max_reach_ratio = Some(r.max_reach_ratio.map_or(d / ell, |m: f64| m.max(d / ell)));
            if d > 3.0 * ell && r.far_neighbors.len() < KEEP {
                r.far_neighbors.push((hub, x, d));
            }
        }
        for p in 0..group.len() {
            for q in (p + 1)..group.len() {
                let d = oracle.distance(group[p].1, group[q].1);
                r.pairs_checked += 1;
                let ratio = d / sep;
                r.min_separation_ratio = Some(r.min_separation_ratio.map_or(ratio, |m: f64| m.min(ratio)));
                if d <= sep && r.close_pairs.len() < KEEP {
                    r.close_pairs.push((group[p].0, group[q].0, d));
                }
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{MetricSpace, Norm, PointSet};

    #[test]
    fn no_edges_no_degree() {
        let kg = build_cluster_graph(&[0, 0, 1], 2, &[]).unwrap();
        assert_eq!(kg.max_degree, 0);
        assert!(kg.is_simple());
    }

    #[test]
    fn single_and_parallel_edges() {
        let owner = [0, 0, 1, 1];
        let kg = build_cluster_graph(&owner, 2, &[Edge::new(0, 2, 5.0)]).unwrap();
        assert_eq!(kg.max_degree, 1);
        assert!(kg.is_simple());
        let kg = build_cluster_graph(&owner, 2, &[Edge::new(0, 2, 5.0), Edge::new(1, 3, 5.5)]).unwrap();
        assert_eq!(kg.parallel.len(), 1);
        assert!(!kg.is_simple());
        let kg = build_cluster_graph(&owner, 2, &[Edge::new(0, 1, 5.0)]).unwrap();
        assert_eq!(kg.self_loops.len(), 1);
        assert!(matches!(
            build_cluster_graph(&[0, 0], 1, &[Edge::new(0, 5, 1.0)]),
            Err(CertError::UncoveredEndpoint { vertex: 5 })
        ));
    }

    #[test]
    fn separation_checks() {
        let m = MetricSpace::from_points(
            PointSet::new(vec![vec![0.0], vec![10.0], vec![10.0], vec![50.0]]).unwrap(),
            Norm::L2,
        );
        let owner = [0, 1, 2, 3];
        // isolated hub: vacuous
        let kg = build_cluster_graph(&owner, 4, &[]).unwrap();
        let centers = [Some(0), Some(1), Some(2), Some(3)];
        let r = check_center_separation(&kg, &centers, &m, 10.0, 0.25);
        assert!(r.ok());
        assert_eq!(r.pairs_checked, 0);
        // one neighbor at distance 10 with ell = 10: only the hub pair
        let kg = build_cluster_graph(&owner, 4, &[Edge::new(0, 1, 10.0)]).unwrap();
        let r = check_center_separation(&kg, &centers, &m, 10.0, 0.25);
        assert!(r.ok());
        assert_eq!(r.pairs_checked, 2);
        // two neighbors with coincident centers
        let kg = build_cluster_graph(&owner, 4, &[Edge::new(0, 1, 10.0), Edge::new(0, 2, 10.0)]).unwrap();
        let r = check_center_separation(&kg, &centers, &m, 10.0, 0.25);
        assert_eq!(r.close_pairs, vec![(1, 2, 0.0)]);
        // neighbor beyond 3 ell
        let kg = build_cluster_graph(&owner, 4, &[Edge::new(0, 3, 10.0)]).unwrap();
        let r = check_center_separation(&kg, &centers, &m, 10.0, 0.25);
        assert_eq!(r.far_neighbors.len(), 2);
    }
}
