use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::metric::single_source_with_pred;
use crate::partition::SubdividedSpanner;

/// Where a cluster was first formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Origin {
    Base,
    Phase1,
    Phase2,
    Phase4,
    /// The whole cluster tree, formed when nothing else could host it.
    Orphan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Phase4Shape {
    pub long: bool,
    pub affix: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Index among the clusters of its level.
    pub id: usize,
    pub level: usize,
    /// Sorted `S'` vertices.
    pub vertices: Vec<usize>,
    /// Level `level - 1` clusters it was built from; empty at level 0.
    pub members: Vec<usize>,
    /// Non-MST `S'` edges (by index) that belong to the cluster subgraph.
    pub struct_edges: Vec<usize>,
    pub diameter: f64,
    /// Smallest non-virtual vertex; `None` for virtual clusters.
    pub center: Option<usize>,
    pub origin: Origin,
    pub augmented_phase3: bool,
    pub augmented_phase4: bool,
    /// Long/short and internal/affix, for clusters formed in Phase 4.
    pub phase4: Option<Phase4Shape>,
    /// Below the level scale because the whole tree is; exempt from the
    /// `ell / 2` floor of DC1.
    pub undersized: bool,
    /// Credit retained for DC1, in units of `c`.
    pub credit_units: f64,
}

impl Cluster {
    pub fn is_virtual(&self) -> bool {
        self.center.is_none()
    }

    pub fn provenance(&self) -> String {
        let mut s = format!("{:?}", self.origin);
        if self.augmented_phase3 {
            s.push_str("+Phase3");
        }
        if self.augmented_phase4 {
            s.push_str("+Phase4");
        }
        s
    }
}

/// `S'` with incidence lists, shared by every level of a certification run.
pub struct Space<'a> {
    pub sp: &'a SubdividedSpanner,
    /// Per vertex: `(neighbor, edge index)`.
    pub adj: Vec<Vec<(usize, usize)>>,
    pub edge_index: HashMap<(usize, usize), usize>,
    pub is_piece: Vec<bool>,
}

impl<'a> Space<'a> {
    pub fn new(sp: &'a SubdividedSpanner) -> Space<'a> {
        let g = sp.graph();
        let mut adj = vec![Vec::new(); g.n()];
        let mut edge_index = HashMap::with_capacity(g.m());
        let mut is_piece = vec![false; g.m()];
        for (i, e) in g.edges().iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
            edge_index.insert(e.key(), i);
            is_piece[i] = sp.is_mst_piece(i);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Space {
            sp,
            adj,
            edge_index,
            is_piece,
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn weight(&self, edge: usize) -> f64 {
        self.sp.graph().edges()[edge].w
    }

    pub fn center_of(&self, vertices: &[usize]) -> Option<usize> {
        vertices.iter().copied().find(|&v| !self.sp.is_virtual(v))
    }
}

/// Exact diameter of a cluster subgraph together with a diameter path.
#[derive(Clone, Debug, PartialEq)]
pub struct DiameterPath {
    pub diameter: f64,
    /// Vertices from one end of a diameter path to the other.
    pub path: Vec<usize>,
    pub connected: bool,
}

/// The cluster subgraph: MST pieces with both ends in `vertices` plus the
/// listed structural edges. Returns it as a local adjacency list.
fn local_graph(space: &Space, vertices: &[usize], struct_edges: &[usize]) -> (Vec<Vec<(usize, f64)>>, usize) {
    let local: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let extra: HashSet<usize> = struct_edges.iter().copied().collect();
    let mut g = vec![Vec::new(); vertices.len()];
    let mut m = 0;
    for (a, &v) in vertices.iter().enumerate() {
        for &(u, idx) in &space.adj[v] {
            if u <= v || !(space.is_piece[idx] || extra.contains(&idx)) {
                continue;
            }
            if let Some(&b) = local.get(&u) {
                let w = space.weight(idx);
                g[a].push((b, w));
                g[b].push((a, w));
                m += 1;
            }
        }
    }
    (g, m)
}

fn farthest(dist: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &d) in dist.iter().enumerate() {
        if d > best.1 {
            best = (i, d);
        }
    }
    best
}

fn walk_back(pred: &[usize], from: usize, to: usize) -> Vec<usize> {
    let mut path = vec![to];
    let mut cur = to;
    while cur != from {
        cur = pred[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

/// Trees use a double sweep, which is exact there; other subgraphs run a
/// search from every vertex. Among equally long pairs the first found in
/// vertex order is returned.
pub fn cluster_diameter(space: &Space, vertices: &[usize], struct_edges: &[usize]) -> DiameterPath {
    if vertices.len() <= 1 {
        return DiameterPath {
            diameter: 0.0,
            path: vertices.to_vec(),
            connected: true,
        };
    }
    let (g, m) = local_graph(space, vertices, struct_edges);
    let lift = |p: Vec<usize>| p.into_iter().map(|i| vertices[i]).collect::<Vec<_>>();
    let (d0, _) = single_source_with_pred(g.as_slice(), 0);
    if d0.iter().any(|d| d.is_infinite()) {
        return DiameterPath {
            diameter: f64::INFINITY,
            path: Vec::new(),
            connected: false,
        };
    }
    if m + 1 == vertices.len() {
        let (a, _) = farthest(&d0);
        let (da, pred) = single_source_with_pred(g.as_slice(), a);
        let (b, diameter) = farthest(&da);
        return DiameterPath {
            diameter,
            path: lift(walk_back(&pred, a, b)),
            connected: true,
        };
    }
    let mut best: Option<(f64, usize, usize, Vec<usize>)> = None;
    for a in 0..vertices.len() {
        let (da, pred) = single_source_with_pred(g.as_slice(), a);
        let (b, d) = farthest(&da);
        if best.as_ref().map_or(true, |x| d > x.0) {
            best = Some((d, a, b, pred));
        }
    }
    let (diameter, a, b, pred) = best.expect("nonempty cluster");
    DiameterPath {
        diameter,
        path: lift(walk_back(&pred, a, b)),
        connected: true,
    }
}

/// Vertex to cluster lookup for one level.
pub fn owner_map(n: usize, clusters: &[Cluster]) -> Vec<usize> {
    let mut owner = vec![usize::MAX; n];
    for c in clusters {
        for &v in &c.vertices {
            owner[v] = c.id;
        }
    }
    owner
}
