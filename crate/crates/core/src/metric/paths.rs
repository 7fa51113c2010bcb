use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{Adjacency, GraphError, WeightedGraph};

/// Outcome of a shortest-path query.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Distance {
    Finite(f64),
    Unreachable,
    /// The search stopped once every remaining candidate exceeded the cutoff.
    AboveCutoff,
}

impl Distance {
    pub fn finite(self) -> Option<f64> {
        match self {
            Distance::Finite(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    pub distance: Distance,
    /// Vertices from source to target, present when the distance is finite.
    pub path: Option<Vec<usize>>,
}

/// Neighborhood access used by the searches below.
pub trait Neighbors {
    fn vertex_count(&self) -> usize;
    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, v: usize, f: F);
}

impl Neighbors for Adjacency {
    fn vertex_count(&self) -> usize {
        self.n()
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, v: usize, mut f: F) {
        for &(x, w, _) in self.neighbors(v) {
            f(x, w);
        }
    }
}

impl Neighbors for [Vec<(usize, f64)>] {
    fn vertex_count(&self) -> usize {
        self.len()
    }

    fn for_each_neighbor<F: FnMut(usize, f64)>(&self, v: usize, mut f: F) {
        for &(x, w) in &self[v] {
            f(x, w);
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Item {
    key: f64,
    dist: f64,
    vertex: usize,
}

impl PartialEq for Item {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    // min-heap on (key, vertex)
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

/// Reusable scratch space for repeated point-to-point searches on graphs
/// of a fixed vertex count. Only touched entries are reset between runs.
#[derive(Clone, Debug)]
pub struct SearchWorkspace {
    dist: Vec<f64>,
    pred: Vec<usize>,
    touched: Vec<usize>,
    heap: BinaryHeap<Item>,
}

impl SearchWorkspace {
    pub fn new(n: usize) -> SearchWorkspace {
        SearchWorkspace {
            dist: vec![f64::INFINITY; n],
            pred: vec![usize::MAX; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v] = f64::INFINITY;
            self.pred[v] = usize::MAX;
        }
        self.touched.clear();
        self.heap.clear();
    }

    fn relax(&mut self, v: usize, d: f64, from: usize) -> bool {
        if d < self.dist[v] {
            if self.dist[v] == f64::INFINITY {
                self.touched.push(v);
            }
            self.dist[v] = d;
            self.pred[v] = from;
            true
        } else {
            false
        }
    }

    /// Point-to-point search that never settles anything farther than
    /// `cutoff`. `lower_bound(v)` must not exceed the true distance from
    /// `v` to `t`; use `|_| 0.0` for plain Dijkstra. Nodes may be reopened,
    /// so the returned distance is exact whenever it is finite.
    pub fn bounded<G, H>(
        &mut self,
        g: &G,
        s: usize,
        t: usize,
        cutoff: f64,
        lower_bound: H,
    ) -> Distance
    where
        G: Neighbors + ?Sized,
        H: Fn(usize) -> f64,
    {
        self.reset();
        if s == t {
            return Distance::Finite(0.0);
        }
        self.relax(s, 0.0, s);
        self.heap.push(Item {
            key: lower_bound(s),
            dist: 0.0,
            vertex: s,
        });
        let mut pruned = false;
        while let Some(Item { key, dist, vertex }) = self.heap.pop() {
            if dist > self.dist[vertex] {
                continue;
            }
            if key > cutoff {
                pruned = true;
                break;
            }
            if vertex == t {
                return Distance::Finite(dist);
            }
            g.for_each_neighbor(vertex, |x, w| {
                let nd = dist + w;
                if self.relax(x, nd, vertex) {
                    let key = nd + lower_bound(x);
                    if key <= cutoff {
                        self.heap.push(Item {
                            key,
                            dist: nd,
                            vertex: x,
                        });
                    } else {
                        pruned = true;
                    }
                }
            });
        }
        if pruned {
            Distance::AboveCutoff
        } else {
            Distance::Unreachable
        }
    }

    /// Vertices on the last found path, from `s` to `t`.
    fn trace(&self, s: usize, t: usize) -> Vec<usize> {
        let mut path = vec![t];
        let mut cur = t;
        while cur != s {
            cur = self.pred[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// Single-source distances to every vertex (`INFINITY` if unreachable).
pub fn single_source<G: Neighbors + ?Sized>(g: &G, s: usize) -> Vec<f64> {
    single_source_with_pred(g, s).0
}

/// Single-source distances plus a predecessor array (`usize::MAX` for the
/// source and unreachable vertices). Ties in distance keep the first
/// predecessor found, and vertices are settled in `(distance, id)` order.
pub fn single_source_with_pred<G: Neighbors + ?Sized>(g: &G, s: usize) -> (Vec<f64>, Vec<usize>) {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Item {
        key: 0.0,
        dist: 0.0,
        vertex: s,
    });
    while let Some(Item { dist: d, vertex, .. }) = heap.pop() {
        if d > dist[vertex] {
            continue;
        }
        g.for_each_neighbor(vertex, |x, w| {
            let nd = d + w;
            if nd < dist[x] {
                dist[x] = nd;
                pred[x] = vertex;
                heap.push(Item {
                    key: nd,
                    dist: nd,
                    vertex: x,
                });
            }
        });
    }
    (dist, pred)
}

/// Exact shortest-path distance from `s` to `t`. With a cutoff, the search
/// may stop early and answer [`Distance::AboveCutoff`]; any finite answer is
/// exact.
pub fn shortest_path(
    g: &WeightedGraph,
    s: usize,
    t: usize,
    cutoff: Option<f64>,
) -> Result<PathResult, GraphError> {
    g.check_vertex(s)?;
    g.check_vertex(t)?;
    if let Some(c) = cutoff {
        if !(c > 0.0) {
            return Err(GraphError::BadCutoff { cutoff: c });
        }
    }
    let adj = g.adjacency();
    let mut ws = SearchWorkspace::new(g.n());
    let distance = ws.bounded(&adj, s, t, cutoff.unwrap_or(f64::INFINITY), |_| 0.0);
    let path = distance.finite().map(|_| ws.trace(s, t));
    Ok(PathResult { distance, path })
}
