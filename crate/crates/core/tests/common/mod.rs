//! Reference implementations shared by the integration suites. Everything
//! here is deliberately naive: dense matrices and full recomputation.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spanlab::metric::{validate_metric, Edge, MetricSpace, Norm, PointSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> PointSet {
    PointSet::new((0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect()).unwrap()
}

pub fn uniform_metric(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> MetricSpace {
    MetricSpace::from_points(uniform_points(rng, n, dim), Norm::L2)
}

/// Shortest-path closure of a complete graph with weights in `[1, 3)`,
/// which always satisfies the triangle inequality.
pub fn random_matrix_metric(rng: &mut ChaCha8Rng, n: usize) -> MetricSpace {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let w = 1.0 + 2.0 * rng.random::<f64>();
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    floyd_in_place(&mut d);
    validate_metric(&d).unwrap()
}

pub fn dense(m: &MetricSpace) -> Vec<Vec<f64>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m.distance(i, j)).collect()).collect()
}

pub fn floyd_in_place(d: &mut [Vec<f64>]) {
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
}

/// All-pairs distances of the graph with the given edges.
pub fn floyd(n: usize, edges: &[Edge]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for e in edges {
        d[e.u][e.v] = d[e.u][e.v].min(e.w);
        d[e.v][e.u] = d[e.v][e.u].min(e.w);
    }
    floyd_in_place(&mut d);
    d
}

/// Pairs `i < j` in `(distance, i, j)` order.
pub fn sorted_pairs(d: &[Vec<f64>]) -> Vec<Edge> {
    let n = d.len();
    let mut es: Vec<Edge> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| Edge::new(i, j, d[i][j])).collect();
    es.sort_by(|a, b| a.w.total_cmp(&b.w).then(a.u.cmp(&b.u)).then(a.v.cmp(&b.v)));
    es
}

/// Greedy spanner that recomputes every spanner distance from scratch
/// after each insertion.
pub fn brute_greedy(d: &[Vec<f64>], eps: f64) -> Vec<Edge> {
    let n = d.len();
    let mut kept: Vec<Edge> = Vec::new();
    let mut ds = floyd(n, &kept);
    for e in sorted_pairs(d) {
        if (1.0 + eps) * e.w < ds[e.u][e.v] {
            kept.push(e);
            ds = floyd(n, &kept);
        }
    }
    kept
}

/// Prim on a dense matrix.
pub fn prim_weight(d: &[Vec<f64>]) -> f64 {
    let n = d.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !in_tree[v])
            .min_by(|&a, &b| best[a].total_cmp(&best[b]))
            .unwrap();
        in_tree[v] = true;
        total += best[v];
        for u in 0..n {
            if !in_tree[u] && d[v][u] < best[u] {
                best[u] = d[v][u];
            }
        }
    }
    total
}

/// Largest `d_S / d` over all pairs, from dense matrices.
pub fn brute_stretch(d: &[Vec<f64>], edges: &[Edge]) -> f64 {
    let ds = floyd(d.len(), edges);
    let mut worst = 1.0f64;
    for i in 0..d.len() {
        for j in (i + 1)..d.len() {
            worst = worst.max(ds[i][j] / d[i][j]);
        }
    }
    worst
}

/// Weight class by scanning brackets in precedence order, written
/// independently of the library.
pub fn brute_class(w: f64, w0: f64, eps: f64) -> (u8, usize, usize) {
    if w <= w0 {
        return (0, 0, 0);
    }
    if w <= 2.0 * w0 / eps {
        return (1, 0, 0);
    }
    let streams = ((1.0 / eps).log2() - 1e-12).ceil().max(1.0) as usize;
    for i in 1..200 {
        for j in 0..streams {
            let hi = 2f64.powi(j as i32 + 1) * w0 / eps.powi(i as i32);
            if hi / 2.0 < w && w <= hi {
                return (2, i, j);
            }
        }
    }
    unreachable!("weight {w} beyond every bracket")
}
