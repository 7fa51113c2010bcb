mod common;

use std::sync::Arc;

use spanlab::metric::{metric_graph, mst};
use spanlab::partition::{classify_weight, mst_summary, EdgeClass};
use spanlab::spanner::{greedy_spanner, greedy_spanner_metric, verify_stretch_with};

use common::*;

#[test]
fn greedy_matches_brute_force_on_points() {
    let mut r = rng(11);
    for case in 0..120 {
        let n = 2 + case % 11;
        let dim = 1 + case % 3;
        let eps = [0.1, 0.25, 0.5, 0.9][case % 4];
        let m = uniform_metric(&mut r, n, dim);
        let g = Arc::new(metric_graph(&m).unwrap());
        let want = brute_greedy(&dense(&m), eps);
        let plain = greedy_spanner(g.clone(), eps).unwrap();
        let fast = greedy_spanner_metric(&m, g, eps).unwrap();
        assert_eq!(plain.edges(), &want[..], "case {case}");
        assert_eq!(fast.edges(), &want[..], "case {case}");
    }
}

#[test]
fn greedy_matches_brute_force_on_matrices() {
    let mut r = rng(12);
    for case in 0..60 {
        let n = 3 + case % 10;
        let eps = [0.1, 0.25, 0.5, 0.9][case % 4];
        let m = random_matrix_metric(&mut r, n);
        let g = Arc::new(metric_graph(&m).unwrap());
        let s = greedy_spanner_metric(&m, g, eps).unwrap();
        assert_eq!(s.edges(), &brute_greedy(&dense(&m), eps)[..], "case {case}");
    }
}

#[test]
fn stretch_matches_floyd_warshall() {
    let mut r = rng(13);
    for case in 0..40 {
        let n = 4 + case % 30;
        let eps = [0.25, 0.5][case % 2];
        let m = uniform_metric(&mut r, n, 2);
        let s = greedy_spanner_metric(&m, metric_graph(&m).unwrap(), eps).unwrap();
        let got = verify_stretch_with(&s, &m).max_stretch;
        let want = brute_stretch(&dense(&m), s.edges());
        assert!((got - want).abs() <= 1e-12 * want, "case {case}: {got} vs {want}");
    }
}

#[test]
fn mst_weight_matches_prim() {
    let mut r = rng(14);
    for case in 0..40 {
        let m = if case % 2 == 0 { uniform_metric(&mut r, 5 + case, 3) } else { random_matrix_metric(&mut r, 5 + case) };
        let t = mst(&metric_graph(&m).unwrap()).unwrap();
        let want = prim_weight(&dense(&m));
        assert_eq!(t.m(), m.len() - 1);
        assert!((t.total_weight() - want).abs() <= 1e-9 * want);
    }
}

#[test]
fn classes_match_bracket_scan() {
    let mut r = rng(15);
    let mut seen = [0usize; 3];
    for case in 0..30 {
        let eps = [0.1, 0.2, 0.25, 0.3, 0.5, 0.9][case % 6];
        let m = uniform_metric(&mut r, 40, 2);
        let g = metric_graph(&m).unwrap();
        let w0 = mst_summary(&g).unwrap().w0;
        for e in g.edges() {
            let got = match classify_weight(e.w, w0, eps) {
                EdgeClass::Light => (0, 0, 0),
                EdgeClass::J0 => (1, 0, 0),
                EdgeClass::Level { i, j } => (2, i, j),
            };
            assert_eq!(got, brute_class(e.w, w0, eps), "w = {} w0 = {w0} eps = {eps}", e.w);
            seen[got.0 as usize] += 1;
        }
    }
    assert!(seen.iter().all(|&k| k > 0), "every class exercised: {seen:?}");
}
