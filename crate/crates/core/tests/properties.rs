mod common;

use std::collections::HashMap;

use proptest::prelude::*;
use spanlab::certify::{certify, CertConfig, CertReport};
use spanlab::harness::build_instance;
use spanlab::metric::{greedy_net, packing_test, Center, MetricSpace, Norm, PointSet};
use spanlab::partition::{allocate_credits, classify_all, i_eps, mst_summary, subdivide};
use spanlab::spanner::{check_mst_containment, verify_stretch_with};

fn points(max_n: usize, dim: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(prop::collection::vec(0.0f64..1.0, dim), 2..=max_n)
        .prop_filter_map("coincident points", |rows| {
            let distinct = rows.iter().enumerate().all(|(i, a)| rows[..i].iter().all(|b| a != b));
            distinct.then(|| PointSet::new(rows).unwrap())
        })
}

fn eps() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.1, 0.25, 0.3, 0.5, 0.9])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stretch_and_mst_hold(p in points(40, 2), eps in eps()) {
        let inst = build_instance(p, eps).unwrap();
        prop_assert!(verify_stretch_with(&inst.spanner, &inst.metric).within(eps));
        prop_assert!(check_mst_containment(&inst.spanner).unwrap().holds(1e-9));
    }

    #[test]
    fn pieces_rebuild_their_edge(p in points(40, 3), eps in eps()) {
        let inst = build_instance(p, eps).unwrap();
        let summary = mst_summary(inst.spanner.base()).unwrap();
        let sp = subdivide(&inst.spanner, &summary);
        let mut sums: HashMap<(usize, usize), (f64, usize)> = HashMap::new();
        for idx in sp.mst_pieces() {
            let w = sp.graph().edges()[idx].w;
            prop_assert!(w <= sp.w0() * (1.0 + 1e-9));
            let o = sp.origin(idx).unwrap();
            let s = sums.entry(o.key()).or_default();
            s.0 += w;
            s.1 += 1;
        }
        prop_assert_eq!(sums.len(), summary.mst_edges.len());
        for e in &summary.mst_edges {
            let (w, k) = sums[&e.key()];
            prop_assert!((w - e.w).abs() <= 1e-9 * e.w);
            prop_assert_eq!(k, ((e.w / sp.w0()) * (1.0 - 1e-12)).ceil().max(1.0) as usize);
        }
        prop_assert_eq!(sp.n_total() - sp.n_original(), sp.piece_count() - summary.mst_edges.len());
        prop_assert!(sp.piece_count() <= 2 * (sp.n_original() - 1));
    }

    #[test]
    fn classes_are_disjoint_and_exhaustive(p in points(40, 2), eps in eps(), analysis in prop::sample::select(vec![1.0, 4.0, 400.0])) {
        let inst = build_instance(p, eps).unwrap();
        let summary = mst_summary(inst.spanner.base()).unwrap();
        let a = eps / analysis;
        let parts = classify_all(&inst.spanner, &summary, a).unwrap();
        prop_assert_eq!(parts.len(), i_eps(a));
        let m = inst.spanner.m();
        let mut level_hits: HashMap<(usize, usize), usize> = HashMap::new();
        for part in &parts {
            let in_levels: usize = part.levels.values().map(Vec::len).sum();
            prop_assert_eq!(part.l_s.len() + part.j_0.len() + in_levels + part.other_streams, m);
            prop_assert_eq!(&part.l_s, &parts[0].l_s);
            prop_assert_eq!(&part.j_0, &parts[0].j_0);
            for e in part.levels.values().flatten() {
                *level_hits.entry(e.key()).or_default() += 1;
            }
        }
        prop_assert_eq!(level_hits.len() + parts[0].l_s.len() + parts[0].j_0.len(), m);
        prop_assert!(level_hits.values().all(|&k| k == 1));
    }

    #[test]
    fn credit_never_exceeds_twice_the_tree(p in points(40, 2), eps in eps(), c in 1.0f64..50.0) {
        let inst = build_instance(p, eps).unwrap();
        let summary = mst_summary(inst.spanner.base()).unwrap();
        let sp = subdivide(&inst.spanner, &summary);
        let ledger = allocate_credits(&sp, c).unwrap();
        let total = ledger.initial_total();
        prop_assert!(total <= 2.0 * c * summary.total_weight * (1.0 + 1e-12));
        prop_assert!((total - c * sp.w0() * sp.piece_count() as f64).abs() <= 1e-9 * total);
    }

    #[test]
    fn packing_bound_holds(p in points(60, 2), r in 0.05f64..0.5, big in 0.1f64..1.5, center in 0usize..60) {
        let m = MetricSpace::from_points(p, Norm::L2);
        let c = center % m.len();
        let ball: Vec<usize> = (0..m.len()).filter(|&x| m.distance(c, x) <= big).collect();
        let net = greedy_net(&m, &ball, r);
        let out = packing_test(&m, &net, &Center::Index(c), big, r, 2).unwrap();
        prop_assert!(out.pass, "{} > {}", out.count, out.bound);
    }
}

fn check_conservation(report: &CertReport) -> Result<(), TestCaseError> {
    prop_assert!(report.conservation_ok);
    for l in report.levels() {
        if let Some(r) = &l.replay {
            prop_assert!(r.conserved(), "stream {} level {}: residual {}", l.j, l.i, r.residual);
            prop_assert!(r.negative.is_empty());
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certifier_conserves_credit(p in points(48, 2), eps in prop::sample::select(vec![0.25, 0.5]), explicit in any::<bool>()) {
        let inst = build_instance(p, eps).unwrap();
        let config = CertConfig { eps_analysis: explicit.then_some(eps), ..CertConfig::default() };
        let report = certify(&inst.spanner, &inst.metric, &config).unwrap();
        check_conservation(&report)?;
        let text = serde_json::to_string(&report).unwrap();
        let back: CertReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, report);
    }
}
