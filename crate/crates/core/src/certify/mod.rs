//! Hierarchical clustering of the subdivided spanner and the credit
//! argument that bounds its lightness, run as an executable audit.

mod base;
mod canonical;
#[cfg(test)]
mod fixtures;
mod cluster;
mod kgraph;
mod level;
mod pay;
mod tree;

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metric::{DistanceOracle, Edge};
use crate::partition::{
    allocate_credits, classify_edges, i_eps, i_n, mst_summary, subdivide, LevelPartition, PartitionError,
};
use crate::spanner::Spanner;

pub use base::base_clusters;
pub use canonical::{canonical_pair, CanonicalCase, CanonicalContext, CanonicalFailure, CanonicalPair};
pub use cluster::{cluster_diameter, owner_map, Cluster, DiameterPath, Origin, Phase4Shape, Space};
pub use kgraph::{build_cluster_graph, check_center_separation, ClusterGraph, SeparationReport};
pub use level::{BuiltLevel, Draft, LevelBuilder, LevelInput, Phase2Case, Phase2Info, Sibling};
pub use pay::{
    assign_payments, round_up_3, search_min_c, FallbackPool, LevelAccounts, Payer, PaymentInput, Replay, UnpaidEdge,
};
pub use tree::{ClusterTree, TreeEdge};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertError {
    #[error("vertex {vertex} of a level edge is not covered by any cluster")]
    UncoveredEndpoint { vertex: usize },
    #[error("invalid certifier configuration: {0}")]
    InvalidConfig(String),
    #[error("oracle has {oracle} points but the spanner has {spanner} vertices")]
    SizeMismatch { spanner: usize, oracle: usize },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertConfig {
    /// Cluster diameter constant of DC2.
    pub g: f64,
    /// The analysis parameter is the spanner's eps divided by this.
    pub divisor: f64,
    /// Overrides the analysis parameter outright.
    pub eps_analysis: Option<f64>,
    /// Streams to run; all of `0..I_eps` when unset.
    pub streams: Option<Vec<usize>>,
    /// Upper end of the search for the credit constant.
    pub c_max: f64,
    pub dump_clusters: bool,
}

impl Default for CertConfig {
    fn default() -> CertConfig {
        CertConfig {
            g: 33.0,
            divisor: 400.0,
            eps_analysis: None,
            streams: None,
            c_max: 2f64.powi(40),
            dump_clusters: false,
        }
    }
}

impl CertConfig {
    pub fn analysis_eps(&self, eps_g: f64) -> f64 {
        self.eps_analysis.unwrap_or(eps_g / self.divisor)
    }

    pub fn validate(&self, eps_g: f64) -> Result<(), CertError> {
        let bad = |m: String| Err(CertError::InvalidConfig(m));
        if !(self.g.is_finite() && self.g >= 1.0) {
            return bad(format!("g must be at least 1, got {}", self.g));
        }
        if !(self.divisor.is_finite() && self.divisor >= 1.0) {
            return bad(format!("divisor must be at least 1, got {}", self.divisor));
        }
        let e = self.analysis_eps(eps_g);
        if !(e > 0.0 && e < 1.0) {
            return bad(format!("analysis eps must lie in (0, 1), got {e}"));
        }
        if !(self.c_max.is_finite() && self.c_max >= 1.0) {
            return bad(format!("c_max must be at least 1, got {}", self.c_max));
        }
        if let Some(streams) = &self.streams {
            let top = i_eps(e);
            if let Some(&j) = streams.iter().find(|&&j| j >= top) {
                return bad(format!("stream {j} outside [0, {top})"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anomaly {
    pub j: usize,
    pub level: usize,
    pub kind: String,
    pub detail: String,
}

/// A level where some Phase-1/2 cluster had no canonical pair and the
/// level was paid from a shared pool instead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FallbackEntry {
    pub j: usize,
    pub level: usize,
    pub cluster: usize,
    pub reason: CanonicalFailure,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterDump {
    pub id: usize,
    pub provenance: String,
    pub diameter: f64,
    pub center: Option<usize>,
    pub credit_units: f64,
    pub undersized: bool,
    pub members: Vec<usize>,
    pub vertices: Vec<usize>,
}

impl From<&Cluster> for ClusterDump {
    fn from(c: &Cluster) -> ClusterDump {
        ClusterDump {
            id: c.id,
            provenance: c.provenance(),
            diameter: c.diameter,
            center: c.center,
            credit_units: c.credit_units,
            undersized: c.undersized,
            members: c.members.clone(),
            vertices: c.vertices.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseCounts {
    pub phase1: usize,
    pub phase2: usize,
    pub phase3_augmented: usize,
    pub phase4: usize,
    pub phase4_long: usize,
    pub orphan: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseReport {
    pub ell0: f64,
    pub clusters: usize,
    pub undersized: bool,
    pub min_diam_ratio: f64,
    pub max_diam_ratio: f64,
    pub dc1_ok: bool,
    pub dc2_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<Vec<ClusterDump>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub j: usize,
    pub i: usize,
    pub ell: f64,
    pub edges: usize,
    pub clusters: usize,
    /// One cluster below and no edges: the level copies it.
    pub trivial: bool,
    /// No Phase-1/2 cluster.
    pub exceptional: bool,
    /// The whole tree was low and became one cluster.
    pub saturated: bool,
    pub phases: PhaseCounts,
    pub max_diam_ratio: f64,
    pub dc1_ok: bool,
    pub dc2_ok: bool,
    pub k_degree: usize,
    pub k_simple: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_degree_bound: Option<f64>,
    pub separation: SeparationReport,
    pub ediam_ok: bool,
    pub paid_weight: f64,
    pub b_count: usize,
    pub b_weight: f64,
    pub b_count_bound: f64,
    pub fallback: bool,
    pub canonical_found: usize,
    pub canonical_failed: usize,
    pub unpaid: usize,
    pub both_short_unpaid: usize,
    /// Whether the exception-level characterisation held, on exception
    /// levels that are not saturated.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exception_shape_ok: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<Replay>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump: Option<Vec<ClusterDump>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamReport {
    pub j: usize,
    pub base: BaseReport,
    pub levels: Vec<LevelReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<String>,
    pub beyond_i_n: Vec<usize>,
    /// Closed form over all levels.
    pub min_c_closed: Option<f64>,
    /// Bisection result, three significant digits rounded up.
    pub min_c: Option<f64>,
    pub max_k_degree: usize,
    pub b_count: usize,
    pub b_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub m: usize,
    pub eps_spanner: f64,
    pub eps_analysis: f64,
    pub g: f64,
    pub w0: f64,
    pub mst_weight: f64,
    pub i_eps: usize,
    pub i_n: usize,
    pub streams: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BReport {
    pub count: usize,
    pub weight: f64,
    pub max_k_degree: usize,
    /// `(4 g Delta / eps) W / (1 - eps)`.
    pub weight_bound: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalStats {
    pub attempted: usize,
    pub found: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CreditSummary {
    pub initial_per_c: f64,
    pub bound_per_c: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub schema: u32,
    pub config: ConfigEcho,
    pub credit: CreditSummary,
    pub streams: Vec<StreamReport>,
    pub b: BReport,
    pub min_feasible_c: Option<f64>,
    pub canonical: CanonicalStats,
    pub conservation_ok: bool,
    pub anomalies: Vec<Anomaly>,
    pub fallbacks: Vec<FallbackEntry>,
}

impl CertReport {
    /// No anomaly and a finite credit constant. Fallback levels are
    /// reported separately and do not count against this.
    pub fn certified(&self) -> bool {
        self.anomalies.is_empty() && self.min_feasible_c.is_some()
    }

    pub fn levels(&self) -> impl Iterator<Item = &LevelReport> {
        self.streams.iter().flat_map(|s| s.levels.iter())
    }
}

/// Clusters over their diameter cap, as `(index, diameter, cap)`. The cap
/// is `4 ell` for Phase-4 paths that absorbed nothing and `g ell` otherwise.
pub fn dc2_violations(clusters: &[Cluster], ell: f64, g: f64) -> Vec<(usize, f64, f64)> {
    clusters
        .iter()
        .enumerate()
        .filter_map(|(k, c)| {
            let cap = if c.origin == Origin::Phase4 && !c.augmented_phase4 { 4.0 * ell } else { g * ell };
            (c.diameter > cap * (1.0 + 1e-9)).then_some((k, c.diameter, cap))
        })
        .collect()
}

struct Context<'a> {
    space: &'a Space<'a>,
    oracle: &'a dyn DistanceOracle,
    mst_keys: &'a HashSet<(usize, usize)>,
    config: &'a CertConfig,
    eps: f64,
    w0: f64,
}

struct StreamOutcome {
    report: StreamReport,
    anomalies: Vec<Anomaly>,
    fallbacks: Vec<FallbackEntry>,
    canonical: (usize, usize),
    conserved: bool,
}

/// Runs the full clustering and credit audit of `s`. The oracle supplies
/// metric distances between original points for the center checks.
pub fn certify(s: &Spanner, oracle: &dyn DistanceOracle, config: &CertConfig) -> Result<CertReport, CertError> {
    config.validate(s.eps())?;
    if oracle.len() != s.n() {
        return Err(CertError::SizeMismatch {
            spanner: s.n(),
            oracle: oracle.len(),
        });
    }
    let summary = mst_summary(s.base())?;
    let sp = subdivide(s, &summary);
    let ledger = allocate_credits(&sp, 1.0)?;
    let space = Space::new(&sp);
    let eps = config.analysis_eps(s.eps());
    let mst_keys: HashSet<(usize, usize)> = summary.mst_edges.iter().map(Edge::key).collect();
    let streams: Vec<usize> = config.streams.clone().unwrap_or_else(|| (0..i_eps(eps)).collect());
    let parts: Vec<LevelPartition> = streams
        .iter()
        .map(|&j| classify_edges(s, &summary, eps, j))
        .collect::<Result<_, _>>()?;
    let ctx = Context {
        space: &space,
        oracle,
        mst_keys: &mst_keys,
        config,
        eps,
        w0: summary.w0,
    };
    let outcomes: Vec<StreamOutcome> = parts.par_iter().map(|p| run_stream(&ctx, p)).collect::<Result<_, _>>()?;

    let mut anomalies = Vec::new();
    let mut fallbacks = Vec::new();
    let mut reports = Vec::new();
    let (mut found, mut failed) = (0, 0);
    let mut conserved = true;
    for o in outcomes {
        anomalies.extend(o.anomalies);
        fallbacks.extend(o.fallbacks);
        found += o.canonical.0;
        failed += o.canonical.1;
        conserved &= o.conserved;
        reports.push(o.report);
    }
    let min_c = reports
        .iter()
        .map(|r| r.min_c)
        .try_fold(1.0f64, |acc, c| c.map(|c| acc.max(c)));
    let max_k = reports.iter().map(|r| r.max_k_degree).max().unwrap_or(0);
    let b_count = reports.iter().map(|r| r.b_count).sum();
    let b_weight = reports.iter().fold(0.0, |a, r| a + r.b_weight);
    let weight_bound = 4.0 * config.g * max_k as f64 / eps * summary.total_weight / (1.0 - eps);
    let b = BReport {
        count: b_count,
        weight: b_weight,
        max_k_degree: max_k,
        weight_bound,
        within: b_weight <= weight_bound * (1.0 + 1e-9),
    };
    if !b.within {
        anomalies.push(Anomaly {
            j: 0,
            level: 0,
            kind: "b_weight".into(),
            detail: format!("w(B) = {b_weight} exceeds {weight_bound}"),
        });
    }
    let initial = ledger.initial_total();
    let bound = 2.0 * sp.mst_weight();
    Ok(CertReport {
        schema: 1,
        config: ConfigEcho {
            n: s.n(),
            m: s.m(),
            eps_spanner: s.eps(),
            eps_analysis: eps,
            g: config.g,
            w0: summary.w0,
            mst_weight: summary.total_weight,
            i_eps: i_eps(eps),
            i_n: i_n(s.n()),
            streams,
        },
        credit: CreditSummary {
            initial_per_c: initial,
            bound_per_c: bound,
            within: initial <= bound * (1.0 + 1e-9),
        },
        streams: reports,
        b,
        min_feasible_c: min_c,
        canonical: CanonicalStats {
            attempted: found + failed,
            found,
            failed,
        },
        conservation_ok: conserved,
        anomalies,
        fallbacks,
    })
}

fn run_stream(ctx: &Context, part: &LevelPartition) -> Result<StreamOutcome, CertError> {
    let space = ctx.space;
    let j = part.j;
    let mut anomalies = Vec::new();
    let ell0 = part.ell(0);
    let base = base_clusters(space, ell0);
    let undersized = base.iter().any(|c| c.undersized);
    let ratios: Vec<f64> = base.iter().map(|c| c.diameter / ell0).collect();
    let base_dc1 = base.iter().all(|c| {
        let need = if c.undersized { c.diameter } else { c.diameter.max(ell0 / 2.0) };
        c.credit_units >= need * (1.0 - 1e-9)
    });
    let base_dc2 = base
        .iter()
        .all(|c| c.diameter <= ctx.config.g * ell0 && (c.undersized || c.diameter >= ell0 * (1.0 - 1e-12)));
    if !base_dc1 {
        note(&mut anomalies, j, 0, "dc1", "a base cluster holds less credit than its floor".into());
    }
    if !base_dc2 {
        note(&mut anomalies, j, 0, "dc2", "a base cluster diameter is out of range".into());
    }
    let base_report = BaseReport {
        ell0,
        clusters: base.len(),
        undersized,
        min_diam_ratio: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max_diam_ratio: ratios.iter().copied().fold(0.0, f64::max),
        dc1_ok: base_dc1,
        dc2_ok: base_dc2,
        dump: ctx.config.dump_clusters.then(|| base.iter().map(ClusterDump::from).collect()),
    };
    let mut report = StreamReport {
        j,
        base: base_report,
        levels: Vec::new(),
        degenerate: None,
        beyond_i_n: part.beyond_i_n(),
        min_c_closed: Some(1.0),
        min_c: Some(1.0),
        max_k_degree: 0,
        b_count: 0,
        b_weight: 0.0,
    };
    let mut fallbacks = Vec::new();
    let mut canonical = (0, 0);
    if ctx.space.sp.n_original() <= 3 {
        report.degenerate = Some("at most three points: base clusters only".into());
        return Ok(StreamOutcome {
            report,
            anomalies,
            fallbacks,
            canonical,
            conserved: true,
        });
    }

    let n = space.n();
    let mut prev = base;
    let mut owner = owner_map(n, &prev);
    let total_pieces = space.sp.piece_count();
    let mut accounts: Vec<LevelAccounts> = Vec::new();
    for i in 1..=part.max_level() {
        let ell = part.ell(i);
        let edges: Vec<Edge> = part
            .level(i)
            .iter()
            .copied()
            .filter(|e| !ctx.mst_keys.contains(&e.key()))
            .collect();
        let kg = build_cluster_graph(&owner, prev.len(), &edges)?;
        let centers: Vec<Option<usize>> = prev.iter().map(|c| c.center).collect();
        let separation = check_center_separation(&kg, &centers, ctx.oracle, ell, ctx.eps);
        let tree = ClusterTree::new(space, &prev, &owner);
        let trivial = prev.len() == 1 && edges.is_empty();
        let built = LevelBuilder::new(LevelInput {
            space,
            prev: &prev,
            owner: &owner,
            tree: &tree,
            level: i,
            ell,
            eps: ctx.eps,
            g: ctx.config.g,
        })
        .run(&edges);
        for a in &built.anomalies {
            note(&mut anomalies, j, i, "structure", a.clone());
        }

        let units: Vec<f64> = prev.iter().map(|c| c.credit_units).collect();
        let cctx = CanonicalContext {
            tree: &tree,
            owner: &owner,
            units: &units,
            piece_units: ctx.w0,
            ell,
            eps: ctx.eps,
            g: ctx.config.g,
        };
        let pairs: Vec<Option<Result<CanonicalPair, CanonicalFailure>>> = built
            .drafts
            .iter()
            .enumerate()
            .map(|(id, d)| {
                if !d.from_phase12() {
                    return None;
                }
                let path = built.diameter_paths[id].as_deref().unwrap_or(&[]);
                Some(canonical_pair(&cctx, d, &built.clusters[id], path, built.connecting_pieces[id]))
            })
            .collect();
        let mut found = 0;
        let mut failed = 0;
        for (id, p) in pairs.iter().enumerate() {
            match p {
                Some(Ok(_)) => found += 1,
                Some(Err(reason)) => {
                    failed += 1;
                    fallbacks.push(FallbackEntry {
                        j,
                        level: i,
                        cluster: id,
                        reason: reason.clone(),
                        vertices: built.clusters[id].vertices.clone(),
                    });
                }
                None => {}
            }
        }
        canonical.0 += found;
        canonical.1 += failed;

        let free_before = total_pieces - prev.iter().map(|c| base::internal_pieces(space, &c.vertices)).sum::<usize>();
        let acc = assign_payments(&PaymentInput {
            built: &built,
            canonical: &pairs,
            owner: &owner,
            units: &units,
            free_pieces_before: free_before,
            piece_units: ctx.w0,
            level_edges: &edges,
            ell,
            eps: ctx.eps,
            g: ctx.config.g,
        });

        let g = ctx.config.g;
        let mut dc2_ok = true;
        let mut ediam_ok = true;
        let mut max_ratio = 0.0f64;
        for (id, diameter, cap) in dc2_violations(&built.clusters, ell, g) {
            dc2_ok = false;
            let c = &built.clusters[id];
            note(&mut anomalies, j, i, "dc2", format!("cluster {id} ({}) diameter {diameter} > {cap}", c.provenance()));
        }
        for (c, d) in built.clusters.iter().zip(&built.drafts) {
            max_ratio = max_ratio.max(c.diameter / ell);
            if c.origin == Origin::Phase4 {
                let ed = tree.path_ediam(&d.members);
                if c.diameter > 2.0 * ed * (1.0 + 1e-9) + 1e-12 {
                    ediam_ok = false;
                    note(&mut anomalies, j, i, "ediam", format!("cluster {} diameter {} > 2 x ediam {ed}", c.id, c.diameter));
                }
            }
        }
        for &(id, have, need) in &acc.dc1_failures {
            note(&mut anomalies, j, i, "dc1", format!("cluster {id} holds {have} of {need} units"));
        }
        let both_short = acc.unpaid.iter().filter(|u| u.both_short_internal).count();
        for u in &acc.unpaid {
            let kind = if u.both_short_internal { "both_short_unpaid" } else { "unpaid" };
            note(&mut anomalies, j, i, kind, format!("edge {}-{} (w = {}) has no payer", u.edge.u, u.edge.v, u.edge.w));
        }
        if !kg.is_simple() {
            note(
                &mut anomalies,
                j,
                i,
                "k_not_simple",
                format!("{} self loops, {} parallel edges", kg.self_loops.len(), kg.parallel.len()),
            );
        }
        if !separation.ok() {
            note(
                &mut anomalies,
                j,
                i,
                "separation",
                format!(
                    "{} close center pairs, {} far neighbours, {} virtual",
                    separation.close_pairs.len(),
                    separation.far_neighbors.len(),
                    separation.virtual_incident.len()
                ),
            );
        }
        let b_bound = 4.0 * g * kg.max_degree as f64 / ctx.eps;
        if acc.b_edges.len() as f64 > b_bound {
            note(&mut anomalies, j, i, "b_count", format!("|B| = {} exceeds {b_bound}", acc.b_edges.len()));
        }
        let exceptional = built.exceptional();
        let saturated = built.count(Origin::Orphan) > 0;
        let exception_shape_ok = (exceptional && !saturated && !edges.is_empty()).then(|| {
            let alive = vec![true; tree.len()];
            let all: Vec<usize> = (0..tree.len()).collect();
            if !tree.is_path(&all, &alive) {
                return false;
            }
            let path = tree.path_order(&all, &alive);
            let mut near = vec![false; tree.len()];
            let mut sum = 0.0;
            for &x in &path {
                sum += tree.weight[x];
                if sum > 2.0 * ell {
                    break;
                }
                near[x] = true;
            }
            sum = 0.0;
            for &x in path.iter().rev() {
                sum += tree.weight[x];
                if sum > 2.0 * ell {
                    break;
                }
                near[x] = true;
            }
            edges.iter().all(|e| near[owner[e.u]] || near[owner[e.v]])
        });
        if exception_shape_ok == Some(false) {
            note(&mut anomalies, j, i, "exception_shape", "exception level without the path-and-affix shape".into());
        }
        report.max_k_degree = report.max_k_degree.max(kg.max_degree);
        report.b_count += acc.b_edges.len();
        report.b_weight += acc.b_weight();

        let mut next = built.clusters.clone();
        for (c, &r) in next.iter_mut().zip(&acc.retained) {
            c.credit_units = r;
        }
        let counts = PhaseCounts {
            phase1: built.count(Origin::Phase1),
            phase2: built.count(Origin::Phase2),
            phase3_augmented: built.drafts.iter().filter(|d| d.augmented_phase3).count(),
            phase4: built.count(Origin::Phase4),
            phase4_long: built.drafts.iter().filter(|d| d.phase4.is_some_and(|s| s.long)).count(),
            orphan: built.count(Origin::Orphan),
        };
        report.levels.push(LevelReport {
            j,
            i,
            ell,
            edges: edges.len(),
            clusters: next.len(),
            trivial,
            exceptional,
            saturated,
            phases: counts,
            max_diam_ratio: max_ratio,
            dc1_ok: acc.dc1_failures.is_empty(),
            dc2_ok,
            k_degree: kg.max_degree,
            k_simple: kg.is_simple(),
            k_degree_bound: ctx
                .oracle
                .ambient_dim()
                .map(|d| (12.0 / ctx.eps).powi(d as i32)),
            separation,
            ediam_ok,
            paid_weight: acc.paid_weight(),
            b_count: acc.b_edges.len(),
            b_weight: acc.b_weight(),
            b_count_bound: b_bound,
            fallback: acc.fallback.is_some(),
            canonical_found: found,
            canonical_failed: failed,
            unpaid: acc.unpaid.len(),
            both_short_unpaid: both_short,
            exception_shape_ok,
            min_c: acc.min_c(),
            replay: None,
            dump: ctx.config.dump_clusters.then(|| next.iter().map(ClusterDump::from).collect()),
        });
        if let Some(k) = report.levels.last().and_then(|l| l.k_degree_bound) {
            if kg.max_degree as f64 > k {
                note(&mut anomalies, j, i, "k_degree", format!("degree {} exceeds packing bound {k}", kg.max_degree));
            }
        }
        accounts.push(acc);
        owner = owner_map(n, &next);
        prev = next;
    }

    let closed = accounts
        .iter()
        .map(LevelAccounts::min_c)
        .try_fold(1.0f64, |acc, c| c.map(|c| acc.max(c)));
    let searched = search_min_c(|c| accounts.iter().all(|a| a.feasible(c)), 1.0, ctx.config.c_max);
    report.min_c_closed = closed;
    report.min_c = searched;
    match (closed, searched) {
        (Some(a), Some(b)) if b < a * (1.0 - 1e-9) || b > round_up_3(a) * (1.0 + 1e-3) => {
            note(&mut anomalies, j, 0, "min_c", format!("bisection {b} disagrees with closed form {a}"));
        }
        (Some(a), None) if a <= ctx.config.c_max => note(&mut anomalies, j, 0, "min_c", format!("bisection failed below {a}")),
        (None, Some(b)) => note(&mut anomalies, j, 0, "min_c", format!("bisection found {b} but no closed form")),
        _ => {}
    }
    let mut conserved = true;
    if let Some(c) = searched {
        for (acc, lr) in accounts.iter().zip(report.levels.iter_mut()) {
            let r = acc.replay(c);
            if !r.negative.is_empty() {
                note(&mut anomalies, j, lr.i, "negative_balance", format!("{} payments overdraw at c = {c}", r.negative.len()));
            }
            if !r.conserved() {
                conserved = false;
                note(&mut anomalies, j, lr.i, "conservation", format!("residual {} of {}", r.residual, r.initial));
            }
            lr.replay = Some(r);
        }
    }
    Ok(StreamOutcome {
        report,
        anomalies,
        fallbacks,
        canonical,
        conserved,
    })
}

fn note(out: &mut Vec<Anomaly>, j: usize, level: usize, kind: &str, detail: String) {
    out.push(Anomaly {
        j,
        level,
        kind: kind.into(),
        detail,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{build_instance, generate, GenKind, GenSpec};
    use crate::metric::{metric_graph, MetricSpace, Norm, PointSet};

    fn collinear(n: usize, eps: f64) -> crate::harness::Instance {
        build_instance(generate(&GenSpec::new(GenKind::Collinear, n, 1, 0)).unwrap(), eps).unwrap()
    }

    #[test]
    fn base_clusters_split_a_path() {
        let inst = collinear(11, 0.5);
        let summary = mst_summary(inst.spanner.base()).unwrap();
        let sp = subdivide(&inst.spanner, &summary);
        let space = Space::new(&sp);
        let vs: Vec<Vec<usize>> = base_clusters(&space, 2.0).into_iter().map(|c| c.vertices).collect();
        assert_eq!(vs, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8, 9, 10]]);
    }

    #[test]
    fn two_points_certify_trivially() {
        let inst = collinear(2, 0.5);
        let r = certify(&inst.spanner, &inst.metric, &CertConfig::default()).unwrap();
        assert!(r.certified());
        assert!(r.streams.iter().all(|s| s.base.clusters == 1 && s.degenerate.is_some()));
    }

    #[test]
    fn collinear_mst_pays_nothing() {
        let inst = collinear(10, 0.5);
        assert_eq!(inst.spanner.m(), 9);
        let r = certify(&inst.spanner, &inst.metric, &CertConfig::default()).unwrap();
        assert!(r.certified());
        assert_eq!(r.min_feasible_c, Some(1.0));
        assert!(r.levels().all(|l| l.paid_weight == 0.0 && l.edges == 0));
        assert_eq!(r.b.count, 0);
        assert!(r.conservation_ok);
    }

    #[test]
    fn random_plane_certifies() {
        let points = generate(&GenSpec::new(GenKind::UniformCube, 64, 2, 4)).unwrap();
        let inst = build_instance(points, 0.25).unwrap();
        let r = certify(&inst.spanner, &inst.metric, &CertConfig::default()).unwrap();
        assert!(r.certified(), "{:?}", r.anomalies);
        assert!(r.credit.within);
        assert_eq!(r.config.streams.len(), r.config.i_eps);
        let text = serde_json::to_string(&r).unwrap();
        let back: CertReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn rejects_bad_config_and_oracle() {
        let inst = collinear(5, 0.5);
        let bad = CertConfig {
            g: 0.5,
            ..CertConfig::default()
        };
        assert!(matches!(certify(&inst.spanner, &inst.metric, &bad), Err(CertError::InvalidConfig(_))));
        let small = MetricSpace::from_points(PointSet::new(vec![vec![0.0], vec![1.0]]).unwrap(), Norm::L2);
        assert!(matches!(
            certify(&inst.spanner, &small, &CertConfig::default()),
            Err(CertError::SizeMismatch { .. })
        ));
        let _ = metric_graph(&small).unwrap();
    }
}
