use std::collections::BTreeMap;
use std::io::Write;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{certify, CertConfig};
use crate::metric::{metric_graph, MetricSpace, Norm, PointSet};
use crate::spanner::{greedy_spanner_metric, spanner_metrics_with, Spanner, SpannerMetrics};

use super::{generate, GenKind, GenSpec};

/// Greedy spanner of a Euclidean point set together with its metric.
pub struct Instance {
    pub metric: MetricSpace,
    pub spanner: Spanner,
}

pub fn build_instance(points: PointSet, eps: f64) -> anyhow::Result<Instance> {
    let metric = MetricSpace::from_points(points, Norm::L2);
    let g = Arc::new(metric_graph(&metric)?);
    let spanner = greedy_spanner_metric(&metric, g, eps)?;
    Ok(Instance { metric, spanner })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub kind: GenKind,
    pub n: usize,
    pub dim: usize,
    pub eps: f64,
    pub seed: u64,
}

/// One CSV row. Columns, in order: generator, n, dim, eps, seed,
/// lightness, sparsity, max_stretch, build_ms, certified, min_c.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub generator: String,
    pub n: usize,
    pub dim: usize,
    pub eps: f64,
    pub seed: u64,
    pub lightness: f64,
    pub sparsity: f64,
    pub max_stretch: f64,
    pub build_ms: u64,
    pub certified: bool,
    /// Empty when certification was skipped or found no constant.
    pub min_c: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub certify: bool,
    pub timing: bool,
    pub jobs: usize,
}

/// Full grid in generator, n, dim, eps, seed order.
pub fn grid(kinds: &[GenKind], ns: &[usize], dims: &[usize], epss: &[f64], seeds: &[u64]) -> Vec<SweepCell> {
    let mut cells = Vec::new();
    for &kind in kinds {
        for &n in ns {
            for &dim in dims {
                for &eps in epss {
                    for &seed in seeds {
                        cells.push(SweepCell { kind, n, dim, eps, seed });
                    }
                }
            }
        }
    }
    cells
}

pub fn run_cell(cell: &SweepCell, opts: &SweepOptions) -> anyhow::Result<SweepRow> {
    let points = generate(&GenSpec::new(cell.kind, cell.n, cell.dim, cell.seed))?;
    let start = Instant::now();
    let inst = build_instance(points, cell.eps)?;
    let build_ms = if opts.timing { start.elapsed().as_millis() as u64 } else { 0 };
    let m: SpannerMetrics = spanner_metrics_with(&inst.spanner, &inst.metric)?;
    let (certified, min_c) = if opts.certify {
        let r = certify(&inst.spanner, &inst.metric, &CertConfig::default())?;
        (r.certified(), r.min_feasible_c)
    } else {
        (false, None)
    };
    Ok(SweepRow {
        generator: cell.kind.name().to_string(),
        n: cell.n,
        dim: cell.dim,
        eps: cell.eps,
        seed: cell.seed,
        lightness: m.lightness,
        sparsity: m.sparsity,
        max_stretch: m.max_stretch,
        build_ms,
        certified,
        min_c,
    })
}

/// Runs every cell on a pool of `opts.jobs` threads. Rows reach `sink` in
/// grid order as soon as all earlier cells are done, so an interrupted
/// sweep leaves a valid prefix behind.
pub fn run_sweep<W: Write + Send>(
    cells: &[SweepCell],
    opts: &SweepOptions,
    sink: W,
) -> anyhow::Result<Vec<SweepRow>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.max(1)).build()?;
    let writer = Mutex::new((csv::Writer::from_writer(sink), 0usize, BTreeMap::new()));
    let results: Vec<anyhow::Result<SweepRow>> = pool.install(|| {
        cells
            .par_iter()
            .enumerate()
            .map(|(k, cell)| {
                let row = run_cell(cell, opts)?;
                let mut guard = writer.lock().expect("writer lock");
                let (w, next, pending) = &mut *guard;
                pending.insert(k, row.clone());
                while let Some(r) = pending.remove(next) {
                    w.serialize(&r)?;
                    *next += 1;
                }
                w.flush()?;
                Ok(row)
            })
            .collect()
    });
    results.into_iter().collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], sink: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Seed-averaged lightness and sparsity at consecutive sizes of one
/// (generator, dim, eps) family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub generator: String,
    pub dim: usize,
    pub eps: f64,
    pub n_from: usize,
    pub n_to: usize,
    pub lightness_ratio: f64,
    pub sparsity_ratio: f64,
}

pub fn growth_ratios(rows: &[SweepRow]) -> Vec<Growth> {
    let mut means: BTreeMap<(String, usize, u64), BTreeMap<usize, (f64, f64, usize)>> = BTreeMap::new();
    for r in rows {
        let e = means
            .entry((r.generator.clone(), r.dim, r.eps.to_bits()))
            .or_default()
            .entry(r.n)
            .or_insert((0.0, 0.0, 0));
        e.0 += r.lightness;
        e.1 += r.sparsity;
        e.2 += 1;
    }
    let mut out = Vec::new();
    for ((generator, dim, eps), by_n) in means {
        let avg: Vec<(usize, f64, f64)> = by_n
            .into_iter()
            .map(|(n, (l, s, k))| (n, l / k as f64, s / k as f64))
            .collect();
        for w in avg.windows(2) {
            out.push(Growth {
                generator: generator.clone(),
                dim,
                eps: f64::from_bits(eps),
                n_from: w[0].0,
                n_to: w[1].0,
                lightness_ratio: w[1].1 / w[0].1,
                sparsity_ratio: w[1].2 / w[0].2,
            });
        }
    }
    out
}
