use std::f64::consts::TAU;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::metric::io::{parse_points, FormatError};
use crate::metric::{MetricError, PointSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    UniformCube,
    Grid,
    ClusteredGaussian,
    Circle,
    Collinear,
    ExplicitFile,
}

impl GenKind {
    pub fn name(self) -> &'static str {
        match self {
            GenKind::UniformCube => "uniform-cube",
            GenKind::Grid => "grid",
            GenKind::ClusteredGaussian => "clustered-gaussian",
            GenKind::Circle => "circle",
            GenKind::Collinear => "collinear",
            GenKind::ExplicitFile => "explicit-file",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub dim: usize,
    pub seed: u64,
    /// Source for `explicit-file`.
    pub path: Option<PathBuf>,
}

impl GenSpec {
    pub fn new(kind: GenKind, n: usize, dim: usize, seed: u64) -> GenSpec {
        GenSpec {
            kind,
            n,
            dim,
            seed,
            path: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BadSpec {
    #[error("need at least 2 points, got {n}")]
    TooFew { n: usize },
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("the circle generator needs dim >= 2, got {dim}")]
    CircleDim { dim: usize },
    #[error("explicit-file needs an input path")]
    MissingPath,
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Points for `spec`. Random kinds draw from ChaCha8 seeded with
/// `spec.seed`, so equal specs give equal points.
pub fn generate(spec: &GenSpec) -> Result<PointSet, BadSpec> {
    if spec.kind == GenKind::ExplicitFile {
        let path = spec.path.as_ref().ok_or(BadSpec::MissingPath)?;
        let text = std::fs::read_to_string(path).map_err(|source| BadSpec::Io {
            path: path.clone(),
            source,
        })?;
        let points = parse_points(&text)?;
        if points.len() < 2 {
            return Err(BadSpec::TooFew { n: points.len() });
        }
        return Ok(points);
    }
    let (n, dim) = (spec.n, spec.dim);
    if n < 2 {
        return Err(BadSpec::TooFew { n });
    }
    if dim == 0 {
        return Err(BadSpec::ZeroDim);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let rows: Vec<Vec<f64>> = match spec.kind {
        GenKind::UniformCube => (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect(),
        GenKind::Grid => {
            let mut side = (n as f64).powf(1.0 / dim as f64).round().max(1.0) as usize;
            while side.pow(dim as u32) < n {
                side += 1;
            }
            (0..n)
                .map(|mut k| {
                    let mut p = vec![0.0; dim];
                    for c in (0..dim).rev() {
                        p[c] = (k % side) as f64;
                        k /= side;
                    }
                    p
                })
                .collect()
        }
        GenKind::ClusteredGaussian => {
            let k = ((n as f64).sqrt() / 2.0).ceil().max(1.0) as usize;
            let centers: Vec<Vec<f64>> = (0..k).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect();
            let noise = Normal::new(0.0, 0.05).expect("valid deviation");
            (0..n)
                .map(|i| centers[i % k].iter().map(|&c| c + noise.sample(&mut rng)).collect())
                .collect()
        }
        GenKind::Circle => {
            if dim < 2 {
                return Err(BadSpec::CircleDim { dim });
            }
            (0..n)
                .map(|_| {
                    let t = rng.random::<f64>() * TAU;
                    let mut p = vec![0.0; dim];
                    p[0] = t.cos();
                    p[1] = t.sin();
                    p
                })
                .collect()
        }
        GenKind::Collinear => (0..n)
            .map(|i| {
                let mut p = vec![0.0; dim];
                p[0] = i as f64;
                p
            })
            .collect(),
        GenKind::ExplicitFile => unreachable!(),
    };
    Ok(PointSet::new(rows)?)
}
