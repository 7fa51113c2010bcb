use serde::{Deserialize, Serialize};

use super::cluster::Cluster;
use super::level::{Draft, Phase2Case};
use super::tree::ClusterTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CanonicalCase {
    Branching,
    TwoSubpaths,
    Overlap,
}

/// Reserve set and spare paying cluster of a Phase-1 or Phase-2 cluster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPair {
    pub case: CanonicalCase,
    /// Lower-level clusters along the diameter path, contracted.
    pub walk: Vec<usize>,
    /// The reserve set; its credit (plus connecting pieces) covers DC1.
    pub reserve: Vec<usize>,
    /// Pays for every level edge charged to the reserve set.
    pub spare: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CanonicalFailure {
    NotPhase12,
    WalkNotSimple,
    NoSpare,
    PxyInsideWalk,
    TooManySharingPaths { count: usize },
    InsufficientCredit { have: f64, need: f64 },
}

fn contract(path: &[usize], owner: &[usize]) -> Vec<usize> {
    let mut walk: Vec<usize> = Vec::new();
    for &v in path {
        let c = owner[v];
        if walk.last() != Some(&c) {
            walk.push(c);
        }
    }
    walk
}

fn push_unique(out: &mut Vec<usize>, items: &[usize]) {
    for &x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
}

/// Inputs shared by all clusters of a level.
pub struct CanonicalContext<'a> {
    pub tree: &'a ClusterTree,
    /// Vertex to lower-level cluster.
    pub owner: &'a [usize],
    /// Credit units of each lower-level cluster.
    pub units: &'a [f64],
    pub piece_units: f64,
    pub ell: f64,
    pub eps: f64,
    pub g: f64,
}

impl CanonicalContext<'_> {
    fn truncate(&self, mut set: Vec<usize>) -> Vec<usize> {
        let keep = (2.0 * self.g / self.eps).floor() as usize;
        set.truncate(keep.max(1));
        set
    }
}

/// `diameter_path` is a vertex path realising the cluster diameter and
/// `connecting` the number of pieces joining different members.
pub fn canonical_pair(
    ctx: &CanonicalContext,
    draft: &Draft,
    cluster: &Cluster,
    diameter_path: &[usize],
    connecting: usize,
) -> Result<CanonicalPair, CanonicalFailure> {
    let walk = contract(diameter_path, ctx.owner);
    let mut sorted = walk.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != walk.len() {
        return Err(CanonicalFailure::WalkNotSimple);
    }
    let on_walk = |x: usize| sorted.binary_search(&x).is_ok();
    let (case, reserve, spare) = if let Some(x) = draft.branching {
        let core = &draft.core;
        let spare = ctx.tree.adj[x]
            .iter()
            .map(|&(y, _)| y)
            .find(|&y| core.contains(&y) && !on_walk(y))
            .ok_or(CanonicalFailure::NoSpare)?;
        (CanonicalCase::Branching, ctx.truncate(walk.clone()), spare)
    } else if let Some(info) = &draft.phase2 {
        let ends = [info.cx, info.cy];
        if info.case == Phase2Case::SamePathOverlap {
            if info.pxy.iter().all(|&x| on_walk(x)) {
                return Err(CanonicalFailure::PxyInsideWalk);
            }
            let off: Vec<usize> = info.pxy.iter().copied().filter(|&x| !on_walk(x)).collect();
            let spare = off
                .iter()
                .copied()
                .filter(|x| !ends.contains(x))
                .min()
                .or_else(|| off.iter().copied().min())
                .ok_or(CanonicalFailure::NoSpare)?;
            let mut set = walk.clone();
            push_unique(&mut set, &info.p_outer);
            push_unique(&mut set, &info.q_outer);
            let rest: Vec<usize> = info.pxy.iter().copied().filter(|&x| x != spare).collect();
            push_unique(&mut set, &rest);
            set.retain(|&x| x != spare);
            (CanonicalCase::Overlap, ctx.truncate(set), spare)
        } else {
            let parts = [&info.p_inner, &info.p_outer, &info.q_inner, &info.q_outer];
            let shares = |p: &Vec<usize>| p.iter().any(|&x| on_walk(x) && !ends.contains(&x));
            let sharing: Vec<&Vec<usize>> = parts.iter().copied().filter(|p| shares(p)).collect();
            if sharing.len() > 2 {
                return Err(CanonicalFailure::TooManySharingPaths { count: sharing.len() });
            }
            let others: Vec<&Vec<usize>> = parts.iter().copied().filter(|p| !shares(p)).collect();
            let last = others.last().copied().ok_or(CanonicalFailure::NoSpare)?;
            let spare = last
                .iter()
                .copied()
                .filter(|&x| !on_walk(x) && !ends.contains(&x))
                .min()
                .ok_or(CanonicalFailure::NoSpare)?;
            let mut set = walk.clone();
            for p in &sharing {
                push_unique(&mut set, p);
            }
            for p in &others[..others.len() - 1] {
                push_unique(&mut set, p);
            }
            set.retain(|&x| x != spare);
            (CanonicalCase::TwoSubpaths, ctx.truncate(set), spare)
        }
    } else {
        return Err(CanonicalFailure::NotPhase12);
    };
    let have: f64 = reserve.iter().map(|&x| ctx.units[x]).sum::<f64>() + connecting as f64 * ctx.piece_units;
    let need = cluster.diameter.max(ctx.ell / 2.0);
    if have < need * (1.0 - 1e-9) {
        return Err(CanonicalFailure::InsufficientCredit { have, need });
    }
    Ok(CanonicalPair {
        case,
        walk,
        reserve,
        spare,
    })
}
