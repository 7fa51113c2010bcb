use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::metric::Edge;
use crate::spanner::{Spanner, SpannerMetrics};

use super::{MstSummary, PartitionError};

/// `ceil(log2(1/eps))`, the number of `j` streams.
pub fn i_eps(eps: f64) -> usize {
    ((1.0 / eps).log2() - 1e-12).ceil().max(1.0) as usize
}

/// `ceil(log2 n)`.
pub fn i_n(n: usize) -> usize {
    n.max(1).next_power_of_two().trailing_zeros() as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeClass {
    /// `w <= w0`.
    Light,
    /// `w0 < w <= 2 w0 / eps`.
    J0,
    /// `2^j / eps^i w0 < w <= 2^(j+1) / eps^i w0`, with `i >= 1`.
    Level { i: usize, j: usize },
}

fn bracket_top(i: usize, j: usize, w0: f64, eps: f64) -> f64 {
    2f64.powi(j as i32 + 1) / eps.powi(i as i32) * w0
}

/// Class of a single weight. `J_0` takes precedence over the overlapping
/// `i = 0` and `i = 1, j = 0` brackets; past that the smallest `i` and then
/// the smallest `j` whose bracket contains `w` wins, since brackets overlap
/// when `1/eps` is not a power of two.
pub fn classify_weight(w: f64, w0: f64, eps: f64) -> EdgeClass {
    if w <= w0 {
        return EdgeClass::Light;
    }
    if w <= 2.0 * w0 / eps {
        return EdgeClass::J0;
    }
    let streams = i_eps(eps);
    let mut i = 1;
    loop {
        for j in 0..streams {
            let top = bracket_top(i, j, w0, eps);
            if w > top / 2.0 && w <= top {
                return EdgeClass::Level { i, j };
            }
        }
        i += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelPartition {
    pub j: usize,
    pub eps: f64,
    pub w0: f64,
    pub i_eps: usize,
    pub i_n: usize,
    pub l_s: Vec<Edge>,
    pub j_0: Vec<Edge>,
    /// `Pi_i^j` for `i >= 1`, edges in `(weight, u, v)` order.
    pub levels: BTreeMap<usize, Vec<Edge>>,
    /// `ell_i` for every level `0..=max_level()`.
    pub ell: BTreeMap<usize, f64>,
    /// Edges claimed by other streams.
    pub other_streams: usize,
}

impl LevelPartition {
    pub fn ell(&self, i: usize) -> f64 {
        bracket_top(i, self.j, self.w0, self.eps)
    }

    /// Highest level with a scale: `I_n - 1`, or higher if this stream has
    /// edges beyond it.
    pub fn max_level(&self) -> usize {
        let top = self.levels.keys().next_back().copied().unwrap_or(0);
        top.max(self.i_n.saturating_sub(1))
    }

    /// Levels at or above `I_n` that received edges.
    pub fn beyond_i_n(&self) -> Vec<usize> {
        self.levels.keys().copied().filter(|&i| i >= self.i_n).collect()
    }

    pub fn level(&self, i: usize) -> &[Edge] {
        self.levels.get(&i).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn l_s_weight(&self) -> f64 {
        self.l_s.iter().map(|e| e.w).sum()
    }

    pub fn j_0_weight(&self) -> f64 {
        self.j_0.iter().map(|e| e.w).sum()
    }

    pub fn level_weight(&self, i: usize) -> f64 {
        self.level(i).iter().map(|e| e.w).sum()
    }

    pub fn level_count(&self) -> usize {
        self.levels.values().map(Vec::len).sum()
    }
}

fn check_eps(eps: f64) -> Result<(), PartitionError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(PartitionError::EpsOutOfRange { eps })
    }
}

/// Classifies the edges of `s` for stream `j` at analysis parameter `eps`.
pub fn classify_edges(
    s: &Spanner,
    summary: &MstSummary,
    eps: f64,
    j: usize,
) -> Result<LevelPartition, PartitionError> {
    check_eps(eps)?;
    let streams = i_eps(eps);
    if j >= streams {
        return Err(PartitionError::StreamOutOfRange { j, i_eps: streams });
    }
    let w0 = summary.w0;
    let mut part = LevelPartition {
        j,
        eps,
        w0,
        i_eps: streams,
        i_n: i_n(s.n()),
        l_s: Vec::new(),
        j_0: Vec::new(),
        levels: BTreeMap::new(),
        ell: BTreeMap::new(),
        other_streams: 0,
    };
    for &e in s.edges() {
        match classify_weight(e.w, w0, eps) {
            EdgeClass::Light => part.l_s.push(e),
            EdgeClass::J0 => part.j_0.push(e),
            EdgeClass::Level { i, j: jj } if jj == j => part.levels.entry(i).or_default().push(e),
            EdgeClass::Level { .. } => part.other_streams += 1,
        }
    }
    for i in 0..=part.max_level() {
        part.ell.insert(i, part.ell(i));
    }
    Ok(part)
}

/// One partition per stream `j in 0..I_eps`.
pub fn classify_all(s: &Spanner, summary: &MstSummary, eps: f64) -> Result<Vec<LevelPartition>, PartitionError> {
    check_eps(eps)?;
    (0..i_eps(eps)).map(|j| classify_edges(s, summary, eps, j)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassTotal {
    pub count: usize,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub i: usize,
    pub j: usize,
    pub count: usize,
    pub weight: f64,
    pub ell: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub schema: u32,
    pub eps: f64,
    pub w0: f64,
    pub i_eps: usize,
    pub i_n: usize,
    #[serde(rename = "L_S")]
    pub l_s: ClassTotal,
    #[serde(rename = "J_0")]
    pub j_0: ClassTotal,
    pub levels: Vec<LevelSummary>,
    /// Number of spanner edges covered by the classes above.
    pub classified: usize,
}

impl PartitionReport {
    pub fn from_partitions(parts: &[LevelPartition]) -> PartitionReport {
        let first = &parts[0];
        let mut levels = Vec::new();
        for p in parts {
            for i in 1..=p.max_level() {
                levels.push(LevelSummary {
                    i,
                    j: p.j,
                    count: p.level(i).len(),
                    weight: p.level_weight(i),
                    ell: p.ell(i),
                });
            }
        }
        levels.sort_by_key(|l| (l.i, l.j));
        let classified = first.l_s.len() + first.j_0.len() + parts.iter().map(LevelPartition::level_count).sum::<usize>();
        PartitionReport {
            schema: 1,
            eps: first.eps,
            w0: first.w0,
            i_eps: first.i_eps,
            i_n: first.i_n,
            l_s: ClassTotal {
                count: first.l_s.len(),
                weight: first.l_s_weight(),
            },
            j_0: ClassTotal {
                count: first.j_0.len(),
                weight: first.j_0_weight(),
            },
            levels,
            classified,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightBoundReport {
    pub delta: f64,
    pub l_s_weight: f64,
    /// `2 delta w(MST)`.
    pub l_s_bound: f64,
    pub j_0_weight: f64,
    /// `4 delta / eps w(MST)`.
    pub j_0_bound: f64,
    pub light_ok: bool,
    pub j_0_ok: bool,
}

impl WeightBoundReport {
    pub fn holds(&self) -> bool {
        self.light_ok && self.j_0_ok
    }
}

/// Checks `w(L_S) <= 2 delta w(MST)` and `w(J_0) <= 4 delta / eps w(MST)`
/// with `delta` the measured sparsity.
pub fn check_weight_bounds(part: &LevelPartition, metrics: &SpannerMetrics, delta: f64) -> WeightBoundReport {
    let l_s_weight = part.l_s_weight();
    let j_0_weight = part.j_0_weight();
    let l_s_bound = 2.0 * delta * metrics.mst_weight;
    let j_0_bound = 4.0 * delta / part.eps * metrics.mst_weight;
    WeightBoundReport {
        delta,
        l_s_weight,
        l_s_bound,
        j_0_weight,
        j_0_bound,
        light_ok: l_s_weight <= l_s_bound * (1.0 + 1e-9),
        j_0_ok: j_0_weight <= j_0_bound * (1.0 + 1e-9),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stream_counts() {
        assert_eq!(i_eps(0.25), 2);
        assert_eq!(i_eps(0.5), 1);
        assert_eq!(i_eps(0.1), 4);
        assert_eq!(i_eps(0.9), 1);
        assert_eq!(i_n(2), 1);
        assert_eq!(i_n(256), 8);
        assert_eq!(i_n(257), 9);
    }

    #[test]
    fn weight_classes() {
        assert_eq!(classify_weight(0.5, 1.0, 0.25), EdgeClass::Light);
        assert_eq!(classify_weight(1.0, 1.0, 0.25), EdgeClass::Light);
        assert_eq!(classify_weight(3.0, 1.0, 0.25), EdgeClass::J0);
        assert_eq!(classify_weight(8.0, 1.0, 0.25), EdgeClass::J0);
        assert_eq!(classify_weight(10.0, 1.0, 0.25), EdgeClass::Level { i: 1, j: 1 });
        assert_eq!(classify_weight(20.0, 1.0, 0.25), EdgeClass::Level { i: 2, j: 0 });
        assert_eq!(classify_weight(40.0, 1.0, 0.25), EdgeClass::Level { i: 2, j: 1 });
    }

    #[test]
    fn overlapping_brackets_pick_smallest_level() {
        // eps = 0.3: Pi_1^1 = (6.67, 13.3] and Pi_2^0 = (11.1, 22.2] overlap.
        assert_eq!(classify_weight(12.0, 1.0, 0.3), EdgeClass::Level { i: 1, j: 1 });
        assert_eq!(classify_weight(14.0, 1.0, 0.3), EdgeClass::Level { i: 2, j: 0 });
    }
}
