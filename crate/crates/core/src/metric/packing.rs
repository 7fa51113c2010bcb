use serde::Serialize;

use super::{MetricSpace, PackingError, METRIC_TOLERANCE};

/// Where the enclosing ball of a packing test is centered.
#[derive(Clone, Debug, PartialEq)]
pub enum Center {
    /// One of the points of the space.
    Index(usize),
    /// Arbitrary coordinates; only valid for coordinate metrics.
    Point(Vec<f64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PackingOutcome {
    pub count: usize,
    pub bound: f64,
    pub pass: bool,
}

/// The doubling-metric packing bound `(4R/r)^d`.
pub fn packing_bound(big_r: f64, small_r: f64, d: u32) -> f64 {
    (4.0 * big_r / small_r).powi(d as i32)
}

/// Checks that `subset` is an r-separated set inside the ball of radius
/// `big_r` around `center`, then compares its size against the packing
/// bound. Precondition failures are errors; a bound violation is reported
/// as `pass == false`.
pub fn packing_test(
    space: &MetricSpace,
    subset: &[usize],
    center: &Center,
    big_r: f64,
    small_r: f64,
    d: u32,
) -> Result<PackingOutcome, PackingError> {
    if !(big_r > 0.0) || !(small_r > 0.0) {
        return Err(PackingError::BadRadius { big_r, small_r });
    }
    if d == 0 {
        return Err(PackingError::ZeroDimension);
    }
    for &i in subset {
        if i >= space.len() {
            return Err(PackingError::InvalidPoint { index: i });
        }
    }
    let to_center = |i: usize| -> Result<f64, PackingError> {
        match center {
            Center::Index(c) => {
                if *c >= space.len() {
                    return Err(PackingError::InvalidPoint { index: *c });
                }
                Ok(space.distance(*c, i))
            }
            Center::Point(coords) => match space.kind() {
                super::MetricKind::Lp { points, norm } => {
                    if coords.len() != points.dim() {
                        return Err(PackingError::CenterDimension {
                            expected: points.dim(),
                            found: coords.len(),
                        });
                    }
                    Ok(norm.distance(coords, points.point(i)))
                }
                super::MetricKind::Matrix { .. } => Err(PackingError::CoordinateCenterOnMatrix),
            },
        }
    };
    for &i in subset {
        let dist = to_center(i)?;
        if dist > big_r * (1.0 + METRIC_TOLERANCE) {
            return Err(PackingError::NotInBall { index: i, distance: dist, radius: big_r });
        }
    }
    for (a, &i) in subset.iter().enumerate() {
        for &j in &subset[a + 1..] {
            let dist = space.distance(i, j);
            if !(dist > small_r) {
                return Err(PackingError::PairTooClose { i, j, distance: dist, separation: small_r });
            }
        }
    }
    let bound = packing_bound(big_r, small_r, d);
    let count = subset.len();
    Ok(PackingOutcome {
        count,
        bound,
        pass: (count as f64) <= bound,
    })
}

/// Greedy r-net of `candidates` in the given order: a point is kept when it
/// is farther than `r` from every point kept so far.
pub fn greedy_net(space: &MetricSpace, candidates: &[usize], r: f64) -> Vec<usize> {
    let mut net: Vec<usize> = Vec::new();
    for &c in candidates {
        if net.iter().all(|&x| space.distance(x, c) > r) {
            net.push(c);
        }
    }
    net
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{Norm, PointSet};

    fn line(xs: &[f64]) -> MetricSpace {
        MetricSpace::from_points(PointSet::new(xs.iter().map(|&x| vec![x]).collect()).unwrap(), Norm::L2)
    }

    #[test]
    fn single_point() {
        let m = line(&[0.0]);
        let out = packing_test(&m, &[0], &Center::Index(0), 1.0, 1.0, 1).unwrap();
        assert_eq!(out, PackingOutcome { count: 1, bound: 4.0, pass: true });
    }

    #[test]
    fn four_points_on_a_line() {
        let m = line(&[0.0, 0.6, 1.2, 1.8]);
        let out = packing_test(&m, &[0, 1, 2, 3], &Center::Point(vec![0.9]), 0.9, 0.5, 1).unwrap();
        assert_eq!(out.count, 4);
        assert!((out.bound - 7.2).abs() < 1e-12);
        assert!(out.pass);
    }

    #[test]
    fn equal_radii_in_the_plane() {
        assert_eq!(packing_bound(1.0, 1.0, 2), 16.0);
        assert_eq!(packing_bound(3.0, 3.0, 2), 16.0);
    }

    #[test]
    fn precondition_failures() {
        let m = line(&[0.0, 0.4, 5.0]);
        assert!(matches!(
            packing_test(&m, &[0, 2], &Center::Index(0), 1.0, 0.1, 1),
            Err(PackingError::NotInBall { index: 2, .. })
        ));
        assert!(matches!(
            packing_test(&m, &[0, 1], &Center::Index(0), 1.0, 0.5, 1),
            Err(PackingError::PairTooClose { i: 0, j: 1, .. })
        ));
    }

    #[test]
    fn greedy_net_is_separated() {
        let m = line(&[0.0, 0.1, 0.3, 0.35, 0.9]);
        let net = greedy_net(&m, &[0, 1, 2, 3, 4], 0.25);
        assert_eq!(net, vec![0, 2, 4]);
    }
}
