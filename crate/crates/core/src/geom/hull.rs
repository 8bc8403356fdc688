use std::collections::BTreeSet;

use super::dot;
use super::lp::{maximize, LpOutcome};
use crate::error::{Error, Result};

/// Tolerance for every feasibility decision.
pub const FEASIBILITY_TOL: f64 = 1e-9;

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyInput("point list"))?;
    let d = first.len();
    for p in points {
        if p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: p.len() });
        }
    }
    Ok(d)
}

/// d-dimensional volume of the convex hull of `points` (d ≤ 3). A nonempty
/// set in dimension 0 has measure 1.
pub fn hull_measure(points: &[Vec<f64>]) -> Result<f64> {
    let d = check_points(points)?;
    match d {
        0 => Ok(1.0),
        1 => {
            let (lo, hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
            Ok(hi - lo)
        }
        2 => {
            let pts: Vec<[f64; 2]> = points.iter().map(|p| [p[0], p[1]]).collect();
            Ok(polygon_area(&convex_hull_2d(&pts)))
        }
        3 => {
            let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[1], p[2]]).collect();
            Ok(hull_volume_3d(&pts))
        }
        _ => Err(Error::Unsupported(format!("hull measure in dimension {d}"))),
    }
}

fn cross2(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain; collinear points are dropped.
pub(crate) fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross2(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross2(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        twice += a[0] * b[1] - a[1] * b[0];
    }
    (twice / 2.0).abs()
}

fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Volume by enumerating supporting planes through point triples, then
/// summing cones from the centroid over each distinct facet polygon.
/// Quartic in the point count, which stays below a few dozen here.
fn hull_volume_3d(points: &[[f64; 3]]) -> f64 {
    let n = points.len();
    if n < 4 {
        return 0.0;
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let scale = (0..3).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let tol = 1e-10 * scale;
    let centroid = {
        let mut c = [0.0; 3];
        for p in points {
            for a in 0..3 {
                c[a] += p[a] / n as f64;
            }
        }
        c
    };
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut volume = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let nrm = cross3(sub3(points[j], points[i]), sub3(points[k], points[i]));
                let len = dot3(nrm, nrm).sqrt();
                if len <= tol * scale {
                    continue;
                }
                let unit = [nrm[0] / len, nrm[1] / len, nrm[2] / len];
                let mut above = false;
                let mut below = false;
                let mut on = Vec::new();
                for (idx, p) in points.iter().enumerate() {
                    let s = dot3(unit, sub3(*p, points[i]));
                    if s > tol {
                        above = true;
                    } else if s < -tol {
                        below = true;
                    } else {
                        on.push(idx);
                    }
                }
                if above && below {
                    continue;
                }
                if !seen.insert(on.clone()) {
                    continue;
                }
                // facet polygon area in an in-plane basis
                let e1 = {
                    let v = sub3(points[j], points[i]);
                    let l = dot3(v, v).sqrt();
                    [v[0] / l, v[1] / l, v[2] / l]
                };
                let e2 = cross3(unit, e1);
                let flat: Vec<[f64; 2]> = on
                    .iter()
                    .map(|&idx| {
                        let v = sub3(points[idx], points[i]);
                        [dot3(v, e1), dot3(v, e2)]
                    })
                    .collect();
                let area = polygon_area(&convex_hull_2d(&flat));
                let height = dot3(unit, sub3(centroid, points[i])).abs();
                volume += area * height / 3.0;
            }
        }
    }
    volume
}

/// Closed-hull membership: is `point` a convex combination of `points`,
/// up to [`FEASIBILITY_TOL`]?
pub fn hull_contains(point: &[f64], points: &[Vec<f64>]) -> Result<bool> {
    let d = check_points(points)?;
    if point.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: point.len() });
    }
    let m = points.len();
    let mut a = Vec::with_capacity(d + 1);
    a.push(vec![1.0; m]);
    for r in 0..d {
        a.push(points.iter().map(|p| p[r]).collect());
    }
    let mut b = vec![1.0];
    b.extend_from_slice(point);
    Ok(matches!(maximize(&vec![0.0; m], &a, &b, FEASIBILITY_TOL), LpOutcome::Optimal { .. }))
}

/// Interior margin of `point` with respect to the relatively open hull of
/// `points`: the largest t such that `point = Σ λ_i p_i` with `Σ λ_i = 1`
/// and every `λ_i ≥ t`. Positive iff the point lies in the relative
/// interior; `None` if the point is off the affine hull.
pub fn open_hull_margin(point: &[f64], points: &[Vec<f64>]) -> Result<Option<f64>> {
    let d = check_points(points)?;
    if point.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: point.len() });
    }
    let m = points.len();
    // λ_i = μ_i + t, t = t⁺ - t⁻; columns: μ_0..μ_{m-1}, t⁺, t⁻
    let mut a = Vec::with_capacity(d + 1);
    let mut row = vec![1.0; m + 2];
    row[m] = m as f64;
    row[m + 1] = -(m as f64);
    a.push(row);
    for r in 0..d {
        let mut row: Vec<f64> = points.iter().map(|p| p[r]).collect();
        let s: f64 = points.iter().map(|p| p[r]).sum();
        row.push(s);
        row.push(-s);
        a.push(row);
    }
    let mut b = vec![1.0];
    b.extend_from_slice(point);
    let mut c = vec![0.0; m + 2];
    c[m] = 1.0;
    c[m + 1] = -1.0;
    match maximize(&c, &a, &b, FEASIBILITY_TOL) {
        LpOutcome::Optimal { value, .. } => Ok(Some(value)),
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded => unreachable!("margin is bounded by 1/m"),
    }
}

/// Minimum and maximum of the affine interpolant of `values` over the set of
/// convex combinations of `points` equal to `point`. `None` when empty.
pub fn fiber_range(point: &[f64], points: &[Vec<f64>], values: &[f64]) -> Result<Option<(f64, f64)>> {
    let d = check_points(points)?;
    if point.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: point.len() });
    }
    if values.len() != points.len() {
        return Err(Error::DimensionMismatch { expected: points.len(), found: values.len() });
    }
    let mut a = Vec::with_capacity(d + 1);
    a.push(vec![1.0; points.len()]);
    for r in 0..d {
        a.push(points.iter().map(|p| p[r]).collect());
    }
    let mut b = vec![1.0];
    b.extend_from_slice(point);
    let hi = match maximize(values, &a, &b, FEASIBILITY_TOL) {
        LpOutcome::Optimal { x, .. } => dot(&x, values),
        _ => return Ok(None),
    };
    let neg: Vec<f64> = values.iter().map(|v| -v).collect();
    let lo = match maximize(&neg, &a, &b, FEASIBILITY_TOL) {
        LpOutcome::Optimal { x, .. } => dot(&x, values),
        _ => return Ok(None),
    };
    Ok(Some((lo.min(hi), hi.max(lo))))
}
