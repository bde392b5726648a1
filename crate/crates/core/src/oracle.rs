//! Slow reference computations used to validate the solvers.
//!
//! None of these share code paths with [`crate::solvers`]: the minimum G-norm
//! point is found by active-set enumeration or away-step conditional
//! gradient, projections by enumerating supports, and 2-D feasibility by an
//! angular sweep.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernel::{dot, Dataset, GramMatrix};
use crate::simplex::SimplexVector;

/// Largest `n` solved by exhaustive active-set enumeration.
pub const EXACT_MAX_N: usize = 3;
/// Largest dimension accepted by [`brute_projection`].
pub const BRUTE_PROJECTION_MAX_N: usize = 12;
/// Angular slack for [`exact_feasibility_2d`]; gaps within this of `pi`
/// count as infeasible.
pub const ANGLE_TOL: f64 = 1e-12;
/// Iteration cap of the conditional-gradient path.
pub const CONDITIONAL_GRADIENT_ITERATIONS: usize = 1_000_000;
/// Frank-Wolfe gaps below this are rounding noise in `p^T G p`.
pub const GAP_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    /// `margin_estimate > tolerance`.
    pub feasible: bool,
    /// `min_{p in simplex} ||p||_G`; equals the margin for separable data.
    pub margin_estimate: f64,
    pub minimizer: SimplexVector,
    pub iterations: usize,
}

/// `min_{p in simplex} ||p||_G` to within `tolerance`.
pub fn reference_min_gnorm(g: &GramMatrix, tolerance: f64) -> Result<OracleReport> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    let (minimizer, iterations) = if g.size() <= EXACT_MAX_N {
        enumerate_active_sets(g)
    } else {
        away_step_conditional_gradient(g, tolerance)
    };
    let margin_estimate = g.norm(minimizer.as_slice())?;
    Ok(OracleReport {
        feasible: margin_estimate > tolerance,
        margin_estimate,
        minimizer,
        iterations,
    })
}

/// Solves the equality-constrained KKT system on every support and keeps the
/// best nonnegative solution. Singular faces are skipped: there the minimum
/// is also attained on a smaller face.
fn enumerate_active_sets(g: &GramMatrix) -> (SimplexVector, usize) {
    let n = g.size();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut visited = 0;
    for mask in 1usize..(1 << n) {
        visited += 1;
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let m = support.len();
        // [G_SS 1; 1^T 0] [p; nu] = [0; 1]
        let mut a = vec![vec![0.0; m + 2]; m + 1];
        for (r, &i) in support.iter().enumerate() {
            for (c, &j) in support.iter().enumerate() {
                a[r][c] = g.get(i, j);
            }
            a[r][m] = 1.0;
            a[m][r] = 1.0;
        }
        a[m][m + 1] = 1.0;
        let Some(x) = solve_dense(a) else { continue };
        if x[..m].iter().any(|&v| v < -1e-14) {
            continue;
        }
        let mut p = vec![0.0; n];
        for (r, &i) in support.iter().enumerate() {
            p[i] = x[r].max(0.0);
        }
        let p = SimplexVector::renormalize(p).into_vec();
        let value = dot(&p, &g.mul_vec(&p));
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, p));
        }
    }
    let (_, p) = best.expect("every vertex is a feasible support");
    (SimplexVector::renormalize(p), visited)
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_dense(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let m = a.len();
    for col in 0..m {
        let pivot = (col..m).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[pivot][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, pivot);
        let (upper, lower) = a.split_at_mut(col + 1);
        let pivot_row = &upper[col];
        for row in lower.iter_mut() {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
    }
    let mut x = vec![0.0; m];
    for r in (0..m).rev() {
        let s: f64 = ((r + 1)..m).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][m] - s) / a[r][r];
    }
    Some(x)
}

/// Away-step Frank-Wolfe with exact line search on `f(p) = ||p||_G^2 / 2`.
///
/// Stops when `||p||_G <= tolerance` or when the Frank-Wolfe gap certifies
/// `||p||_G - min ||.||_G <= 2 gap / ||p||_G <= tolerance`, or when the gap
/// drops to [`GAP_FLOOR`] on instances whose minimum is zero.
fn away_step_conditional_gradient(g: &GramMatrix, tolerance: f64) -> (SimplexVector, usize) {
    let n = g.size();
    // Start from the vertex with the smallest row sum, a cheap warm start.
    let start = (0..n)
        .min_by(|&a, &b| {
            g.row(a)
                .iter()
                .sum::<f64>()
                .total_cmp(&g.row(b).iter().sum::<f64>())
        })
        .unwrap_or(0);
    let mut p = vec![0.0; n];
    p[start] = 1.0;
    let mut g_p = g.row(start).to_vec();
    let mut iterations = 0;

    while iterations < CONDITIONAL_GRADIENT_ITERATIONS {
        if iterations > 0 && iterations % 1000 == 0 {
            g_p = g.mul_vec(&p);
        }
        let norm_sq = dot(&p, &g_p).max(0.0);
        let norm = norm_sq.sqrt();
        let s = argmin(&g_p, |_| true);
        let a = argmax(&g_p, |i| p[i] > 0.0);
        let fw_gap = norm_sq - g_p[s];
        if norm <= tolerance || 2.0 * fw_gap <= tolerance * norm || fw_gap <= GAP_FLOOR {
            break;
        }
        let away_gap = g_p[a] - norm_sq;
        iterations += 1;
        if fw_gap >= away_gap {
            // direction e_s - p
            let curvature = g.get(s, s) - 2.0 * g_p[s] + norm_sq;
            let step = if curvature > 0.0 {
                (fw_gap / curvature).clamp(0.0, 1.0)
            } else {
                1.0
            };
            for (pi, gpi) in p.iter_mut().zip(g_p.iter_mut()) {
                *pi *= 1.0 - step;
                *gpi *= 1.0 - step;
            }
            p[s] += step;
            for (gpi, gsi) in g_p.iter_mut().zip(g.row(s)) {
                *gpi += step * gsi;
            }
        } else {
            // direction p - e_a
            let max_step = p[a] / (1.0 - p[a]);
            let curvature = norm_sq - 2.0 * g_p[a] + g.get(a, a);
            let step = if curvature > 0.0 {
                (away_gap / curvature).clamp(0.0, max_step)
            } else {
                max_step
            };
            for (pi, gpi) in p.iter_mut().zip(g_p.iter_mut()) {
                *pi *= 1.0 + step;
                *gpi *= 1.0 + step;
            }
            p[a] -= step;
            if step == max_step {
                p[a] = 0.0;
            }
            for (gpi, gai) in g_p.iter_mut().zip(g.row(a)) {
                *gpi -= step * gai;
            }
        }
    }
    (SimplexVector::renormalize(p), iterations)
}

fn argmin(v: &[f64], allowed: impl Fn(usize) -> bool) -> usize {
    let mut best = usize::MAX;
    for (i, &x) in v.iter().enumerate() {
        if allowed(i) && (best == usize::MAX || x < v[best]) {
            best = i;
        }
    }
    best
}

fn argmax(v: &[f64], allowed: impl Fn(usize) -> bool) -> usize {
    let mut best = usize::MAX;
    for (i, &x) in v.iter().enumerate() {
        if allowed(i) && (best == usize::MAX || x > v[best]) {
            best = i;
        }
    }
    best
}

/// Exact Euclidean projection onto the simplex by checking the KKT
/// conditions of every support. Only for `n <= 12`.
pub fn brute_projection(v: &[f64]) -> Result<SimplexVector> {
    let n = v.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if n > BRUTE_PROJECTION_MAX_N {
        return Err(Error::Unsupported(format!(
            "brute-force projection supports n <= {BRUTE_PROJECTION_MAX_N}, got {n}"
        )));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1usize..(1 << n) {
        let size = mask.count_ones() as f64;
        let in_support = |i: usize| mask & (1 << i) != 0;
        let tau = ((0..n).filter(|&i| in_support(i)).map(|i| v[i]).sum::<f64>() - 1.0) / size;
        // KKT: v_i - tau >= 0 on the support, v_i - tau <= 0 off it.
        let kkt = (0..n).all(|i| {
            if in_support(i) {
                v[i] - tau >= -1e-12
            } else {
                v[i] - tau <= 1e-12
            }
        });
        if !kkt {
            continue;
        }
        let p: Vec<f64> = (0..n)
            .map(|i| {
                if in_support(i) {
                    (v[i] - tau).max(0.0)
                } else {
                    0.0
                }
            })
            .collect();
        let dist: f64 = p.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(d, _)| dist < *d) {
            best = Some((dist, p));
        }
    }
    let (_, p) = best.expect("the projection satisfies KKT on its own support");
    Ok(SimplexVector::renormalize(p))
}

/// Whether a strict linear separator exists for 2-D data under the linear
/// kernel: true iff the signed unit vectors `y_i x_i / ||x_i||` all lie in an
/// open half-plane, i.e. the largest angular gap between them exceeds `pi`.
pub fn exact_feasibility_2d(data: &Dataset) -> Result<bool> {
    if data.dim() != 2 {
        return Err(Error::Unsupported(format!(
            "exact feasibility is only implemented for d = 2, got d = {}",
            data.dim()
        )));
    }
    let mut angles = Vec::with_capacity(data.len());
    for (i, x) in data.points().enumerate() {
        let r = dot(x, x);
        if !(r > 0.0) {
            return Err(Error::DegeneratePoint { index: i, value: r });
        }
        let y = data.label(i);
        angles.push((y * x[1]).atan2(y * x[0]));
    }
    angles.sort_by(f64::total_cmp);
    let mut largest_gap = angles[0] + 2.0 * PI - angles[angles.len() - 1];
    for w in angles.windows(2) {
        largest_gap = largest_gap.max(w[1] - w[0]);
    }
    Ok(largest_gap > PI + ANGLE_TOL)
}
