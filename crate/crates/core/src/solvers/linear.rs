//! The classical perceptron and the normalized perceptron on raw features.
//!
//! Both report their separator as a coefficient vector in the same space as
//! the kernel solvers: `w = sum_i alpha_i y_i x_i / ||x_i||`, so a primal
//! outcome can be checked against the linear-kernel Gram matrix.

use super::{min_entry, IterationRecord, Outcome, SolveOutcome, SolverConfig, Tracer};
use crate::error::{Error, Result};
use crate::kernel::{dot, Dataset};
use crate::simplex::worst_case_distribution;

/// Rosenblatt's perceptron: `w <- w + y_i x_i` on the smallest index `i`
/// with `y_i w.x_i <= 0`. `alpha_i` is the update count of point `i` times
/// `||x_i||`.
pub fn perceptron(data: &Dataset, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let (n, d) = (data.len(), data.dim());
    let norms: Vec<f64> = data.points().map(|x| dot(x, x).sqrt()).collect();
    let mut w = vec![0.0; d];
    let mut counts = vec![0usize; n];
    let mut tracer = Tracer::new(config.trace_every, 0);

    for k in 0.. {
        let margins = signed_margins(data, &w, None);
        let Some(i) = margins.iter().position(|&m| m <= 0.0) else {
            let alpha = scaled_counts(&counts, &norms);
            return Ok(finish(Outcome::Primal { alpha }, k, tracer));
        };
        if k == config.max_iterations || tracer.wants(k) {
            let record = linear_record(k, data, &w, &margins, None);
            if k == config.max_iterations {
                let alpha = scaled_counts(&counts, &norms);
                return Ok(finish(
                    Outcome::Limit {
                        last: record,
                        alpha,
                    },
                    k,
                    tracer,
                ));
            }
            tracer.push(record);
        }
        let y = data.label(i);
        for (wj, xj) in w.iter_mut().zip(data.point(i)) {
            *wj += y * xj;
        }
        counts[i] += 1;
    }
    unreachable!()
}

/// The normalized perceptron on unit-norm points:
/// `w <- (1 - theta) w + theta XY p(w)` with `theta = 1 / (k + 1)`.
pub fn normalized_perceptron(data: &Dataset, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let (n, d) = (data.len(), data.dim());
    let mut norms = Vec::with_capacity(n);
    for (index, x) in data.points().enumerate() {
        let r = dot(x, x).sqrt();
        if !(r > 0.0) {
            return Err(Error::DegeneratePoint { index, value: r });
        }
        norms.push(r);
    }
    let mut w = vec![0.0; d];
    let mut alpha = vec![0.0; n];
    let mut tracer = Tracer::new(config.trace_every, 0);

    for k in 0.. {
        let margins = signed_margins(data, &w, Some(&norms));
        if min_entry(&margins) > 0.0 {
            return Ok(finish(Outcome::Primal { alpha }, k, tracer));
        }
        let p = worst_case_distribution(&margins);
        if k == config.max_iterations || tracer.wants(k) {
            let record = linear_record(k, data, &w, &margins, Some(&norms));
            if k == config.max_iterations {
                return Ok(finish(
                    Outcome::Limit {
                        last: record,
                        alpha,
                    },
                    k,
                    tracer,
                ));
            }
            tracer.push(record);
        }
        let theta = 1.0 / (k + 1) as f64;
        let mut step = vec![0.0; d];
        for (i, &pi) in p.as_slice().iter().enumerate() {
            if pi > 0.0 {
                let c = pi * data.label(i) / norms[i];
                for (s, x) in step.iter_mut().zip(data.point(i)) {
                    *s += c * x;
                }
            }
        }
        super::axpby(&mut w, 1.0 - theta, theta, &step);
        super::axpby(&mut alpha, 1.0 - theta, theta, p.as_slice());
    }
    unreachable!()
}

/// The weight vector `sum_i alpha_i y_i x_i / ||x_i||` of a linear separator.
pub fn linear_weights(data: &Dataset, alpha: &[f64]) -> Result<Vec<f64>> {
    if alpha.len() != data.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            found: alpha.len(),
        });
    }
    let mut w = vec![0.0; data.dim()];
    for (i, (&a, x)) in alpha.iter().zip(data.points()).enumerate() {
        let r = dot(x, x).sqrt();
        if a == 0.0 {
            continue;
        }
        if !(r > 0.0) {
            return Err(Error::DegeneratePoint { index: i, value: r });
        }
        for (wj, xj) in w.iter_mut().zip(x) {
            *wj += a * data.label(i) * xj / r;
        }
    }
    Ok(w)
}

fn scaled_counts(counts: &[usize], norms: &[f64]) -> Vec<f64> {
    counts
        .iter()
        .zip(norms)
        .map(|(&c, &r)| c as f64 * r)
        .collect()
}

fn finish(outcome: Outcome, iterations: usize, tracer: Tracer) -> SolveOutcome {
    SolveOutcome {
        outcome,
        iterations,
        trace: tracer.into_records(),
    }
}

/// `y_i w.x_i`, divided by `||x_i||` when `norms` is given.
fn signed_margins(data: &Dataset, w: &[f64], norms: Option<&[f64]>) -> Vec<f64> {
    (0..data.len())
        .map(|i| {
            let m = data.label(i) * dot(w, data.point(i));
            norms.map_or(m, |r| m / r[i])
        })
        .collect()
}

fn linear_record(
    k: usize,
    data: &Dataset,
    w: &[f64],
    margins: &[f64],
    norms: Option<&[f64]>,
) -> IterationRecord {
    let min_decision = min_entry(margins);
    let loss = -min_decision + 0.5 * dot(w, w);
    let p = worst_case_distribution(margins);
    let mut v = vec![0.0; data.dim()];
    for (i, &pi) in p.as_slice().iter().enumerate() {
        let c = pi * data.label(i) / norms.map_or(1.0, |r| r[i]);
        for (s, x) in v.iter_mut().zip(data.point(i)) {
            *s += c * x;
        }
    }
    IterationRecord {
        k,
        mu: 0.0,
        loss,
        smoothed_loss: loss,
        p_gnorm: dot(&v, &v).sqrt(),
        min_decision,
    }
}
