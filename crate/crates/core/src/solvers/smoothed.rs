//! Smoothed normalized kernel perceptron (entropy prox) and its primal-dual
//! variant with a Euclidean prox centred at `q`.
//!
//! Both share one loop. With `theta_k = 2 / (k + 3)`:
//!
//! ```text
//! alpha_{k+1} = (1 - theta)(alpha_k + theta p_k) + theta^2 p_{mu_k}(alpha_k)
//! mu_{k+1}    = (1 - theta) mu_k
//! p_{k+1}     = (1 - theta) p_k + theta p_{mu_{k+1}}(alpha_{k+1})
//! ```
//!
//! `p_{mu_{k+1}}(alpha_{k+1})` is reused as the next iteration's smoothed
//! minimizer, so each iteration performs exactly one fresh product with `G`.
//! The loop maintains `L_{mu_k}(alpha_k) <= -||p_k||_G^2 / 2`.

use super::REFRESH_INTERVAL;
use super::{axpby, min_entry, IterationRecord, Outcome, SolveOutcome, SolverConfig, Tracer};
use crate::error::{Error, Result};
use crate::kernel::{dot, GramMatrix};
use crate::objective::{loss_from_parts, smoothed_loss_at};
use crate::simplex::{Prox, SimplexVector};

/// SNKP: entropy prox, `alpha_0 = 1/n`, `mu_0 = 2`. Halts on `G alpha > 0`.
pub fn snkp(g: &GramMatrix, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let prox = Prox::entropy(g.size());
    let start = SimplexVector::uniform(g.size());
    Ok(run(
        g,
        &prox,
        start.as_slice(),
        None,
        config.max_iterations,
        config.trace_every,
        0,
    ))
}

/// SNKPVN(q, delta): Euclidean prox centred at `q`, `alpha_0 = q`,
/// `mu_0 = 2n`. Halts on `G alpha > 0`, or returns `p_k` once
/// `||p_k||_G < delta`.
pub fn snkpvn(
    g: &GramMatrix,
    q: &SimplexVector,
    delta: f64,
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    config.validate()?;
    check_snkpvn_input(g, q, delta)?;
    let prox = Prox::euclidean(q.clone());
    Ok(run(
        g,
        &prox,
        q.as_slice(),
        Some(delta),
        config.max_iterations,
        config.trace_every,
        0,
    ))
}

pub(crate) fn check_snkpvn_input(g: &GramMatrix, q: &SimplexVector, delta: f64) -> Result<()> {
    if q.len() != g.size() {
        return Err(Error::DimensionMismatch {
            expected: g.size(),
            found: q.len(),
        });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    Ok(())
}

/// The shared loop. `trace_offset` shifts recorded `k` for callers that chain
/// several runs into one trace.
pub(crate) fn run(
    g: &GramMatrix,
    prox: &Prox,
    alpha0: &[f64],
    dual_delta: Option<f64>,
    max_iterations: usize,
    trace_every: usize,
    trace_offset: usize,
) -> SolveOutcome {
    let mut tracer = Tracer::new(trace_every, trace_offset);
    let mut alpha = alpha0.to_vec();
    let mut g_alpha = g.mul_vec(&alpha);
    let mut mu = prox.initial_mu();
    // p_{mu_k}(alpha_k) and its image under G.
    let mut p_mu = prox.argmin_unchecked(&g_alpha, mu).into_vec();
    let mut g_p_mu = g.mul_vec(&p_mu);
    let mut p = p_mu.clone();
    let mut g_p = g_p_mu.clone();

    for k in 0.. {
        if k > 0 && k % REFRESH_INTERVAL == 0 {
            g_alpha = g.mul_vec(&alpha);
            g_p = g.mul_vec(&p);
        }
        let min_decision = min_entry(&g_alpha);
        if min_decision > 0.0 {
            return SolveOutcome {
                outcome: Outcome::Primal { alpha },
                iterations: k,
                trace: tracer.into_records(),
            };
        }
        let p_gnorm = dot(&p, &g_p).max(0.0).sqrt();
        if let Some(delta) = dual_delta {
            if p_gnorm < delta {
                let p = SimplexVector::renormalize(p);
                let g_norm = g.mul_vec(p.as_slice());
                let g_norm = dot(p.as_slice(), &g_norm).max(0.0).sqrt();
                return SolveOutcome {
                    outcome: Outcome::Dual { p, g_norm },
                    iterations: k,
                    trace: tracer.into_records(),
                };
            }
        }
        if k == max_iterations || tracer.wants(k) {
            let record = IterationRecord {
                k,
                mu,
                loss: loss_from_parts(&g_alpha, &alpha),
                smoothed_loss: smoothed_loss_at(&g_alpha, &alpha, prox, mu, &p_mu),
                p_gnorm,
                min_decision,
            };
            if k == max_iterations {
                let mut last = record;
                last.k += trace_offset;
                return SolveOutcome {
                    outcome: Outcome::Limit { last, alpha },
                    iterations: k,
                    trace: tracer.into_records(),
                };
            }
            tracer.push(record);
        }

        let theta = 2.0 / (k + 3) as f64;
        let keep = 1.0 - theta;
        // alpha <- (1 - theta) alpha + (1 - theta) theta p + theta^2 p_mu
        for i in 0..alpha.len() {
            alpha[i] = keep * alpha[i] + keep * theta * p[i] + theta * theta * p_mu[i];
            g_alpha[i] = keep * g_alpha[i] + keep * theta * g_p[i] + theta * theta * g_p_mu[i];
        }
        mu *= keep;
        p_mu = prox.argmin_unchecked(&g_alpha, mu).into_vec();
        g_p_mu = g.mul_vec(&p_mu);
        axpby(&mut p, keep, theta, &p_mu);
        axpby(&mut g_p, keep, theta, &g_p_mu);
    }
    unreachable!()
}
