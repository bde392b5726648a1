//! Dual and primal-dual solvers: kernelized normalized Von-Neumann and the
//! iterated smoothed primal-dual method.

use super::smoothed::{self, check_snkpvn_input};
use super::REFRESH_INTERVAL;
use super::{min_entry, IterationRecord, Outcome, SolveOutcome, SolverConfig, Tracer};
use crate::error::{Error, Result};
use crate::kernel::{dot, GramMatrix};
use crate::objective::loss_from_parts;
use crate::simplex::{Prox, SimplexVector};

/// Normalized Von-Neumann in coefficient space.
///
/// The iterate `p_k` stands for `w_k = sum_i p_ik y_i phi(x_i) / sqrt(K_ii)`.
/// Each step moves toward the vertex `e_j` of the most violated point with
/// an exact line search on `||.||_G`, so the norm never increases. Returns a
/// primal outcome if `G p_k > 0`, a dual one once `||p_k||_G <= epsilon`.
pub fn nvn(g: &GramMatrix, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let n = g.size();
    let epsilon = config.dual_epsilon;
    let mut p = SimplexVector::uniform(n).into_vec();
    let mut g_p = g.mul_vec(&p);
    let mut tracer = Tracer::new(config.trace_every, 0);

    for k in 0.. {
        if k > 0 && k % REFRESH_INTERVAL == 0 {
            g_p = g.mul_vec(&p);
        }
        let min_decision = min_entry(&g_p);
        if min_decision > 0.0 {
            return Ok(SolveOutcome {
                outcome: Outcome::Primal { alpha: p },
                iterations: k,
                trace: tracer.into_records(),
            });
        }
        let norm_sq = dot(&p, &g_p).max(0.0);
        if norm_sq.sqrt() <= epsilon {
            let p = SimplexVector::renormalize(p);
            let g_norm = g.norm(p.as_slice())?;
            return Ok(SolveOutcome {
                outcome: Outcome::Dual { p, g_norm },
                iterations: k,
                trace: tracer.into_records(),
            });
        }
        if k == config.max_iterations || tracer.wants(k) {
            let loss = loss_from_parts(&g_p, &p);
            let record = IterationRecord {
                k,
                mu: 0.0,
                loss,
                smoothed_loss: loss,
                p_gnorm: norm_sq.sqrt(),
                min_decision,
            };
            if k == config.max_iterations {
                return Ok(SolveOutcome {
                    outcome: Outcome::Limit {
                        last: record,
                        alpha: p,
                    },
                    iterations: k,
                    trace: tracer.into_records(),
                });
            }
            tracer.push(record);
        }

        let j = g_p
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v < g_p[best] { i } else { best });
        // ||(1 - l) p + l e_j||_G^2 is minimized at
        // l = <p, p - e_j>_G / ||p - e_j||_G^2.
        let denom = norm_sq - 2.0 * g_p[j] + 1.0;
        let step = if denom > 0.0 {
            ((norm_sq - g_p[j]) / denom).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let keep = 1.0 - step;
        for (pi, gpi) in p.iter_mut().zip(g_p.iter_mut()) {
            *pi *= keep;
            *gpi *= keep;
        }
        p[j] += step;
        for (gpi, gji) in g_p.iter_mut().zip(g.row(j)) {
            *gpi += step * gji;
        }
    }
    unreachable!()
}

/// ISNKPVN(gamma, epsilon): repeatedly calls SNKPVN from the previous dual
/// iterate with `delta_t = ||q_t||_G / gamma`, starting at the uniform
/// distribution. Returns a primal outcome as soon as any call finds one, and
/// a dual outcome once `delta_t < epsilon` (or `q_t` itself already has
/// `||q_t||_G <= epsilon`). The iteration budget covers all inner calls.
pub fn isnkpvn(g: &GramMatrix, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let epsilon = config.dual_epsilon;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(
            "isnkpvn needs a positive dual epsilon".into(),
        ));
    }
    let n = g.size();
    let mut q = SimplexVector::uniform(n);
    let mut used = 0usize;
    let mut trace = Vec::new();

    loop {
        let g_q = g.mul_vec(q.as_slice());
        if min_entry(&g_q) > 0.0 {
            return Ok(SolveOutcome {
                outcome: Outcome::Primal {
                    alpha: q.into_vec(),
                },
                iterations: used,
                trace,
            });
        }
        let q_norm = dot(q.as_slice(), &g_q).max(0.0).sqrt();
        if q_norm <= epsilon {
            return Ok(SolveOutcome {
                outcome: Outcome::Dual {
                    p: q,
                    g_norm: q_norm,
                },
                iterations: used,
                trace,
            });
        }
        let delta = q_norm / config.gamma;
        check_snkpvn_input(g, &q, delta)?;
        let budget = config.max_iterations - used;
        let prox = Prox::euclidean(q.clone());
        let inner = smoothed::run(
            g,
            &prox,
            q.as_slice(),
            Some(delta),
            budget,
            config.trace_every,
            used,
        );
        used += inner.iterations;
        trace.extend(inner.trace);
        match inner.outcome {
            Outcome::Dual { p, g_norm } => {
                if delta < epsilon {
                    return Ok(SolveOutcome {
                        outcome: Outcome::Dual { p, g_norm },
                        iterations: used,
                        trace,
                    });
                }
                q = p;
            }
            outcome => {
                return Ok(SolveOutcome {
                    outcome,
                    iterations: used,
                    trace,
                })
            }
        }
    }
}
