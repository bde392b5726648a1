use super::REFRESH_INTERVAL;
use super::{axpby, min_entry, IterationRecord, Outcome, SolveOutcome, SolverConfig, Tracer};
use crate::error::Result;
use crate::kernel::{dot, GramMatrix};
use crate::objective::loss_from_parts;
use crate::simplex::worst_case_distribution;

/// Normalized kernel perceptron: a subgradient method on `L(alpha)`.
///
/// `alpha_{k+1} = (1 - theta) alpha_k + theta p(alpha_k)` with
/// `theta = 1 / (k + 1)`, starting from `alpha_0 = 0`. Every iterate after the
/// first is a probability vector.
pub fn nkp(g: &GramMatrix, config: &SolverConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let n = g.size();
    let mut alpha = vec![0.0; n];
    let mut g_alpha = vec![0.0; n];
    let mut tracer = Tracer::new(config.trace_every, 0);

    for k in 0.. {
        if k > 0 && k % REFRESH_INTERVAL == 0 {
            g_alpha = g.mul_vec(&alpha);
        }
        let min_decision = min_entry(&g_alpha);
        if min_decision > 0.0 {
            return Ok(SolveOutcome {
                outcome: Outcome::Primal { alpha },
                iterations: k,
                trace: tracer.into_records(),
            });
        }
        let p = worst_case_distribution(&g_alpha);
        let g_p = g.mul_vec(p.as_slice());
        if k == config.max_iterations || tracer.wants(k) {
            let loss = loss_from_parts(&g_alpha, &alpha);
            let record = IterationRecord {
                k,
                mu: 0.0,
                loss,
                smoothed_loss: loss,
                p_gnorm: dot(p.as_slice(), &g_p).max(0.0).sqrt(),
                min_decision,
            };
            if k == config.max_iterations {
                return Ok(SolveOutcome {
                    outcome: Outcome::Limit {
                        last: record,
                        alpha,
                    },
                    iterations: k,
                    trace: tracer.into_records(),
                });
            }
            tracer.push(record);
        }
        let theta = 1.0 / (k + 1) as f64;
        axpby(&mut alpha, 1.0 - theta, theta, p.as_slice());
        axpby(&mut g_alpha, 1.0 - theta, theta, &g_p);
    }
    unreachable!()
}
