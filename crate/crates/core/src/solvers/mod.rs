//! Perceptron and Von-Neumann style solvers as deterministic iterative loops.
//!
//! Every solver checks its exit conditions at the top of iteration `k`, before
//! performing update `k`, so `iterations` counts updates. Traces record the
//! state at every `trace_every`-th iteration at which an update is performed.

mod linear;
mod nkp;
mod primal_dual;
mod smoothed;

use std::fmt;
use std::str::FromStr;

pub use linear::{linear_weights, normalized_perceptron, perceptron};
pub use nkp::nkp;
pub use primal_dual::{isnkpvn, nvn};
pub use smoothed::{snkp, snkpvn};

use crate::error::{Error, Result};
use crate::simplex::SimplexVector;

/// Incrementally maintained products are recomputed from scratch this often.
pub(crate) const REFRESH_INTERVAL: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Dual accuracy `epsilon` for `nvn` and `isnkpvn`.
    pub dual_epsilon: f64,
    /// Outer shrink factor of `isnkpvn`; must exceed one.
    pub gamma: f64,
    /// Record every `trace_every`-th iteration; zero disables tracing.
    pub trace_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 1_000_000,
            dual_epsilon: 1e-6,
            gamma: 2.0,
            trace_every: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !(self.gamma > 1.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "gamma must exceed 1, got {}",
                self.gamma
            )));
        }
        if !(self.dual_epsilon >= 0.0 && self.dual_epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dual epsilon must be nonnegative, got {}",
                self.dual_epsilon
            )));
        }
        Ok(())
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.dual_epsilon = epsilon;
        self
    }

    pub fn with_trace_every(mut self, every: usize) -> Self {
        self.trace_every = every;
        self
    }

    /// A budget of ten times the theoretical bound for `algorithm` when the
    /// margin is known, the default budget otherwise.
    pub fn budget_for(algorithm: Algorithm, n: usize, margin: Option<f64>, epsilon: f64) -> Self {
        let cfg = Self::default().with_epsilon(epsilon);
        match margin.and_then(|rho| theoretical_bound(algorithm, n, rho, epsilon)) {
            Some(bound) => cfg.with_max_iterations(bound.saturating_mul(10).max(1)),
            None => cfg,
        }
    }
}

/// Worst-case iteration count for `algorithm` on a feasible instance with
/// margin `rho` (or an infeasible one, for the dual-only `nvn`).
pub fn theoretical_bound(algorithm: Algorithm, n: usize, rho: f64, epsilon: f64) -> Option<usize> {
    let n = n as f64;
    let bound = match algorithm {
        Algorithm::NormalizedPerceptron | Algorithm::Nkp if rho > 0.0 => 1.0 / (rho * rho),
        Algorithm::Snkp if rho > 0.0 => 2.0 * (2.0 * n.ln()).sqrt() / rho,
        Algorithm::Snkpvn if rho > 0.0 => 2.0 * (2.0 * n).sqrt() / rho,
        Algorithm::Isnkpvn if rho > 0.0 => {
            2.0 * (2.0 * n).sqrt() / rho * ((1.0 / rho).ln().max(0.0) / 2f64.ln() + 1.0)
        }
        Algorithm::Nvn if epsilon > 0.0 => 1.0 / (epsilon * epsilon),
        _ => return None,
    };
    bound.is_finite().then(|| bound.ceil() as usize)
}

/// Solver state at the top of iteration `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    /// Smoothing parameter; zero for the unsmoothed solvers.
    pub mu: f64,
    /// `L(alpha_k)`.
    pub loss: f64,
    /// `L_mu(alpha_k)`; equal to `loss` when `mu` is zero.
    pub smoothed_loss: f64,
    /// `||p_k||_G` of the current dual iterate.
    pub p_gnorm: f64,
    /// `min_i (G alpha_k)_i`.
    pub min_decision: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// `G alpha > 0`.
    Primal { alpha: Vec<f64> },
    /// `p` in the simplex with small G-norm.
    Dual { p: SimplexVector, g_norm: f64 },
    /// The iteration budget ran out; `alpha` is the final primal iterate.
    Limit {
        last: IterationRecord,
        alpha: Vec<f64>,
    },
}

impl Outcome {
    pub fn kind(&self) -> &'static str {
        match self {
            Outcome::Primal { .. } => "primal",
            Outcome::Dual { .. } => "dual",
            Outcome::Limit { .. } => "limit",
        }
    }

    pub fn is_primal(&self) -> bool {
        matches!(self, Outcome::Primal { .. })
    }

    pub fn is_dual(&self) -> bool {
        matches!(self, Outcome::Dual { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub outcome: Outcome,
    /// Number of updates performed.
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Perceptron,
    NormalizedPerceptron,
    Nkp,
    Snkp,
    Nvn,
    Snkpvn,
    Isnkpvn,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Perceptron,
        Algorithm::NormalizedPerceptron,
        Algorithm::Nkp,
        Algorithm::Snkp,
        Algorithm::Nvn,
        Algorithm::Snkpvn,
        Algorithm::Isnkpvn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Perceptron => "perceptron",
            Algorithm::NormalizedPerceptron => "normalized-perceptron",
            Algorithm::Nkp => "nkp",
            Algorithm::Snkp => "snkp",
            Algorithm::Nvn => "nvn",
            Algorithm::Snkpvn => "snkpvn",
            Algorithm::Isnkpvn => "isnkpvn",
        }
    }

    /// The linear baselines run on raw features rather than on `G`.
    pub fn is_linear_only(self) -> bool {
        matches!(
            self,
            Algorithm::Perceptron | Algorithm::NormalizedPerceptron
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm '{s}'")))
    }
}

/// Collects records at `k = 0, every, 2 every, ...`, shifted by `offset`.
pub(crate) struct Tracer {
    every: usize,
    offset: usize,
    records: Vec<IterationRecord>,
}

impl Tracer {
    pub(crate) fn new(every: usize, offset: usize) -> Self {
        Self {
            every,
            offset,
            records: Vec::new(),
        }
    }

    pub(crate) fn wants(&self, k: usize) -> bool {
        self.every > 0 && (k + self.offset).is_multiple_of(self.every)
    }

    pub(crate) fn push(&mut self, mut record: IterationRecord) {
        record.k += self.offset;
        self.records.push(record);
    }

    pub(crate) fn into_records(self) -> Vec<IterationRecord> {
        self.records
    }
}

pub(crate) fn min_entry(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

/// `a <- s a + t b`
pub(crate) fn axpby(a: &mut [f64], s: f64, t: f64, b: &[f64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x = s * *x + t * y;
    }
}
