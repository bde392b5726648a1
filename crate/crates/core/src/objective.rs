//! Loss functions, margin bounds and certificate checks.

use std::fmt;

use crate::error::{Error, Result};
use crate::kernel::{dot, GramMatrix};
use crate::simplex::{Prox, SimplexVector};

/// `L(alpha) = max_i(-(G alpha)_i) + ||alpha||_G^2 / 2`.
///
/// At its minimizer this equals `-rho^2 / 2` when the data are separable.
pub fn loss(g: &GramMatrix, alpha: &[f64]) -> Result<f64> {
    let g_alpha = g.decision_values(alpha)?;
    Ok(loss_from_parts(&g_alpha, alpha))
}

pub(crate) fn loss_from_parts(g_alpha: &[f64], alpha: &[f64]) -> f64 {
    let worst = g_alpha.iter().map(|v| -v).fold(f64::NEG_INFINITY, f64::max);
    worst + 0.5 * dot(alpha, g_alpha).max(0.0)
}

/// `L_mu(alpha) = -<G alpha, p_mu> - mu d(p_mu) + ||alpha||_G^2 / 2`, evaluated
/// at the exact maximizer `p_mu = prox.smoothed_argmin(G alpha, mu)`.
pub fn smoothed_loss(g: &GramMatrix, prox: &Prox, alpha: &[f64], mu: f64) -> Result<f64> {
    if prox.dim() != g.size() {
        return Err(Error::DimensionMismatch {
            expected: g.size(),
            found: prox.dim(),
        });
    }
    let g_alpha = g.decision_values(alpha)?;
    let p_mu = prox.smoothed_argmin(&g_alpha, mu)?;
    Ok(smoothed_loss_at(&g_alpha, alpha, prox, mu, p_mu.as_slice()))
}

pub(crate) fn smoothed_loss_at(
    g_alpha: &[f64],
    alpha: &[f64],
    prox: &Prox,
    mu: f64,
    p_mu: &[f64],
) -> f64 {
    -dot(g_alpha, p_mu) - mu * prox.value(p_mu) + 0.5 * dot(alpha, g_alpha).max(0.0)
}

/// `||p||_G`, an upper bound on the margin for every `p` in the simplex.
pub fn margin_lower_bound(g: &GramMatrix, p: &SimplexVector) -> Result<f64> {
    g.norm(p.as_slice())
}

/// A verified certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// `min_i (G alpha)_i > 0`: `alpha` defines a perfect separator.
    PrimalFeasible { min_decision: f64, alpha: Vec<f64> },
    /// `p` is in the simplex and `||p||_G <= epsilon`.
    DualEpsilon { g_norm: f64, p: SimplexVector },
}

/// Why a vector failed both certificate predicates.
#[derive(Debug, Clone, PartialEq)]
pub enum CertificateMiss {
    WrongLength {
        expected: usize,
        found: usize,
    },
    /// `min_decision <= 0`, and the vector is not a probability vector.
    NotInSimplex {
        min_decision: f64,
        reason: String,
    },
    /// `min_decision <= 0`, and `g_norm` exceeds `epsilon`.
    NormTooLarge {
        min_decision: f64,
        g_norm: f64,
        epsilon: f64,
    },
}

impl fmt::Display for CertificateMiss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateMiss::WrongLength { expected, found } => {
                write!(f, "vector has length {found}, expected {expected}")
            }
            CertificateMiss::NotInSimplex {
                min_decision,
                reason,
            } => write!(
                f,
                "primal check failed (min decision value {min_decision:e} <= 0) and the vector \
                 is not a probability vector ({reason})"
            ),
            CertificateMiss::NormTooLarge {
                min_decision,
                g_norm,
                epsilon,
            } => write!(
                f,
                "primal check failed (min decision value {min_decision:e} <= 0) and the G-norm \
                 {g_norm:e} exceeds epsilon {epsilon:e} by {:e}",
                g_norm - epsilon
            ),
        }
    }
}

impl std::error::Error for CertificateMiss {}

/// Checks the primal predicate `G v > 0` first, then the dual predicate
/// `v in simplex, ||v||_G <= epsilon`.
pub fn check_certificate(
    g: &GramMatrix,
    vector: &[f64],
    epsilon: f64,
) -> std::result::Result<Certificate, CertificateMiss> {
    if vector.len() != g.size() {
        return Err(CertificateMiss::WrongLength {
            expected: g.size(),
            found: vector.len(),
        });
    }
    let g_v = g.mul_vec(vector);
    let min_decision = g_v.iter().copied().fold(f64::INFINITY, f64::min);
    if min_decision > 0.0 {
        return Ok(Certificate::PrimalFeasible {
            min_decision,
            alpha: vector.to_vec(),
        });
    }
    let p = SimplexVector::new(vector.to_vec()).map_err(|e| CertificateMiss::NotInSimplex {
        min_decision,
        reason: match e {
            Error::NotInSimplex(r) => r,
            other => other.to_string(),
        },
    })?;
    let g_norm = dot(vector, &g_v).max(0.0).sqrt();
    if g_norm <= epsilon {
        Ok(Certificate::DualEpsilon { g_norm, p })
    } else {
        Err(CertificateMiss::NormTooLarge {
            min_decision,
            g_norm,
            epsilon,
        })
    }
}
