//! Kernelized linear feasibility: find a perfect separator in an RKHS, or a
//! dual certificate that none exists.
//!
//! Everything operates on the normalized signed Gram matrix
//! `G_ij = y_i y_j K(x_i, x_j) / sqrt(K(x_i, x_i) K(x_j, x_j))`. A coefficient
//! vector `alpha` with `G alpha > 0` is a primal certificate (the function
//! `f = sum_i alpha_i y_i phi(x_i) / sqrt(K(x_i, x_i))` classifies every point
//! correctly), while a probability vector `p` with `||p||_G = 0` proves that no
//! such function exists. The solvers in [`solvers`] produce one or the other:
//!
//! - [`solvers::perceptron`] and [`solvers::normalized_perceptron`]: the linear
//!   baselines on raw features.
//! - [`solvers::nkp`]: normalized kernel perceptron, a subgradient method.
//! - [`solvers::snkp`]: the smoothed, accelerated variant with an
//!   `O(sqrt(log n) / rho)` iteration bound.
//! - [`solvers::nvn`]: kernelized normalized Von-Neumann for the dual.
//! - [`solvers::snkpvn`] and [`solvers::isnkpvn`]: primal-dual smoothed methods
//!   that return whichever certificate exists.
//!
//! The [`oracle`] module holds slow reference implementations used to check
//! the fast paths.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod kernel;
pub mod objective;
pub mod oracle;
pub mod simplex;
pub mod solvers;
pub mod synth;

pub use error::{Error, Result};
pub use kernel::{predict, Dataset, GramMatrix, Kernel, KernelMatrix};
pub use objective::{
    check_certificate, loss, margin_lower_bound, smoothed_loss, Certificate, CertificateMiss,
};
pub use oracle::OracleReport;
pub use simplex::{project_simplex, worst_case_distribution, Prox, SimplexVector};
pub use solvers::{Algorithm, IterationRecord, Outcome, SolveOutcome, SolverConfig};
