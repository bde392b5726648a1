//! Probability-simplex vectors and the prox-functions used for smoothing.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Tolerance on `|sum(p) - 1|` for a valid simplex vector.
pub const SUM_TOL: f64 = 1e-12;

/// Tolerance used to detect ties in [`worst_case_distribution`].
pub const TIE_TOL: f64 = 1e-12;

/// A nonnegative vector summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::NotInSimplex("empty vector".into()));
        }
        if let Some(i) = p.iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
            return Err(Error::NotInSimplex(format!("entry {i} is {}", p[i])));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::NotInSimplex(format!("entries sum to {sum}")));
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "simplex dimension must be positive");
        Self(vec![1.0 / n as f64; n])
    }

    pub fn vertex(n: usize, i: usize) -> Self {
        let mut p = vec![0.0; n];
        p[i] = 1.0;
        Self(p)
    }

    /// Clamps negatives to zero and rescales to unit sum. Intended for
    /// iterates that are convex combinations of simplex vectors and have only
    /// drifted by round-off.
    pub fn renormalize(mut p: Vec<f64>) -> Self {
        for v in p.iter_mut() {
            if !(*v > 0.0) {
                *v = 0.0;
            }
        }
        let sum: f64 = p.iter().sum();
        assert!(sum > 0.0, "cannot renormalize a zero vector");
        for v in p.iter_mut() {
            *v /= sum;
        }
        Self(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for SimplexVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Uniform distribution over the (near-)minimizers of `g_alpha`, which
/// attains `min_p <g_alpha, p>` over the simplex.
pub fn worst_case_distribution(g_alpha: &[f64]) -> SimplexVector {
    let min = g_alpha.iter().copied().fold(f64::INFINITY, f64::min);
    let ties: Vec<bool> = g_alpha.iter().map(|&v| v - min <= TIE_TOL).collect();
    let count = ties.iter().filter(|&&t| t).count();
    SimplexVector(
        ties.into_iter()
            .map(|t| if t { 1.0 / count as f64 } else { 0.0 })
            .collect(),
    )
}

/// Euclidean projection onto the simplex by descending sort and threshold:
/// `p_i = max(v_i - tau, 0)` with `tau` chosen so the entries sum to one.
pub fn project_simplex(v: &[f64]) -> SimplexVector {
    assert!(!v.is_empty(), "cannot project an empty vector");
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k + 1) as f64;
        if u - t > 0.0 {
            tau = t;
        } else {
            break;
        }
    }
    let p: Vec<f64> = v.iter().map(|&x| (x - tau).max(0.0)).collect();
    SimplexVector::renormalize(p)
}

/// Strongly convex prox-function on the simplex.
///
/// `Entropy` is `d(p) = sum p_i log p_i + log n`, 1-strongly convex in the
/// l1 norm, centred at the uniform distribution. `Euclidean` is
/// `d_q(p) = ||p - q||^2 / 2`, 1-strongly convex in the l2 norm, centred at
/// `q`. `lambda_sharp` bounds the G-norm by the matching norm:
/// `||p||_G^2 <= lambda_sharp ||p||^2`.
#[derive(Debug, Clone, PartialEq)]
pub enum Prox {
    Entropy { n: usize },
    Euclidean { center: SimplexVector },
}

impl Prox {
    pub fn entropy(n: usize) -> Self {
        assert!(n > 0, "prox dimension must be positive");
        Prox::Entropy { n }
    }

    pub fn euclidean(center: SimplexVector) -> Self {
        Prox::Euclidean { center }
    }

    pub fn dim(&self) -> usize {
        match self {
            Prox::Entropy { n } => *n,
            Prox::Euclidean { center } => center.len(),
        }
    }

    pub fn lambda_sharp(&self) -> f64 {
        match self {
            Prox::Entropy { .. } => 1.0,
            Prox::Euclidean { center } => center.len() as f64,
        }
    }

    /// Initial smoothing parameter `2 lambda_sharp`.
    pub fn initial_mu(&self) -> f64 {
        2.0 * self.lambda_sharp()
    }

    pub fn center(&self) -> SimplexVector {
        match self {
            Prox::Entropy { n } => SimplexVector::uniform(*n),
            Prox::Euclidean { center } => center.clone(),
        }
    }

    /// `d(p)`, using `0 log 0 = 0` for the entropy.
    pub fn value(&self, p: &[f64]) -> f64 {
        match self {
            Prox::Entropy { n } => {
                let neg_entropy: f64 = p.iter().filter(|&&v| v > 0.0).map(|&v| v * v.ln()).sum();
                (neg_entropy + (*n as f64).ln()).max(0.0)
            }
            Prox::Euclidean { center } => {
                0.5 * p
                    .iter()
                    .zip(center.as_slice())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            }
        }
    }

    /// `sup_{p in simplex} d(p)`: `log n` for the entropy,
    /// `max_i ||e_i - q||^2 / 2` (at most 1) for the Euclidean prox.
    pub fn sup_value(&self) -> f64 {
        match self {
            Prox::Entropy { n } => (*n as f64).ln(),
            Prox::Euclidean { center } => {
                let q = center.as_slice();
                let sq: f64 = q.iter().map(|v| v * v).sum();
                let min = q.iter().copied().fold(f64::INFINITY, f64::min);
                0.5 * (sq + 1.0 - 2.0 * min)
            }
        }
    }

    /// The norm in which `d` is 1-strongly convex (l1 or l2).
    pub fn sharp_norm(&self, v: &[f64]) -> f64 {
        match self {
            Prox::Entropy { .. } => v.iter().map(|x| x.abs()).sum(),
            Prox::Euclidean { .. } => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    /// `argmin_p <g_alpha, p> + mu d(p)` over the simplex.
    ///
    /// Entropy: the softmax of `-g_alpha / mu`, shifted by its maximum before
    /// exponentiating. Euclidean: the projection of `q - g_alpha / mu`.
    pub fn smoothed_argmin(&self, g_alpha: &[f64], mu: f64) -> Result<SimplexVector> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "smoothing parameter must be positive, got {mu}"
            )));
        }
        if g_alpha.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: g_alpha.len(),
            });
        }
        if let Some(index) = g_alpha.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(self.argmin_unchecked(g_alpha, mu))
    }

    pub(crate) fn argmin_unchecked(&self, g_alpha: &[f64], mu: f64) -> SimplexVector {
        match self {
            Prox::Entropy { .. } => {
                let shift = g_alpha
                    .iter()
                    .map(|&v| -v / mu)
                    .fold(f64::NEG_INFINITY, f64::max);
                let e: Vec<f64> = g_alpha.iter().map(|&v| (-v / mu - shift).exp()).collect();
                SimplexVector::renormalize(e)
            }
            Prox::Euclidean { center } => {
                let v: Vec<f64> = center
                    .as_slice()
                    .iter()
                    .zip(g_alpha)
                    .map(|(q, g)| q - g / mu)
                    .collect();
                project_simplex(&v)
            }
        }
    }
}
