//! Datasets, kernels and the normalized signed Gram matrix.

use crate::error::{Error, Result};

/// Absolute entrywise tolerance for symmetry of a precomputed kernel matrix.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Labelled points `x_i` in `R^d` with `y_i` in `{-1, +1}`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    dim: usize,
    points: Vec<f64>,
    labels: Vec<f64>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            flat.extend_from_slice(p);
        }
        Self::from_flat(dim, flat, labels)
    }

    /// Builds a dataset from a row-major `n x dim` buffer.
    pub fn from_flat(dim: usize, points: Vec<f64>, labels: Vec<f64>) -> Result<Self> {
        if dim == 0 || labels.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if points.len() != labels.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * dim,
                found: points.len(),
            });
        }
        for (index, &value) in labels.iter().enumerate() {
            if value != 1.0 && value != -1.0 {
                return Err(Error::InvalidLabel { index, value });
            }
        }
        if let Some(index) = points.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: index / dim });
        }
        Ok(Self {
            dim,
            points,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim)
    }

    /// Returns a copy with one more point appended.
    pub fn with_point(&self, point: &[f64], label: f64) -> Result<Self> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        let mut points = self.points.clone();
        points.extend_from_slice(point);
        let mut labels = self.labels.clone();
        labels.push(label);
        Self::from_flat(self.dim, points, labels)
    }
}

/// A raw (unnormalized, unsigned) kernel matrix supplied by the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    values: Vec<f64>,
}

impl KernelMatrix {
    /// Validates symmetry (to [`SYMMETRY_TOL`]) and a strictly positive diagonal.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: index / n });
        }
        for i in 0..n {
            let d = values[i * n + i];
            if d <= 0.0 {
                return Err(Error::NonPositiveDiagonal { index: i, value: d });
            }
            for j in (i + 1)..n {
                let (upper, lower) = (values[i * n + j], values[j * n + i]);
                if (upper - lower).abs() > SYMMETRY_TOL {
                    return Err(Error::AsymmetricKernel {
                        row: i,
                        col: j,
                        upper,
                        lower,
                    });
                }
            }
        }
        Ok(Self { n, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Self::new(n, values)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// Kernel choice. `Precomputed` is only defined on training indices.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    Linear,
    /// `(u.v + offset)^degree`
    Polynomial {
        degree: u32,
        offset: f64,
    },
    /// `exp(-||u - v||^2 / (2 bandwidth^2))`
    Rbf {
        bandwidth: f64,
    },
    Precomputed(KernelMatrix),
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Polynomial { degree, offset } => {
                if degree == 0 {
                    return Err(Error::InvalidParameter(
                        "polynomial degree must be positive".into(),
                    ));
                }
                if !(offset >= 0.0 && offset.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "polynomial offset must be >= 0, got {offset}"
                    )));
                }
            }
            Kernel::Rbf { bandwidth } => {
                if !(bandwidth > 0.0 && bandwidth.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "rbf bandwidth must be > 0, got {bandwidth}"
                    )));
                }
            }
            Kernel::Linear | Kernel::Precomputed(_) => {}
        }
        Ok(())
    }

    /// `K(u, v)` for feature-space kernels.
    pub fn evaluate(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        self.validate()?;
        match *self {
            Kernel::Precomputed(_) => Err(Error::Unsupported(
                "a precomputed kernel cannot be evaluated on new points".into(),
            )),
            _ => Ok(self.eval_unchecked(u, v)),
        }
    }

    fn eval_unchecked(&self, u: &[f64], v: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => dot(u, v),
            Kernel::Polynomial { degree, offset } => (dot(u, v) + offset).powi(degree as i32),
            Kernel::Rbf { bandwidth } => {
                let sq: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
                (-sq / (2.0 * bandwidth * bandwidth)).exp()
            }
            Kernel::Precomputed(_) => unreachable!("precomputed kernels have no feature map"),
        }
    }
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Dense normalized signed Gram matrix.
///
/// Invariants: unit diagonal, exact symmetry, entries bounded by one in
/// magnitude (up to round-off) and positive semi-definite. Every product uses
/// a fixed left-to-right summation order so solver traces are reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl GramMatrix {
    /// `G_ij = y_i y_j K(x_i, x_j) / sqrt(K(x_i, x_i) K(x_j, x_j))`.
    pub fn build(data: &Dataset, kernel: &Kernel) -> Result<Self> {
        kernel.validate()?;
        if let Kernel::Precomputed(k) = kernel {
            if k.size() != data.len() {
                return Err(Error::DimensionMismatch {
                    expected: data.len(),
                    found: k.size(),
                });
            }
            return Self::from_kernel_matrix(k, data.labels());
        }
        let n = data.len();
        let mut raw = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = kernel.eval_unchecked(data.point(i), data.point(j));
                raw[i * n + j] = v;
                raw[j * n + i] = v;
            }
        }
        Self::normalize(n, raw, data.labels())
    }

    /// Normalizes and label-signs a raw kernel matrix.
    pub fn from_kernel_matrix(k: &KernelMatrix, labels: &[f64]) -> Result<Self> {
        if labels.len() != k.size() {
            return Err(Error::DimensionMismatch {
                expected: k.size(),
                found: labels.len(),
            });
        }
        for (index, &value) in labels.iter().enumerate() {
            if value != 1.0 && value != -1.0 {
                return Err(Error::InvalidLabel { index, value });
            }
        }
        let n = k.size();
        let mut raw = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                // Average the two triangles so small asymmetries cancel.
                let v = if i == j {
                    k.get(i, i)
                } else {
                    0.5 * (k.get(i, j) + k.get(j, i))
                };
                raw[i * n + j] = v;
                raw[j * n + i] = v;
            }
        }
        Self::normalize(n, raw, labels)
    }

    fn normalize(n: usize, mut raw: Vec<f64>, labels: &[f64]) -> Result<Self> {
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let d = raw[i * n + i];
            if !(d > 0.0 && d.is_finite()) {
                return Err(Error::DegeneratePoint { index: i, value: d });
            }
            diag.push(d);
        }
        for i in 0..n {
            raw[i * n + i] = 1.0;
            for j in (i + 1)..n {
                // One square root of the product keeps duplicate points at
                // exactly +-1; the clamp absorbs rounding past Cauchy-Schwarz.
                let cos = (raw[i * n + j] / (diag[i] * diag[j]).sqrt()).clamp(-1.0, 1.0);
                let v = labels[i] * labels[j] * cos;
                raw[i * n + j] = v;
                raw[j * n + i] = v;
            }
        }
        Ok(Self { n, entries: raw })
    }

    /// Wraps an already-normalized matrix. Checks unit diagonal, exact
    /// symmetry and `|G_ij| <= 1 + 1e-12`; positive semi-definiteness is the
    /// caller's responsibility.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
            entries.extend_from_slice(r);
        }
        for i in 0..n {
            if entries[i * n + i] != 1.0 {
                return Err(Error::InvalidGram(format!("G[{i}][{i}] != 1")));
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if v != entries[j * n + i] {
                    return Err(Error::InvalidGram(format!("G[{i}][{j}] != G[{j}][{i}]")));
                }
                if !(v.abs() <= 1.0 + 1e-12) {
                    return Err(Error::InvalidGram(format!("|G[{i}][{j}]| > 1")));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Row `i`, which equals column `i` by symmetry.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() == self.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            })
        }
    }

    /// `G v` without a length check.
    pub(crate) fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        self.entries
            .chunks_exact(self.n)
            .map(|row| dot(row, v))
            .collect()
    }

    /// `G alpha`: the normalized signed functional margins of `f_alpha`.
    pub fn decision_values(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        self.check_len(alpha)?;
        Ok(self.mul_vec(alpha))
    }

    /// `<a, b>_G = a^T G b`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check_len(a)?;
        self.check_len(b)?;
        Ok(dot(a, &self.mul_vec(b)))
    }

    /// `||a||_G`, with negative round-off in the quadratic form clamped to 0.
    pub fn norm(&self, a: &[f64]) -> Result<f64> {
        Ok(self.inner(a, a)?.max(0.0).sqrt())
    }
}

/// `f_alpha(x) = sum_i alpha_i y_i K(x_i, x) / sqrt(K(x_i, x_i))`.
pub fn predict(data: &Dataset, kernel: &Kernel, alpha: &[f64], x: &[f64]) -> Result<f64> {
    if matches!(kernel, Kernel::Precomputed(_)) {
        return Err(Error::Unsupported(
            "prediction needs a kernel defined on new points".into(),
        ));
    }
    if alpha.len() != data.len() {
        return Err(Error::DimensionMismatch {
            expected: data.len(),
            found: alpha.len(),
        });
    }
    if x.len() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            found: x.len(),
        });
    }
    kernel.validate()?;
    let mut f = 0.0;
    for (i, &a) in alpha.iter().enumerate() {
        let xi = data.point(i);
        let self_k = kernel.eval_unchecked(xi, xi);
        if self_k <= 0.0 {
            return Err(Error::DegeneratePoint {
                index: i,
                value: self_k,
            });
        }
        f += a * data.label(i) * kernel.eval_unchecked(xi, x) / self_k.sqrt();
    }
    Ok(f)
}
