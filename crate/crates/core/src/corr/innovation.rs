use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::{cholesky_inverse, CholeskyFactors, CorrelationMatrix, LowerTriangular};

/// Keeps `U(k, j)` for `k - b + 1 ≤ j ≤ k` and zeroes everything else. Rows
/// `k < b` simply see a shorter window.
pub fn band(u: &LowerTriangular, b: usize) -> Result<LowerTriangular> {
    let n = u.n();
    if b == 0 || b > n {
        return Err(Error::BandwidthOutOfRange { b, n });
    }
    let m = u.as_matrix();
    let banded = Matrix::from_fn(
        n,
        n,
        |k, j| if j <= k && k - j < b { m[(k, j)] } else { 0.0 },
    );
    Ok(LowerTriangular::from_trusted(banded))
}

/// Scales every nonzero column to unit Euclidean norm.
pub fn normalize_columns(m: &Matrix) -> Matrix {
    let mut norms = vec![0.0; m.cols()];
    for i in 0..m.rows() {
        for (j, v) in m.row(i).iter().enumerate() {
            norms[j] += v * v;
        }
    }
    norms.iter_mut().for_each(|s| *s = s.sqrt());
    Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        if norms[j] > 0.0 {
            m[(i, j)] / norms[j]
        } else {
            0.0
        }
    })
}

/// `V = Ūᵀ·U`, where `Ū` is the column-normalized band of `U = L⁻¹`.
///
/// `Ū` is stored by column: `band[k * b + t] = Ū(k + t, k)`. `V` is never
/// materialized for application; `V·x` is computed as `Ūᵀ(U·x)`.
#[derive(Debug, Clone)]
pub struct InnovationTransform {
    bandwidth: usize,
    factors: Arc<CholeskyFactors>,
    band: Vec<f64>,
}

pub fn innovation_transform(sigma: &CorrelationMatrix, b: usize) -> Result<InnovationTransform> {
    let factors = Arc::new(cholesky_inverse(sigma)?);
    InnovationTransform::new(factors, b)
}

impl InnovationTransform {
    pub fn new(factors: Arc<CholeskyFactors>, b: usize) -> Result<Self> {
        let n = factors.n();
        if b == 0 || b > n {
            return Err(Error::BandwidthOutOfRange { b, n });
        }
        let u = factors.inverse.as_matrix();
        let mut band = vec![0.0; n * b];
        for k in 0..n {
            let column = &mut band[k * b..(k + 1) * b];
            for (t, slot) in column.iter_mut().enumerate() {
                if k + t < n {
                    *slot = u[(k + t, k)];
                }
            }
            let norm = column.iter().map(|v| v * v).sum::<f64>().sqrt();
            column.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(Self {
            bandwidth: b,
            factors,
            band,
        })
    }

    pub fn n(&self) -> usize {
        self.factors.n()
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn factors(&self) -> &Arc<CholeskyFactors> {
        &self.factors
    }

    /// Dense `Ū`.
    pub fn ubar(&self) -> Matrix {
        let (n, b) = (self.n(), self.bandwidth);
        let mut m = Matrix::zeros(n, n);
        for k in 0..n {
            for t in 0..b.min(n - k) {
                m[(k + t, k)] = self.band[k * b + t];
            }
        }
        m
    }

    /// Dense `V = Ūᵀ·U`.
    pub fn v(&self) -> Matrix {
        let (n, b) = (self.n(), self.bandwidth);
        let u = self.factors.inverse.as_matrix();
        let mut v = Matrix::zeros(n, n);
        for k in 0..n {
            let row = v.row_mut(k);
            for t in 0..b.min(n - k) {
                let w = self.band[k * b + t];
                for (dst, src) in row.iter_mut().zip(u.row(k + t)) {
                    *dst += w * src;
                }
            }
        }
        v
    }

    /// `Ūᵀ·Ū`, the null covariance of `V·X`.
    pub fn noise_covariance(&self) -> Matrix {
        let ubar = self.ubar();
        ubar.transpose().matmul(&ubar).expect("square")
    }

    /// `V·x`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let innovations = self.factors.inverse.apply(x)?;
        self.apply_to_innovations(&innovations)
    }

    /// `Ūᵀ·y` for already-whitened `y = U·x`.
    pub fn apply_to_innovations(&self, y: &[f64]) -> Result<Vec<f64>> {
        let (n, b) = (self.n(), self.bandwidth);
        if y.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: y.len(),
            });
        }
        Ok((0..n)
            .map(|k| {
                let len = b.min(n - k);
                self.band[k * b..k * b + len]
                    .iter()
                    .zip(&y[k..k + len])
                    .map(|(w, v)| w * v)
                    .sum()
            })
            .collect())
    }
}
