use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectral::f_alpha_coefficient;

use super::{backward_shift_toeplitz, toeplitz_from_coeffs, CorrelationMatrix};

fn scale(n: usize, alpha0: f64) -> f64 {
    (n as f64).powf(alpha0) / 2.0
}

/// `D·G` with `G` the first-difference matrix (1 on the diagonal, −1 below)
/// and `D = diag(1, √a, …, √a)`, `a = n^{α₀}/2`.
pub fn strong_transform_matrix(n: usize, alpha0: f64) -> Result<Matrix> {
    let mut m = backward_shift_toeplitz(&[1.0, -1.0], n)?;
    let root = scale(n, alpha0).sqrt();
    for i in 1..n {
        m.row_mut(i).iter_mut().for_each(|v| *v *= root);
    }
    Ok(m)
}

/// `D·G·x` without forming the matrix.
pub fn strong_transform(x: &[f64], alpha0: f64) -> Vec<f64> {
    let root = scale(x.len(), alpha0).sqrt();
    let mut out = Vec::with_capacity(x.len());
    if let Some(&first) = x.first() {
        out.push(first);
        out.extend(x.windows(2).map(|w| root * (w[1] - w[0])));
    }
    out
}

/// Covariance of `D·G·X` for `X ~ N(0, Σ)`. Off the first row and column its
/// lag-`k` entries are close to `c_k / 2` once `k^α ≤ n^{α₀}`.
pub fn strong_transformed_covariance(
    sigma: &CorrelationMatrix,
    alpha0: f64,
) -> Result<CorrelationMatrix> {
    let t = strong_transform_matrix(sigma.n(), alpha0)?;
    let m = t.matmul(sigma.as_matrix())?.matmul(&t.transpose())?;
    CorrelationMatrix::new(m)
}

/// `(1, c_1/2, c_2/2, …)` of length `len`, the limiting autocorrelations of
/// the scaled increments.
pub fn increment_autocorrelations(alpha: f64, len: usize) -> Vec<f64> {
    (0..len)
        .map(|k| {
            if k == 0 {
                1.0
            } else {
                f_alpha_coefficient(alpha, k) / 2.0
            }
        })
        .collect()
}

/// `diag(1, T)` where `T` is the `(n−1)`-dimensional Toeplitz matrix of
/// [`increment_autocorrelations`]; the stationary approximation of
/// [`strong_transformed_covariance`].
pub fn strong_surrogate(n: usize, alpha: f64) -> Result<CorrelationMatrix> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "(0, 1)",
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "surrogate needs n >= 2, got {n}"
        )));
    }
    let inner = toeplitz_from_coeffs(&increment_autocorrelations(alpha, n - 1), n - 1)?;
    let m = Matrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => 1.0,
        (0, _) | (_, 0) => 0.0,
        _ => inner.get(i - 1, j - 1),
    });
    CorrelationMatrix::new(m)
}
