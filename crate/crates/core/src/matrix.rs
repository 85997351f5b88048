//! Dense row-major matrices and the handful of kernels the rest of the crate
//! needs: products, matrix-vector application and the spectral norm.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Cap on power iterations in [`Matrix::spectral_norm`].
pub const SPECTRAL_NORM_MAX_ITER: usize = 10_000;
/// Relative change in the Rayleigh quotient at which power iteration stops.
pub const SPECTRAL_NORM_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    /// `selfᵀ · x`.
    pub fn matvec_transposed(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: x.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                axpy(xi, self.row(i), &mut out);
            }
        }
        Ok(out)
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(k), out_row);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest singular value, by power iteration on `MᵀM` from the normalized
    /// all-ones vector.
    pub fn spectral_norm(&self) -> Result<f64> {
        if !self.is_finite() {
            return Err(Error::InvalidParameter(
                "spectral norm of a matrix with non-finite entries".into(),
            ));
        }
        if self.cols == 0 || self.rows == 0 {
            return Ok(0.0);
        }
        let mut v = vec![1.0 / (self.cols as f64).sqrt(); self.cols];
        let mut previous = f64::NAN;
        for _ in 0..SPECTRAL_NORM_MAX_ITER {
            let mv = self.matvec(&v)?;
            let rayleigh = dot(&mv, &mv);
            if rayleigh == 0.0 {
                return Ok(0.0);
            }
            let mut w = self.matvec_transposed(&mv)?;
            let norm = dot(&w, &w).sqrt();
            if norm == 0.0 {
                return Ok(rayleigh.sqrt());
            }
            w.iter_mut().for_each(|x| *x /= norm);
            v = w;
            if (rayleigh - previous).abs() <= SPECTRAL_NORM_REL_TOL * rayleigh {
                return Ok(rayleigh.sqrt());
            }
            previous = rayleigh;
        }
        Err(Error::ConvergenceFailure {
            iterations: SPECTRAL_NORM_MAX_ITER,
        })
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Inner product with four independent accumulators so the loop vectorizes.
/// The summation order is fixed, so results are reproducible.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0_f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let tail: f64 = chunks_a
        .remainder()
        .iter()
        .zip(chunks_b.remainder())
        .map(|(x, y)| x * y)
        .sum();
    for (ca, cb) in chunks_a.zip(chunks_b) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Least-squares slope of `ln(max_{|j-k|=d} |m(j,k)|)` against `ln d` over
/// `d_lo..=d_hi`. Lags whose maximum is exactly zero are skipped; `None` when
/// fewer than two lags remain.
pub fn fitted_decay_slope(m: &Matrix, d_lo: usize, d_hi: usize) -> Option<f64> {
    let n = m.rows().min(m.cols());
    let d_hi = d_hi.min(n.saturating_sub(1));
    let mut points = Vec::new();
    for d in d_lo.max(1)..=d_hi {
        let mut best = 0.0_f64;
        for i in d..n {
            best = best.max(m[(i, i - d)].abs()).max(m[(i - d, i)].abs());
        }
        if best > 0.0 {
            points.push(((d as f64).ln(), best.ln()));
        }
    }
    least_squares_slope(&points)
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let len = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / len;
    let my = points.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive_sum() {
        let a: Vec<f64> = (0..11).map(|i| i as f64 * 0.5).collect();
        let b: Vec<f64> = (0..11).map(|i| 1.0 - i as f64).collect();
        let naive: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-12);
    }

    #[test]
    fn spectral_norm_trivial_cases() {
        assert_eq!(Matrix::zeros(4, 4).spectral_norm().unwrap(), 0.0);
        assert!((Matrix::identity(7).spectral_norm().unwrap() - 1.0).abs() < 1e-12);
        let d = Matrix::diagonal(&[3.0, -5.0]);
        assert!((d.spectral_norm().unwrap() - 5.0).abs() < 1e-8);
    }

    #[test]
    fn spectral_norm_rejects_nan() {
        let mut m = Matrix::identity(2);
        m[(0, 1)] = f64::NAN;
        assert!(m.spectral_norm().is_err());
    }

    #[test]
    fn matmul_and_transpose() {
        let a = Matrix::from_row_major(2, 3, vec![1., 2., 3., 4., 5., 6.]).unwrap();
        let ata = a.transpose().matmul(&a).unwrap();
        assert_eq!(ata[(0, 0)], 17.0);
        assert_eq!(ata[(2, 1)], 2.0 * 3.0 + 5.0 * 6.0);
        let x = [1.0, -1.0];
        assert_eq!(a.matvec_transposed(&x).unwrap(), vec![-3.0, -3.0, -3.0]);
    }

    #[test]
    fn decay_slope_of_power_law() {
        let m = Matrix::from_fn(200, 200, |i, j| {
            let d = i.abs_diff(j) as f64;
            if d == 0.0 {
                1.0
            } else {
                d.powf(-2.0)
            }
        });
        let slope = fitted_decay_slope(&m, 5, 50).unwrap();
        assert!((slope + 2.0).abs() < 1e-10);
    }
}
