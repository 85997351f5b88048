//! Correlation matrices: construction, validation, Cholesky whitening and the
//! banded innovation transform.

mod cholesky;
mod innovation;
mod io;
mod strong;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::spectral::SpectralDensity;

pub use cholesky::{cholesky_inverse, inverse_diagonal, CholeskyFactors, LowerTriangular};
pub use innovation::{band, innovation_transform, normalize_columns, InnovationTransform};
pub use io::{read_matrix_csv, write_matrix_csv};
pub use strong::{
    increment_autocorrelations, strong_surrogate, strong_transform, strong_transform_matrix,
    strong_transformed_covariance,
};

/// A matrix is accepted as positive definite when its smallest eigenvalue
/// exceeds `PD_TOL_PER_DIM * n`.
pub const PD_TOL_PER_DIM: f64 = 1e-10;
const SYMMETRY_TOL: f64 = 1e-12;
const DIAGONAL_TOL: f64 = 1e-12;

pub fn pd_tolerance(n: usize) -> f64 {
    PD_TOL_PER_DIM * n as f64
}

/// Symmetric positive-definite noise law. Ordinarily unit-diagonal; the
/// relaxed variant (see [`CorrelationMatrix::covariance`]) only requires a
/// positive diagonal and is used for reformulated cluster covariances.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: Matrix,
    unit_diagonal: bool,
}

impl CorrelationMatrix {
    pub fn new(entries: Matrix) -> Result<Self> {
        Self::validated(entries, true)
    }

    /// Relaxed-diagonal variant: symmetric and positive definite with a
    /// positive (not necessarily unit) diagonal.
    pub fn covariance(entries: Matrix) -> Result<Self> {
        Self::validated(entries, false)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            entries: Matrix::identity(n),
            unit_diagonal: true,
        }
    }

    fn validated(mut entries: Matrix, unit_diagonal: bool) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.rows(),
                found: entries.cols(),
            });
        }
        if entries.rows() == 0 {
            return Err(Error::InvalidParameter("empty matrix".into()));
        }
        if !entries.is_finite() {
            return Err(Error::InvalidParameter(
                "matrix has non-finite entries".into(),
            ));
        }
        let n = entries.rows();
        for i in 0..n {
            let d = entries[(i, i)];
            let bad = if unit_diagonal {
                (d - 1.0).abs() > DIAGONAL_TOL
            } else {
                d <= 0.0
            };
            if bad {
                return Err(Error::BadDiagonal { index: i, value: d });
            }
            for j in 0..i {
                let (a, b) = (entries[(i, j)], entries[(j, i)]);
                if (a - b).abs() > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                    return Err(Error::NotSymmetric { row: i, col: j });
                }
                let mean = 0.5 * (a + b);
                entries[(i, j)] = mean;
                entries[(j, i)] = mean;
            }
            if unit_diagonal {
                entries[(i, i)] = 1.0;
            }
        }
        check_positive_definite(&entries)?;
        Ok(Self {
            entries,
            unit_diagonal,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.entries[(j, k)]
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.entries
    }

    pub fn into_matrix(self) -> Matrix {
        self.entries
    }

    pub fn is_unit_diagonal(&self) -> bool {
        self.unit_diagonal
    }

    /// Smallest eigenvalue by a dense symmetric eigensolver.
    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.entries)
    }
}

pub(crate) fn min_eigenvalue(m: &Matrix) -> f64 {
    let n = m.rows();
    let dense = DMatrix::from_row_slice(n, n, m.as_slice());
    dense
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `λ_min(Σ) > τ` exactly when the Cholesky factorization of `Σ - τI`
/// exists, so a shifted factorization decides positive definiteness without
/// an eigensolver. The eigenvalue is only computed for the error report.
fn check_positive_definite(m: &Matrix) -> Result<()> {
    let n = m.rows();
    let tol = pd_tolerance(n);
    if cholesky::factor_shifted(m, tol, 0.0).is_err() {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min_eigenvalue(m),
            tolerance: tol,
        });
    }
    Ok(())
}

/// Symmetric Toeplitz matrix with `M(j,k) = a[|j-k|]`; lags beyond the end
/// of `a` are zero.
pub fn toeplitz_from_coeffs(a: &[f64], n: usize) -> Result<CorrelationMatrix> {
    match a.first() {
        None => return Err(Error::InvalidParameter("empty coefficient sequence".into())),
        Some(&a0) if a0 != 1.0 => {
            return Err(Error::BadDiagonal {
                index: 0,
                value: a0,
            })
        }
        _ => {}
    }
    let m = Matrix::from_fn(n, n, |j, k| a.get(j.abs_diff(k)).copied().unwrap_or(0.0));
    CorrelationMatrix::new(m)
}

/// Truncated Toeplitz matrix `Σ_n(f)` generated by a spectral density.
pub fn toeplitz_from_density(
    f: &SpectralDensity,
    n: usize,
    grid: usize,
) -> Result<CorrelationMatrix> {
    let mut a = f.autocorrelations(n, grid)?;
    // Quadrature leaves a_0 within rounding of 1.
    if (a[0] - 1.0).abs() > 1e-9 {
        return Err(Error::BadDiagonal {
            index: 0,
            value: a[0],
        });
    }
    a[0] = 1.0;
    toeplitz_from_coeffs(&a, n)
}

/// `M(j,k) = max{0, 1 - |j-k|^α n^{-α₀}}`.
pub fn strong_dependence_matrix(n: usize, alpha: f64, alpha0: f64) -> Result<CorrelationMatrix> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "(0, inf)",
        });
    }
    if !(alpha0 > 0.0 && alpha0 <= alpha) {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha0,
            range: "alpha0 in (0, alpha]",
        });
    }
    let scale = (n as f64).powf(-alpha0);
    let lags: Vec<f64> = (0..n)
        .map(|d| (1.0 - (d as f64).powf(alpha) * scale).max(0.0))
        .collect();
    let m = Matrix::from_fn(n, n, |j, k| lags[j.abs_diff(k)]);
    CorrelationMatrix::new(m)
}

/// Lower-triangular Toeplitz matrix `Σ_d g_d B^d` (`g[d]` on the `d`-th
/// sub-diagonal).
pub fn backward_shift_toeplitz(g: &[f64], n: usize) -> Result<Matrix> {
    if g.is_empty() {
        return Err(Error::InvalidParameter(
            "backward shift generator must be nonempty".into(),
        ));
    }
    Ok(Matrix::from_fn(n, n, |j, k| {
        if k <= j {
            g.get(j - k).copied().unwrap_or(0.0)
        } else {
            0.0
        }
    }))
}

/// Extreme diagonal entries of `Σ⁻¹` over the 1-based window
/// `⌈√n⌉ ≤ k ≤ n - ⌈√n⌉`.
pub fn diag_inverse_range(sigma: &CorrelationMatrix) -> Result<(f64, f64)> {
    let factors = cholesky_inverse(sigma)?;
    diag_inverse_range_from(&factors)
}

pub fn diag_inverse_range_from(factors: &CholeskyFactors) -> Result<(f64, f64)> {
    let n = factors.n();
    if n < 9 {
        return Err(Error::WindowEmpty { n });
    }
    let edge = (n as f64).sqrt().ceil() as usize;
    let diag = inverse_diagonal(factors);
    let window = &diag[edge - 1..n - edge];
    let lo = window.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}
