use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::matrix::{dot, Matrix};

use super::{pd_tolerance, CorrelationMatrix};

/// Dense lower-triangular matrix with a strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    entries: Matrix,
}

impl LowerTriangular {
    pub fn new(entries: Matrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.rows(),
                found: entries.cols(),
            });
        }
        let n = entries.rows();
        for i in 0..n {
            if !(entries[(i, i)] > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "lower-triangular diagonal entry {i} is {}, expected > 0",
                    entries[(i, i)]
                )));
            }
            if entries.row(i)[i + 1..].iter().any(|&v| v != 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has entries above the diagonal"
                )));
            }
        }
        Ok(Self { entries })
    }

    pub(crate) fn from_trusted(entries: Matrix) -> Self {
        Self { entries }
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

    /// `T·x`, touching only the lower triangle.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
        Ok((0..n)
            .map(|i| dot(&self.entries.row(i)[..=i], &x[..=i]))
            .collect())
    }
}

/// `Σ = L·Lᵀ` (positive diagonal, hence unique) together with `U = L⁻¹`, so
/// that `U·Σ·Uᵀ = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactors {
    pub lower: LowerTriangular,
    pub inverse: LowerTriangular,
}

impl CholeskyFactors {
    pub fn n(&self) -> usize {
        self.lower.n()
    }
}

pub fn cholesky_inverse(sigma: &CorrelationMatrix) -> Result<CholeskyFactors> {
    cholesky_inverse_with(sigma, Execution::default())
}

pub(crate) fn cholesky_inverse_with(
    sigma: &CorrelationMatrix,
    exec: Execution,
) -> Result<CholeskyFactors> {
    let n = sigma.n();
    let lower =
        factor_shifted(sigma.as_matrix(), 0.0, pd_tolerance(n)).map_err(|(index, pivot)| {
            Error::FactorizationFailure {
                index,
                pivot,
                tolerance: pd_tolerance(n),
            }
        })?;
    let inverse = invert_lower(&lower, exec);
    Ok(CholeskyFactors {
        lower: LowerTriangular::from_trusted(lower),
        inverse: LowerTriangular::from_trusted(inverse),
    })
}

/// Row-oriented Cholesky of `m - shift·I`. Fails with `(index, pivot)` when a
/// pivot is not strictly above `floor`.
pub(super) fn factor_shifted(
    m: &Matrix,
    shift: f64,
    floor: f64,
) -> std::result::Result<Matrix, (usize, f64)> {
    let n = m.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            let s = m[(i, j)] - dot(&l.row(i)[..j], &l.row(j)[..j]);
            l[(i, j)] = s / l[(j, j)];
        }
        let pivot = m[(i, i)] - shift - dot(&l.row(i)[..i], &l.row(i)[..i]);
        if !(pivot > floor) {
            return Err((i, pivot));
        }
        l[(i, i)] = pivot.sqrt();
    }
    Ok(l)
}

/// `L⁻¹` by independent forward substitutions, one per column.
fn invert_lower(l: &Matrix, exec: Execution) -> Matrix {
    let n = l.rows();
    let columns = exec.map_indices(n, |c| {
        let mut col = vec![0.0; n - c];
        col[0] = 1.0 / l[(c, c)];
        for i in c + 1..n {
            let s = dot(&l.row(i)[c..i], &col[..i - c]);
            col[i - c] = -s / l[(i, i)];
        }
        col
    });
    let mut u = Matrix::zeros(n, n);
    for (c, col) in columns.into_iter().enumerate() {
        for (offset, v) in col.into_iter().enumerate() {
            u[(c + offset, c)] = v;
        }
    }
    u
}

/// Diagonal of `Σ⁻¹ = UᵀU`, i.e. squared column norms of `U`.
pub fn inverse_diagonal(factors: &CholeskyFactors) -> Vec<f64> {
    let u = factors.inverse.as_matrix();
    let n = u.rows();
    let mut diag = vec![0.0; n];
    for i in 0..n {
        for (k, &v) in u.row(i)[..=i].iter().enumerate() {
            diag[k] += v * v;
        }
    }
    diag
}
