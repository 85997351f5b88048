#![allow(dead_code)]

use std::f64::consts::PI;

use ihc_core::corr::CorrelationMatrix;
use ihc_core::Matrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Cyclic Jacobi eigenvalues of a symmetric matrix.
pub fn jacobi_eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let scale: f64 = m.as_slice().iter().map(|v| v * v).sum();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off <= 1e-24 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                #[allow(clippy::needless_range_loop)]
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                #[allow(clippy::needless_range_loop)]
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eigenvalue(m: &Matrix) -> f64 {
    jacobi_eigenvalues(m)[0]
}

/// Diagonal of `Σ⁻¹` by LU inversion in nalgebra.
pub fn inverse_diagonal_oracle(m: &Matrix) -> Vec<f64> {
    let n = m.rows();
    let inv = nalgebra::DMatrix::from_row_slice(n, n, m.as_slice())
        .try_inverse()
        .expect("invertible");
    (0..n).map(|i| inv[(i, i)]).collect()
}

pub fn dense_inverse(m: &Matrix) -> Matrix {
    let n = m.rows();
    let inv = nalgebra::DMatrix::from_row_slice(n, n, m.as_slice())
        .try_inverse()
        .expect("invertible");
    Matrix::from_fn(n, n, |i, j| inv[(i, j)])
}

/// Composite Simpson rule for `(2π)⁻¹ ∫_{-π}^{π} h` with `intervals` panels.
pub fn simpson_mean(h: impl Fn(f64) -> f64, intervals: usize) -> f64 {
    assert!(intervals.is_multiple_of(2));
    let step = 2.0 * PI / intervals as f64;
    let mut s = h(-PI) + h(PI);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * h(-PI + step * i as f64);
    }
    s * step / 3.0 / (2.0 * PI)
}

/// Random unit-diagonal correlation matrix `D^{-1/2} A Aᵀ D^{-1/2}` with
/// `A` an `n × 2n` Gaussian matrix.
pub fn random_correlation<R: Rng>(n: usize, rng: &mut R) -> CorrelationMatrix {
    let k = 2 * n;
    let a: Vec<f64> = (0..n * k).map(|_| rng.sample(StandardNormal)).collect();
    let mut s = Matrix::from_fn(n, n, |i, j| {
        (0..k).map(|t| a[i * k + t] * a[j * k + t]).sum::<f64>()
    });
    let d: Vec<f64> = (0..n).map(|i| s[(i, i)].sqrt()).collect();
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] /= d[i] * d[j];
        }
        s[(i, i)] = 1.0;
    }
    CorrelationMatrix::new(s).expect("random correlation matrix is PD")
}

/// HC evaluated straight from the definition: every `j`, no early exit.
pub fn brute_force_hc(p: &[f64]) -> Option<f64> {
    let n = p.len();
    let mut sorted = p.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let nf = n as f64;
    let mut best: Option<f64> = None;
    for j in 1..=n {
        let pj = sorted[j - 1];
        if pj >= 1.0 / nf && pj <= 0.5 {
            let v = nf.sqrt() * (j as f64 / nf - pj) / (pj * (1.0 - pj)).sqrt();
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Interior `[lo, hi)` of 0-based indices covering `⌈√n⌉..=n−⌈√n⌉` in
/// 1-based terms.
pub fn interior(n: usize) -> std::ops::Range<usize> {
    let e = (n as f64).sqrt().ceil() as usize;
    e - 1..n - e
}
