//! Spectral densities on `[-π, π]`, their Fourier coefficients, and the rate
//! constants `C(f)`, `C(f, g)` and `C(f_α, g₀)` that rescale the detection
//! boundary.
//!
//! All integrals use the uniform trapezoid rule on `N` equispaced nodes
//! `θ_j = -π + 2πj/N`. For periodic smooth integrands this converges
//! geometrically in `N`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const DEFAULT_GRID: usize = 4096;
pub const MIN_GRID: usize = 256;
pub const DEFAULT_F_ALPHA_TRUNC: usize = 100_000;
pub const MIN_F_ALPHA_TRUNC: usize = 1_000;
/// Largest admissible imaginary part of a Fourier coefficient of a density
/// flagged as symmetric.
pub const IMAGINARY_RESIDUE_TOL: f64 = 1e-8;

/// Evaluator for a spectral density.
#[derive(Clone)]
pub enum DensityKind {
    /// `f(θ) = a₀ + 2 Σ_{k≥1} a_k cos kθ`, parameterized by its Fourier
    /// coefficients (the autocorrelations of the Toeplitz matrix it generates).
    Cosine(Vec<f64>),
    /// The strong-dependence density `f_α` truncated after `trunc` terms.
    FAlpha {
        alpha: f64,
        trunc: usize,
    },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for DensityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityKind::Cosine(a) => f.debug_tuple("Cosine").field(a).finish(),
            DensityKind::FAlpha { alpha, trunc } => f
                .debug_struct("FAlpha")
                .field("alpha", alpha)
                .field("trunc", trunc)
                .finish(),
            DensityKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralDensity {
    kind: DensityKind,
    symmetric: bool,
    ess_inf_hint: Option<f64>,
}

impl SpectralDensity {
    /// `f ≡ 1`.
    pub fn white_noise() -> Self {
        Self {
            kind: DensityKind::Cosine(vec![1.0]),
            symmetric: true,
            ess_inf_hint: Some(1.0),
        }
    }

    /// Density whose Fourier coefficients are `a[0..]`; requires `a[0] = 1`
    /// so that the generated Toeplitz matrix has unit diagonal.
    pub fn from_autocorrelations(a: Vec<f64>) -> Result<Self> {
        match a.first() {
            None => Err(Error::InvalidParameter(
                "density needs at least one coefficient".into(),
            )),
            Some(&a0) if a0 != 1.0 => Err(Error::BadDiagonal {
                index: 0,
                value: a0,
            }),
            Some(_) if a.iter().any(|v| !v.is_finite()) => Err(Error::InvalidParameter(
                "density coefficients must be finite".into(),
            )),
            Some(_) => Ok(Self {
                kind: DensityKind::Cosine(a),
                symmetric: true,
                ess_inf_hint: None,
            }),
        }
    }

    /// `f(θ) = 1 + 2ρ cos θ`, generating the tri-diagonal Toeplitz matrix.
    pub fn tridiagonal(rho: f64) -> Self {
        Self::from_autocorrelations(vec![1.0, rho]).expect("a0 = 1")
    }

    /// `f(θ) = 1 + ½ cos θ + 2ρ cos 2θ`, the five-diagonal family.
    pub fn five_diagonal(rho: f64) -> Self {
        Self::from_autocorrelations(vec![1.0, 0.25, rho]).expect("a0 = 1")
    }

    pub fn f_alpha(alpha: f64, trunc: usize) -> Result<Self> {
        check_f_alpha_args(alpha, trunc)?;
        Ok(Self {
            kind: DensityKind::FAlpha { alpha, trunc },
            symmetric: true,
            ess_inf_hint: None,
        })
    }

    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static, symmetric: bool) -> Self {
        Self {
            kind: DensityKind::Custom(Arc::new(f)),
            symmetric,
            ess_inf_hint: None,
        }
    }

    pub fn with_ess_inf_hint(mut self, hint: f64) -> Self {
        self.ess_inf_hint = Some(hint);
        self
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn ess_inf_hint(&self) -> Option<f64> {
        self.ess_inf_hint
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match &self.kind {
            DensityKind::Cosine(a) => cosine_series(a, theta),
            DensityKind::FAlpha { alpha, trunc } => f_alpha_unchecked(theta, *alpha, *trunc),
            DensityKind::Custom(f) => f(theta),
        }
    }

    /// Values at the trapezoid nodes `θ_j = -π + 2πj/grid`.
    pub fn sample(&self, grid: usize) -> Result<Vec<f64>> {
        let nodes = grid_nodes(grid)?;
        Ok(match &self.kind {
            DensityKind::FAlpha { alpha, trunc } => f_alpha_folded(*alpha, *trunc, grid),
            _ => nodes.iter().map(|&t| self.eval(t)).collect(),
        })
    }

    /// Fourier coefficients `a_0..a_{len-1}`. Exact for the closed-form
    /// families; quadrature for custom evaluators.
    pub fn autocorrelations(&self, len: usize, grid: usize) -> Result<Vec<f64>> {
        match &self.kind {
            DensityKind::Cosine(a) => {
                Ok((0..len).map(|k| a.get(k).copied().unwrap_or(0.0)).collect())
            }
            DensityKind::FAlpha { alpha, trunc } => Ok((0..len)
                .map(|k| match k {
                    0 => 1.0,
                    k if k <= *trunc => -0.5 * f_alpha_coefficient(*alpha, k),
                    _ => 0.0,
                })
                .collect()),
            DensityKind::Custom(_) => {
                let values = self.sample(grid)?;
                (0..len)
                    .map(|k| coefficient_from_samples(&values, k, self.symmetric))
                    .collect()
            }
        }
    }

    /// Smallest value on the quadrature grid.
    pub fn grid_minimum(&self, grid: usize) -> Result<f64> {
        Ok(self.sample(grid)?.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// `g(θ) = Σ_{k<K} g_k e^{-ikθ}` with real coefficients; the generator of a
/// lower-triangular Toeplitz (backward shift) matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    coeffs: Vec<f64>,
}

impl TrigPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "trigonometric polynomial needs K >= 1 finite coefficients".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1.0] }
    }

    /// `g₀(θ) = 1 - e^{-iθ}`.
    pub fn first_difference() -> Self {
        Self {
            coeffs: vec![1.0, -1.0],
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `|g(θ)|²`, computed as `(Σ g_k cos kθ)² + (Σ g_k sin kθ)²`.
    pub fn modulus_squared(&self, theta: f64) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (k, &g) in self.coeffs.iter().enumerate() {
            let (s, c) = (k as f64 * theta).sin_cos();
            re += g * c;
            im += g * s;
        }
        re * re + im * im
    }
}

/// Trapezoid nodes on `[-π, π)`; `grid` must be a power of two `>= 256`.
pub fn grid_nodes(grid: usize) -> Result<Vec<f64>> {
    if grid < MIN_GRID || !grid.is_power_of_two() {
        return Err(Error::InvalidGrid { grid });
    }
    let h = 2.0 * PI / grid as f64;
    Ok((0..grid).map(|j| -PI + h * j as f64).collect())
}

/// `a_k = (2π)⁻¹ ∫ f(θ) e^{-ikθ} dθ`.
pub fn fourier_coeff(f: &SpectralDensity, k: usize, grid: usize) -> Result<f64> {
    let values = f.sample(grid)?;
    coefficient_from_samples(&values, k, f.symmetric)
}

fn coefficient_from_samples(values: &[f64], k: usize, symmetric: bool) -> Result<f64> {
    let grid = values.len();
    let h = 2.0 * PI / grid as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for (j, &v) in values.iter().enumerate() {
        let theta = -PI + h * j as f64;
        let (s, c) = (k as f64 * theta).sin_cos();
        re += v * c;
        im -= v * s;
    }
    re /= grid as f64;
    im /= grid as f64;
    if symmetric && im.abs() > IMAGINARY_RESIDUE_TOL {
        return Err(Error::NonSymmetricImaginaryResidue { k, residue: im });
    }
    Ok(re)
}

/// Wiener interpolation rate `C(f) = (2π)⁻¹ ∫ 1/f(θ) dθ`.
///
/// Note that `∫ 1/(1 + 2ρ cos θ)` and `∫ 1/(1 - 2ρ cos θ)` coincide under
/// `θ ↦ π - θ`, so either sign convention for the tri-diagonal family gives
/// the same rate.
pub fn wiener_rate(f: &SpectralDensity, grid: usize) -> Result<f64> {
    cluster_rate(f, &TrigPolynomial::one(), grid)
}

/// `C(f, g) = (2π)⁻¹ ∫ |g(θ)|² / f(θ) dθ`.
pub fn cluster_rate(f: &SpectralDensity, g: &TrigPolynomial, grid: usize) -> Result<f64> {
    let nodes = grid_nodes(grid)?;
    let values = f.sample(grid)?;
    let mut total = 0.0;
    for (&theta, &v) in nodes.iter().zip(&values) {
        if !(v > 0.0) {
            return Err(Error::NonPositiveDensity { theta, value: v });
        }
        total += g.modulus_squared(theta) / v;
    }
    Ok(total / grid as f64)
}

/// Second difference `c_k = (k+1)^α + (k-1)^α - 2k^α` (negative for `0<α<1`).
pub fn f_alpha_coefficient(alpha: f64, k: usize) -> f64 {
    match k {
        0 => 0.0,
        1 => 2f64.powf(alpha) - 2.0,
        _ => {
            // k^α [(1+1/k)^α - 1 + (1-1/k)^α - 1] without cancellation.
            let x = 1.0 / k as f64;
            let up = (alpha * x.ln_1p()).exp_m1();
            let down = (alpha * (-x).ln_1p()).exp_m1();
            (k as f64).powf(alpha) * (up + down)
        }
    }
}

/// Exact value of `Σ_{k>trunc} |c_k|`, a bound on the truncation error of
/// [`f_alpha`] at every `θ`.
pub fn f_alpha_tail_bound(alpha: f64, trunc: usize) -> f64 {
    let t = trunc as f64;
    t.powf(alpha) * ((alpha * (1.0 / t).ln_1p()).exp_m1())
}

fn check_f_alpha_args(alpha: f64, trunc: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "(0, 1)",
        });
    }
    if trunc < MIN_F_ALPHA_TRUNC {
        return Err(Error::InvalidParameter(format!(
            "f_alpha truncation {trunc} is below {MIN_F_ALPHA_TRUNC}"
        )));
    }
    Ok(())
}

/// `f_α(θ) = 1 - Σ_{k=1}^{trunc} c_k cos kθ`.
pub fn f_alpha(theta: f64, alpha: f64, trunc: usize) -> Result<f64> {
    check_f_alpha_args(alpha, trunc)?;
    if !(theta.abs() <= PI) {
        return Err(Error::InvalidParameter(format!(
            "theta = {theta} outside [-pi, pi]"
        )));
    }
    Ok(f_alpha_unchecked(theta, alpha, trunc))
}

fn f_alpha_unchecked(theta: f64, alpha: f64, trunc: usize) -> f64 {
    1.0 - (1..=trunc)
        .map(|k| f_alpha_coefficient(alpha, k) * (k as f64 * theta).cos())
        .sum::<f64>()
}

/// `f_α` on the trapezoid grid in `O(trunc + grid²)`: on the nodes,
/// `cos kθ_j = (-1)^k cos(2π (k mod N) j / N)`, so coefficients fold into
/// `N` bins before a single cosine transform.
fn f_alpha_folded(alpha: f64, trunc: usize, grid: usize) -> Vec<f64> {
    let mut bins = vec![0.0; grid];
    for k in 1..=trunc {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        bins[k % grid] += sign * f_alpha_coefficient(alpha, k);
    }
    let table: Vec<f64> = (0..grid)
        .map(|m| (2.0 * PI * m as f64 / grid as f64).cos())
        .collect();
    (0..grid)
        .map(|j| {
            let s: f64 = bins
                .iter()
                .enumerate()
                .map(|(r, &d)| d * table[(r * j) & (grid - 1)])
                .sum();
            1.0 - s
        })
        .collect()
}

/// `C(f_α, g₀) = π⁻¹ ∫ (1 - cos θ) / f_α(θ) dθ`, for `0 < α < 1/2`.
pub fn strong_dependence_rate(alpha: f64, grid: usize, trunc: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "(0, 1/2)",
        });
    }
    let f = SpectralDensity::f_alpha(alpha, trunc)?;
    cluster_rate(&f, &TrigPolynomial::first_difference(), grid)
}

fn cosine_series(a: &[f64], theta: f64) -> f64 {
    a.iter()
        .enumerate()
        .map(|(k, &ak)| {
            if k == 0 {
                ak
            } else {
                2.0 * ak * (k as f64 * theta).cos()
            }
        })
        .sum()
}
