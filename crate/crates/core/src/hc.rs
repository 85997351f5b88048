//! P-values, Higher Criticism, Innovated Higher Criticism, thresholds and
//! the detection boundary.

use std::fmt;

use statrs::function::erf::erfc;

use crate::corr::{innovation_transform, CorrelationMatrix, InnovationTransform};
use crate::error::{Error, Result};

/// Beyond this `|y|` the two-sided p-value underflows; it is clamped to the
/// smallest positive normal `f64` instead.
pub const P_VALUE_CLAMP: f64 = 38.0;

/// `p = P{|N(0,1)| ≥ |y|} = erfc(|y|/√2)`.
pub fn p_value(y: f64) -> f64 {
    let a = y.abs();
    if a > P_VALUE_CLAMP {
        return f64::MIN_POSITIVE;
    }
    erfc(a / std::f64::consts::SQRT_2).clamp(f64::MIN_POSITIVE, 1.0)
}

pub fn p_values(y: &[f64]) -> Vec<f64> {
    y.iter().map(|&v| p_value(v)).collect()
}

/// Objective of the maximization at the `j`-th smallest of `n` p-values
/// (`j` is 1-based): `√n (j/n − p) / √(p(1 − p))`.
pub fn hc_objective(j: usize, n: usize, p: f64) -> f64 {
    let nf = n as f64;
    nf.sqrt() * (j as f64 / nf - p) / (p * (1.0 - p)).sqrt()
}

/// Maximum of [`hc_objective`] over sorted p-values in `[1/n, 1/2]`.
pub fn hc_statistic(p: &[f64]) -> Result<f64> {
    let n = p.len();
    if n < 2 {
        return Err(Error::NTooSmall {
            n: n as f64,
            requirement: "HC needs at least 2 p-values",
        });
    }
    if let Some(&bad) = p.iter().find(|&&v| !(v > 0.0 && v <= 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "p-value {bad} outside (0, 1]"
        )));
    }
    let mut sorted = p.to_vec();
    sorted.sort_by(f64::total_cmp);
    hc_sorted(&sorted)
}

fn hc_sorted(sorted: &[f64]) -> Result<f64> {
    let n = sorted.len();
    let lo = 1.0 / n as f64;
    let start = sorted.partition_point(|&v| v < lo);
    sorted[start..]
        .iter()
        .take_while(|&&v| v <= 0.5)
        .enumerate()
        .map(|(i, &v)| hc_objective(start + i + 1, n, v))
        .reduce(f64::max)
        .ok_or(Error::EmptyMaximizationRange)
}

/// `HC(p(V·x)) / √(2b − 1)` with `V` built from `sigma` and bandwidth `b`.
pub fn ihc_statistic(x: &[f64], sigma: &CorrelationMatrix, b: usize) -> Result<f64> {
    let t = innovation_transform(sigma, b)?;
    ihc_statistic_with(&t, x)
}

/// [`ihc_statistic`] with a prebuilt transform.
pub fn ihc_statistic_with(t: &InnovationTransform, x: &[f64]) -> Result<f64> {
    let vx = t.apply(x)?;
    ihc_from_transformed(&vx, t.bandwidth())
}

/// iHC from already-transformed data `V·x`.
pub fn ihc_from_transformed(vx: &[f64], b: usize) -> Result<f64> {
    Ok(hc_statistic(&p_values(vx))? / ((2 * b - 1) as f64).sqrt())
}

/// `(1 + a)·√(2 ln ln n)`. Takes a real `n > e` so the threshold can be
/// evaluated at non-integer sample sizes.
pub fn hc_threshold(n: f64, a: f64) -> Result<f64> {
    if !(n > std::f64::consts::E) {
        return Err(Error::NTooSmall {
            n,
            requirement: "ln ln n > 0 needs n > e",
        });
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("a = {a} must be positive")));
    }
    Ok((1.0 + a) * (2.0 * n.ln().ln()).sqrt())
}

/// `(ln n)²`. Conservative at moderate `n`; empirical null percentiles are
/// usually much smaller.
pub fn ihc_threshold(n: f64) -> Result<f64> {
    if !(n >= 2.0) {
        return Err(Error::NTooSmall {
            n,
            requirement: "n >= 2",
        });
    }
    Ok(n.ln().powi(2))
}

/// Detection boundary `ρ*(β)` for `β ∈ (1/2, 1)`.
pub fn rho_star(beta: f64) -> Result<f64> {
    if !(beta > 0.5 && beta < 1.0) {
        return Err(Error::BetaOutOfRange { beta });
    }
    Ok(if beta <= 0.75 {
        beta - 0.5
    } else {
        (1.0 - (1.0 - beta).sqrt()).powi(2)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Undetectable,
    Detectable,
    Indeterminate,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Undetectable => "undetectable",
            Verdict::Detectable => "detectable",
            Verdict::Indeterminate => "indeterminate",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryVerdict {
    pub beta: f64,
    pub r: f64,
    pub gamma_lo: f64,
    pub gamma_hi: f64,
    pub verdict: Verdict,
}

/// Undetectable below `ρ*(β)/γ_hi`, detectable above `ρ*(β)/γ_lo`.
pub fn classify_boundary(
    beta: f64,
    r: f64,
    gamma_lo: f64,
    gamma_hi: f64,
) -> Result<BoundaryVerdict> {
    if !(gamma_lo > 0.0 && gamma_lo <= gamma_hi) {
        return Err(Error::InvalidGammaOrder {
            lo: gamma_lo,
            hi: gamma_hi,
        });
    }
    let rho = rho_star(beta)?;
    let verdict = if r < rho / gamma_hi {
        Verdict::Undetectable
    } else if r > rho / gamma_lo {
        Verdict::Detectable
    } else {
        Verdict::Indeterminate
    };
    Ok(BoundaryVerdict {
        beta,
        r,
        gamma_lo,
        gamma_hi,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Statistic {
    Hc,
    Ihc { bandwidth: usize },
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::Hc => f.write_str("HC"),
            Statistic::Ihc { bandwidth } => write!(f, "iHC(b={bandwidth})"),
        }
    }
}

/// `statistic` is `-inf` when no p-value fell in the maximization range;
/// `empty_range` records that case explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionResult {
    pub statistic: f64,
    pub threshold: f64,
    pub reject: bool,
    pub method: Statistic,
    pub empty_range: bool,
}

impl DetectionResult {
    fn from_outcome(outcome: Result<f64>, threshold: f64, method: Statistic) -> Result<Self> {
        let (statistic, empty_range) = match outcome {
            Ok(s) => (s, false),
            Err(Error::EmptyMaximizationRange) => (f64::NEG_INFINITY, true),
            Err(e) => return Err(e),
        };
        Ok(Self {
            statistic,
            threshold,
            reject: statistic >= threshold,
            method,
            empty_range,
        })
    }
}

/// Standard HC on `x` against `(1 + a)√(2 ln ln n)`.
pub fn detect_hc(x: &[f64], a: f64) -> Result<DetectionResult> {
    let threshold = hc_threshold(x.len() as f64, a)?;
    DetectionResult::from_outcome(hc_statistic(&p_values(x)), threshold, Statistic::Hc)
}

/// iHC on `x` against `threshold`, or `(ln n)²` when none is given.
pub fn detect_ihc(
    x: &[f64],
    t: &InnovationTransform,
    threshold: Option<f64>,
) -> Result<DetectionResult> {
    let threshold = match threshold {
        Some(t) => t,
        None => ihc_threshold(x.len() as f64)?,
    };
    DetectionResult::from_outcome(
        ihc_statistic_with(t, x),
        threshold,
        Statistic::Ihc {
            bandwidth: t.bandwidth(),
        },
    )
}

/// `⌈ln n⌉`, the default bandwidth.
pub fn default_bandwidth(n: usize) -> usize {
    ((n as f64).ln().ceil() as usize).clamp(1, n.max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_value_anchors() {
        assert_eq!(p_value(0.0), 1.0);
        assert!((p_value(1.959964) - 0.05).abs() < 1e-6);
        assert_eq!(p_value(-1.3), p_value(1.3));
        assert_eq!(p_value(40.0), f64::MIN_POSITIVE);
        assert!(p_value(37.0) > 0.0);
    }

    #[test]
    fn two_point_objective_and_range() {
        assert!((hc_objective(1, 2, 0.25) - 0.816_496_580_927_726).abs() < 1e-12);
        // 0.25 < 1/n and 0.75 > 1/2: nothing to maximize over.
        assert_eq!(
            hc_statistic(&[0.25, 0.75]),
            Err(Error::EmptyMaximizationRange)
        );
        assert_eq!(
            hc_statistic(&[0.6, 0.9, 0.7]),
            Err(Error::EmptyMaximizationRange)
        );
        let expected = hc_objective(1, 2, 0.5);
        assert_eq!(hc_statistic(&[0.5, 0.75]).unwrap(), expected);
    }

    #[test]
    fn thresholds() {
        let ee = std::f64::consts::E.exp();
        assert!((hc_threshold(ee, 0.5).unwrap() - 1.5 * 2f64.sqrt()).abs() < 1e-12);
        assert!((hc_threshold(1e6, 0.5).unwrap() - 3.44).abs() < 0.005);
        assert!(hc_threshold(2.0, 0.5).is_err());
        assert!((ihc_threshold(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert!((ihc_threshold(1000.0).unwrap() - 47.717).abs() < 1e-3);
        assert_eq!(default_bandwidth(1000), 7);
        assert_eq!(default_bandwidth(100), 5);
    }

    #[test]
    fn rho_star_branches() {
        assert!((rho_star(0.75).unwrap() - 0.25).abs() < 1e-15);
        assert!((rho_star(0.55).unwrap() - 0.05).abs() < 1e-12);
        assert!((rho_star(0.84).unwrap() - 0.36).abs() < 1e-12);
        assert!(rho_star(0.5).is_err());
        assert!(rho_star(1.0).is_err());
    }

    #[test]
    fn boundary_examples() {
        let v = |r, g| classify_boundary(0.75, r, g, g).unwrap().verdict;
        assert_eq!(v(0.3, 1.0), Verdict::Detectable);
        assert_eq!(v(0.2, 1.0), Verdict::Undetectable);
        assert_eq!(v(0.2, 1.0 / 0.6), Verdict::Detectable);
        assert_eq!(
            classify_boundary(0.75, 0.155, 1.5, 1.7).unwrap().verdict,
            Verdict::Indeterminate
        );
        assert!(classify_boundary(0.75, 0.2, 2.0, 1.0).is_err());
    }

    #[test]
    fn zero_data_does_not_reject() {
        let r = detect_hc(&[0.0; 20], 0.5).unwrap();
        assert!(r.empty_range);
        assert!(!r.reject);
        assert_eq!(r.statistic, f64::NEG_INFINITY);
    }
}
