mod common;

use common::simpson_mean;
use ihc_core::corr::{cholesky_inverse, inverse_diagonal, toeplitz_from_coeffs};
use ihc_core::spectral::*;
use ihc_core::Error;
use proptest::prelude::*;

fn tri(rho: f64) -> SpectralDensity {
    SpectralDensity::tridiagonal(rho)
}

#[test]
fn fourier_coefficients_of_presets() {
    let one = SpectralDensity::custom(|_| 1.0, true);
    assert!((fourier_coeff(&one, 0, 256).unwrap() - 1.0).abs() < 1e-14);
    for k in 1..5 {
        assert!(fourier_coeff(&one, k, 256).unwrap().abs() < 1e-14);
    }
    let f = SpectralDensity::custom(|t| 1.0 + 0.8 * t.cos(), true);
    assert!((fourier_coeff(&f, 1, 1024).unwrap() - 0.4).abs() < 1e-12);
    assert!(fourier_coeff(&f, 2, 1024).unwrap().abs() < 1e-12);
    let b = SpectralDensity::custom(|t| 1.0 + 0.5 * t.cos() + 0.6 * (2.0 * t).cos(), true);
    assert!((fourier_coeff(&b, 1, 1024).unwrap() - 0.25).abs() < 1e-12);
    assert!((fourier_coeff(&b, 2, 1024).unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn asymmetric_evaluator_flagged_symmetric_is_caught() {
    let f = SpectralDensity::custom(|t| 1.0 + 0.3 * t.sin(), true);
    assert!(matches!(
        fourier_coeff(&f, 1, 256),
        Err(Error::NonSymmetricImaginaryResidue { k: 1, .. })
    ));
    let g = SpectralDensity::custom(|t| 1.0 + 0.3 * t.sin(), false);
    assert!(fourier_coeff(&g, 1, 256).is_ok());
}

#[test]
fn wiener_rate_closed_form_and_oracle() {
    assert!((wiener_rate(&SpectralDensity::white_noise(), 256).unwrap() - 1.0).abs() < 1e-15);
    for rho in [-0.45, -0.25, 0.05, 0.25, 0.45] {
        let got = wiener_rate(&tri(rho), DEFAULT_GRID).unwrap();
        let closed = 1.0 / (1.0 - 4.0 * rho * rho).sqrt();
        let oracle = simpson_mean(|t| 1.0 / (1.0 + 2.0 * rho * t.cos()), 2 * DEFAULT_GRID);
        assert!((got - closed).abs() <= 1e-6, "rho {rho}");
        assert!((got - oracle).abs() <= 1e-6, "rho {rho}");
    }
    assert!((wiener_rate(&tri(-0.45), DEFAULT_GRID).unwrap() - 2.294).abs() < 1e-3);
}

#[test]
fn wiener_rate_rejects_nonpositive_density() {
    assert!(matches!(
        wiener_rate(&tri(0.6), 256),
        Err(Error::NonPositiveDensity { .. })
    ));
    assert!(matches!(
        wiener_rate(&tri(0.2), 100),
        Err(Error::InvalidGrid { grid: 100 })
    ));
}

#[test]
fn cluster_rate_examples() {
    let f = tri(0.4);
    let unit = cluster_rate(&f, &TrigPolynomial::one(), DEFAULT_GRID).unwrap();
    assert_eq!(unit, wiener_rate(&f, DEFAULT_GRID).unwrap());
    let g0 = TrigPolynomial::first_difference();
    let white = cluster_rate(&SpectralDensity::white_noise(), &g0, 256).unwrap();
    assert!((white - 2.0).abs() < 1e-13);
    let got = cluster_rate(&f, &g0, DEFAULT_GRID).unwrap();
    let oracle = simpson_mean(
        |t| (2.0 - 2.0 * t.cos()) / (1.0 + 0.8 * t.cos()),
        4 * DEFAULT_GRID,
    );
    assert!((got - oracle).abs() < 1e-6);
}

#[test]
fn f_alpha_domain_and_origin_value() {
    assert!(matches!(
        f_alpha(0.0, 1.0, 1000),
        Err(Error::AlphaOutOfRange { .. })
    ));
    assert!(f_alpha(0.0, 0.0, 1000).is_err());
    assert!(f_alpha(0.0, 0.3, 10).is_err());
    // At θ = 0 the partial sums telescope to 2 − ((K+1)^α − K^α).
    for alpha in [0.1, 0.25, 0.45] {
        let k = 100_000usize;
        let got = f_alpha(0.0, alpha, k).unwrap();
        let kf = k as f64;
        let telescoped = 2.0 - ((kf + 1.0).powf(alpha) - kf.powf(alpha));
        assert!((got - telescoped).abs() < 1e-9, "alpha {alpha}");
        let deep = 10_000_000f64;
        let limit = 2.0 - ((deep + 1.0).powf(alpha) - deep.powf(alpha));
        assert!((got - limit).abs() <= f_alpha_tail_bound(alpha, k));
    }
}

#[test]
fn f_alpha_grid_matches_direct_sum() {
    let f = SpectralDensity::f_alpha(0.3, 5_000).unwrap();
    let folded = f.sample(256).unwrap();
    let nodes = grid_nodes(256).unwrap();
    for (j, &t) in nodes.iter().enumerate().step_by(17) {
        let direct = f_alpha(t, 0.3, 5_000).unwrap();
        assert!((folded[j] - direct).abs() < 1e-10, "node {j}");
    }
}

#[test]
fn f_alpha_is_positive_on_grid() {
    for alpha in [0.1, 0.25, 0.3, 0.45] {
        let f = SpectralDensity::f_alpha(alpha, DEFAULT_F_ALPHA_TRUNC).unwrap();
        let min = f.grid_minimum(4096).unwrap();
        assert!(min > 0.0, "alpha {alpha}: {min}");
    }
}

#[test]
fn strong_rate_consistency_and_refinement() {
    let a = strong_dependence_rate(0.25, DEFAULT_GRID, 100_000).unwrap();
    let f = SpectralDensity::f_alpha(0.25, 100_000).unwrap();
    let c = cluster_rate(&f, &TrigPolynomial::first_difference(), DEFAULT_GRID).unwrap();
    assert!((a - c).abs() < 1e-6);
    let b = strong_dependence_rate(0.25, DEFAULT_GRID, 200_000).unwrap();
    assert!(a.is_finite() && a > 0.0);
    assert!((a - b).abs() < 1e-4);
    assert!(strong_dependence_rate(0.5, DEFAULT_GRID, 100_000).is_err());
}

#[test]
fn strong_rate_curve_is_monotone() {
    let rates: Vec<f64> = (1..=9)
        .map(|i| strong_dependence_rate(0.05 * i as f64, 1024, 20_000).unwrap())
        .collect();
    let increasing = rates.windows(2).all(|w| w[1] > w[0]);
    let decreasing = rates.windows(2).all(|w| w[1] < w[0]);
    assert!(increasing || decreasing, "{rates:?}");
}

#[test]
fn toeplitz_inverse_diagonal_tracks_rate() {
    let f = SpectralDensity::five_diagonal(0.35);
    let a: Vec<f64> = (0..3)
        .map(|k| fourier_coeff(&f, k, DEFAULT_GRID).unwrap())
        .collect();
    let mut a = a;
    a[0] = 1.0;
    let sigma = toeplitz_from_coeffs(&a, 300).unwrap();
    let diag = inverse_diagonal(&cholesky_inverse(&sigma).unwrap());
    let rate = wiener_rate(&f, DEFAULT_GRID).unwrap();
    for d in &diag[common::interior(300)] {
        assert!((d / rate - 1.0).abs() < 0.02);
    }
}

proptest! {
    #[test]
    fn wiener_rate_at_least_one(a1 in -0.3f64..0.3, a2 in -0.15f64..0.15) {
        let f = SpectralDensity::from_autocorrelations(vec![1.0, a1, a2]).unwrap();
        prop_assert!((fourier_coeff(&f, 0, 512).unwrap() - 1.0).abs() < 1e-13);
        let c = wiener_rate(&f, 1024).unwrap();
        prop_assert!(c >= 1.0 - 1e-9);
        if a1.abs() + a2.abs() > 1e-3 {
            prop_assert!(c - 1.0 > 1e-9);
        }
        let c2 = wiener_rate(&f, 2048).unwrap();
        prop_assert!((c - c2).abs() < 1e-8);
        let g = TrigPolynomial::new(vec![1.0, a2, -a1]).unwrap();
        let r1 = cluster_rate(&f, &g, 1024).unwrap();
        let r2 = cluster_rate(&f, &g, 2048).unwrap();
        prop_assert!((r1 - r2).abs() < 1e-8);
    }
}
