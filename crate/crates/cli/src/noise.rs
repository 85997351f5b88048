//! The `density` key and its parameters, shared by every subcommand.

use ihc_core::corr::{
    strong_dependence_matrix, toeplitz_from_coeffs, toeplitz_from_density, CorrelationMatrix,
};
use ihc_core::simlab::NoiseModel;
use ihc_core::spectral::{SpectralDensity, DEFAULT_F_ALPHA_TRUNC};

use crate::config::{Result, Section};

const KINDS: &str = "identity, tridiagonal, five_diagonal, coefficients, f_alpha or strong";

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseSpec {
    Identity,
    /// Autocorrelations `(1, ρ)`.
    Tridiagonal(f64),
    /// Autocorrelations `(1, 0.25, ρ)`.
    FiveDiagonal(f64),
    Coefficients(Vec<f64>),
    FAlpha {
        alpha: f64,
        trunc: usize,
    },
    Strong {
        alpha: f64,
        alpha0: f64,
    },
}

fn join(values: impl IntoIterator<Item = f64>) -> String {
    values
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl NoiseSpec {
    /// Reads `density` and its parameters. `rho` (and `alpha` for the strong
    /// family) may list several values, giving one spec per value. Returns
    /// `None` when `density` is absent.
    pub fn read_all(s: &mut Section) -> Result<Option<Vec<NoiseSpec>>> {
        let Some(kind) = s.str("density") else {
            return Ok(None);
        };
        let listed = |s: &mut Section, key: &str| -> Result<Vec<f64>> {
            let values = s.f64_list(key)?;
            s.require(key, values)
        };
        let specs = match kind.as_str() {
            "identity" => vec![NoiseSpec::Identity],
            "tridiagonal" => listed(s, "rho")?
                .into_iter()
                .map(NoiseSpec::Tridiagonal)
                .collect(),
            "five_diagonal" => listed(s, "rho")?
                .into_iter()
                .map(NoiseSpec::FiveDiagonal)
                .collect(),
            "coefficients" => vec![NoiseSpec::Coefficients(listed(s, "coefficients")?)],
            "f_alpha" => {
                let trunc = s.usize("trunc")?.unwrap_or(DEFAULT_F_ALPHA_TRUNC);
                listed(s, "alpha")?
                    .into_iter()
                    .map(|alpha| NoiseSpec::FAlpha { alpha, trunc })
                    .collect()
            }
            "strong" => {
                let alpha0 = s.f64("alpha0")?;
                let alpha0 = s.require("alpha0", alpha0)?;
                listed(s, "alpha")?
                    .into_iter()
                    .map(|alpha| NoiseSpec::Strong { alpha, alpha0 })
                    .collect()
            }
            other => {
                return Err(s.error(
                    "density",
                    format!("unknown density `{other}` (expected {KINDS})"),
                ))
            }
        };
        Ok(Some(specs))
    }

    /// Like [`NoiseSpec::read_all`] but insists on a single value.
    pub fn read(s: &mut Section) -> Result<Option<NoiseSpec>> {
        match Self::read_all(s)? {
            None => Ok(None),
            Some(mut specs) if specs.len() == 1 => Ok(specs.pop()),
            Some(_) => {
                let key = if s.has("rho") { "rho" } else { "alpha" };
                Err(s.error(key, "expects a single value here"))
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            NoiseSpec::Identity => "identity",
            NoiseSpec::Tridiagonal(_) => "tridiagonal",
            NoiseSpec::FiveDiagonal(_) => "five_diagonal",
            NoiseSpec::Coefficients(_) => "coefficients",
            NoiseSpec::FAlpha { .. } => "f_alpha",
            NoiseSpec::Strong { .. } => "strong",
        }
    }

    /// Config keys reproducing `specs`, which must share one kind.
    pub fn resolved(specs: &[NoiseSpec]) -> Vec<(String, String)> {
        let Some(first) = specs.first() else {
            return Vec::new();
        };
        let mut out = vec![("density".to_string(), first.kind().to_string())];
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        match first {
            NoiseSpec::Identity => {}
            NoiseSpec::Tridiagonal(_) | NoiseSpec::FiveDiagonal(_) => {
                push("rho", join(specs.iter().map(NoiseSpec::param)))
            }
            NoiseSpec::Coefficients(c) => push("coefficients", join(c.iter().copied())),
            NoiseSpec::FAlpha { trunc, .. } => {
                push("alpha", join(specs.iter().map(NoiseSpec::param)));
                push("trunc", trunc.to_string());
            }
            NoiseSpec::Strong { alpha0, .. } => {
                push("alpha", join(specs.iter().map(NoiseSpec::param)));
                push("alpha0", alpha0.to_string());
            }
        }
        out
    }

    /// The value reported in the `rho_or_alpha` column.
    pub fn param(&self) -> f64 {
        match self {
            NoiseSpec::Identity => 0.0,
            NoiseSpec::Tridiagonal(rho) | NoiseSpec::FiveDiagonal(rho) => *rho,
            NoiseSpec::Coefficients(c) => c.get(1).copied().unwrap_or(0.0),
            NoiseSpec::FAlpha { alpha, .. } | NoiseSpec::Strong { alpha, .. } => *alpha,
        }
    }

    fn coefficients(&self) -> Option<Vec<f64>> {
        match self {
            NoiseSpec::Identity => Some(vec![1.0]),
            NoiseSpec::Tridiagonal(rho) => Some(vec![1.0, *rho]),
            NoiseSpec::FiveDiagonal(rho) => Some(vec![1.0, 0.25, *rho]),
            NoiseSpec::Coefficients(c) => Some(c.clone()),
            _ => None,
        }
    }

    pub fn matrix(&self, n: usize, grid: usize) -> ihc_core::Result<CorrelationMatrix> {
        match self {
            NoiseSpec::Identity => Ok(CorrelationMatrix::identity(n)),
            NoiseSpec::FAlpha { alpha, trunc } => {
                toeplitz_from_density(&SpectralDensity::f_alpha(*alpha, *trunc)?, n, grid)
            }
            NoiseSpec::Strong { alpha, alpha0 } => strong_dependence_matrix(n, *alpha, *alpha0),
            _ => toeplitz_from_coeffs(&self.coefficients().expect("Toeplitz family"), n),
        }
    }

    /// The generating spectral density, when the family has one.
    pub fn density(&self) -> Option<ihc_core::Result<SpectralDensity>> {
        match self {
            NoiseSpec::Strong { .. } => None,
            NoiseSpec::FAlpha { alpha, trunc } => Some(SpectralDensity::f_alpha(*alpha, *trunc)),
            _ => Some(SpectralDensity::from_autocorrelations(
                self.coefficients().expect("Toeplitz family"),
            )),
        }
    }

    pub fn noise_model(&self) -> Option<NoiseModel> {
        match self {
            NoiseSpec::Strong { alpha, alpha0 } => Some(NoiseModel::Strong {
                alpha: *alpha,
                alpha0: *alpha0,
            }),
            _ => self.coefficients().map(NoiseModel::Toeplitz),
        }
    }
}
