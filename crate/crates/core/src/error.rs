use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite: smallest eigenvalue {min_eigenvalue:.6e} <= tolerance {tolerance:.3e}")]
    NotPositiveDefinite { min_eigenvalue: f64, tolerance: f64 },

    #[error("diagonal entry {index} is {value}, expected 1")]
    BadDiagonal { index: usize, value: f64 },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("Cholesky pivot {pivot:.6e} at index {index} fell below tolerance {tolerance:.3e}")]
    FactorizationFailure {
        index: usize,
        pivot: f64,
        tolerance: f64,
    },

    #[error("bandwidth {b} out of range 1..={n}")]
    BandwidthOutOfRange { b: usize, n: usize },

    #[error("power iteration did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("index window sqrt(n)..n-sqrt(n) is empty for n = {n} (need n >= 9)")]
    WindowEmpty { n: usize },

    #[error("Fourier coefficient {k} of a symmetric density has imaginary residue {residue:.3e}")]
    NonSymmetricImaginaryResidue { k: usize, residue: f64 },

    #[error("spectral density is not positive on the grid: f({theta:.6}) = {value:.6e}")]
    NonPositiveDensity { theta: f64, value: f64 },

    #[error("alpha = {alpha} is outside the admissible range {range}")]
    AlphaOutOfRange { alpha: f64, range: &'static str },

    #[error("quadrature grid {grid} must be a power of two >= 256")]
    InvalidGrid { grid: usize },

    #[error("cannot draw m = {m} locations from n = {n}")]
    MTooLarge { m: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("no sorted p-value satisfies 1/n <= p <= 1/2")]
    EmptyMaximizationRange,

    #[error("n = {n} is too small: {requirement}")]
    NTooSmall { n: f64, requirement: &'static str },

    #[error("beta = {beta} is outside (1/2, 1)")]
    BetaOutOfRange { beta: f64 },

    #[error("gamma_lo = {lo} must satisfy 0 < gamma_lo <= gamma_hi = {hi}")]
    InvalidGammaOrder { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("replicate {index}: {source}")]
    Replicate { index: usize, source: Box<Error> },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
