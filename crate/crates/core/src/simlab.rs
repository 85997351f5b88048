//! Seeded Monte Carlo harness: paired null/alternative replicates, minimum
//! total error, empirical thresholds and power.
//!
//! Replicate `i` of a run with base seed `s` draws its noise `Z` from
//! substream `2i` of `s` and its signal locations from substream `2i + 1`.
//! Every method and both hypotheses score the same draw (`Z` under the
//! null, `μ + Z` under the alternative), so method comparisons are paired
//! and reports do not depend on which methods were requested.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use crate::corr::{
    cholesky_inverse, strong_dependence_matrix, strong_surrogate, strong_transform,
    toeplitz_from_coeffs, CholeskyFactors, CorrelationMatrix, InnovationTransform,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hc::{default_bandwidth, hc_statistic, ihc_from_transformed, p_values};
use crate::signal::{
    build_signal, noise_stream, sample_noise, signal_stream, substream, Hypothesis, SignalConfig,
    SignalVariant,
};

pub const DEFAULT_REPLICATES: usize = 500;
pub const DEFAULT_SEED: u64 = 20_100_501;
pub const DEFAULT_Q: f64 = 0.10;
/// Significant digits in report output unless overridden.
pub const DEFAULT_PRECISION: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Standard HC on the raw data.
    Hc,
    /// iHC with `b = 1`.
    HcA,
    /// iHC with `b = ⌈ln n⌉`.
    HcB,
    /// iHC with `b = ⌈ln n⌉` on the differenced, rescaled data under the
    /// stationary surrogate covariance. Strong-dependence cells only.
    HcBTransformed,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Hc, Method::HcA, Method::HcB, Method::HcBTransformed];
    pub const STANDARD: [Method; 3] = [Method::Hc, Method::HcA, Method::HcB];

    pub fn label(self) -> &'static str {
        match self {
            Method::Hc => "HC",
            Method::HcA => "HC-a",
            Method::HcB => "HC-b",
            Method::HcBTransformed => "HC-b-transformed",
        }
    }

    /// Bandwidth used at dimension `n`; `None` for standard HC.
    pub fn bandwidth(self, n: usize) -> Option<usize> {
        match self {
            Method::Hc => None,
            Method::HcA => Some(1),
            Method::HcB | Method::HcBTransformed => Some(default_bandwidth(n)),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown method `{s}` (expected HC, HC-a, HC-b or HC-b-transformed)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    A,
    B,
    C,
    Custom,
}

impl Preset {
    pub fn label(self) -> &'static str {
        match self {
            Preset::A => "a",
            Preset::B => "b",
            Preset::C => "c",
            Preset::Custom => "custom",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" => Ok(Preset::A),
            "b" => Ok(Preset::B),
            "c" => Ok(Preset::C),
            "custom" => Ok(Preset::Custom),
            other => Err(Error::InvalidParameter(format!(
                "unknown preset `{other}` (expected a, b, c or custom)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NoiseModel {
    /// Toeplitz matrix with the given autocorrelations (`a[0] = 1`).
    Toeplitz(Vec<f64>),
    /// `max{0, 1 − |j−k|^α n^{−α₀}}`.
    Strong { alpha: f64, alpha0: f64 },
}

impl NoiseModel {
    pub fn tridiagonal(rho: f64) -> Self {
        NoiseModel::Toeplitz(vec![1.0, rho])
    }

    /// `f(θ) = 1 + ½cos θ + 2ρ cos 2θ`.
    pub fn five_diagonal(rho: f64) -> Self {
        NoiseModel::Toeplitz(vec![1.0, 0.25, rho])
    }

    pub fn matrix(&self, n: usize) -> Result<CorrelationMatrix> {
        match self {
            NoiseModel::Toeplitz(a) => toeplitz_from_coeffs(a, n),
            NoiseModel::Strong { alpha, alpha0 } => strong_dependence_matrix(n, *alpha, *alpha0),
        }
    }
}

/// One parameter point of a sweep. `param` is the value reported in the
/// `rho_or_alpha` column.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub n: usize,
    pub beta: f64,
    pub r: f64,
    pub param: f64,
    pub noise: NoiseModel,
    pub variant: SignalVariant,
}

impl Cell {
    pub fn toeplitz(n: usize, beta: f64, r: f64, rho: f64, noise: NoiseModel) -> Self {
        Self {
            n,
            beta,
            r,
            param: rho,
            noise,
            variant: SignalVariant::Singleton,
        }
    }

    /// Strong-dependence cell with the matching signal calibration.
    pub fn strong(n: usize, beta: f64, r: f64, alpha: f64, alpha0: f64) -> Self {
        Self {
            n,
            beta,
            r,
            param: alpha,
            noise: NoiseModel::Strong { alpha, alpha0 },
            variant: SignalVariant::Strong { alpha, alpha0 },
        }
    }

    pub fn signal_config(&self) -> Result<SignalConfig> {
        SignalConfig::new(self.n, self.beta, self.r, self.variant.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Preset,
    pub cells: Vec<Cell>,
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub base_seed: u64,
    /// Upper tail fraction for the empirical threshold.
    pub q: f64,
}

const PRESET_PAIRS: [(f64, f64); 4] = [(0.5, 0.2), (0.5, 0.25), (0.55, 0.2), (0.55, 0.25)];

/// `lo, lo + 0.05, …, hi` in hundredths, so grid points are exact decimals.
fn rho_grid(lo_hundredths: i32, hi_hundredths: i32) -> Vec<f64> {
    (lo_hundredths..=hi_hundredths)
        .step_by(5)
        .map(|h| h as f64 / 100.0)
        .collect()
}

impl ExperimentConfig {
    pub fn custom(cells: Vec<Cell>, methods: Vec<Method>) -> Self {
        Self {
            preset: Preset::Custom,
            cells,
            methods,
            replicates: DEFAULT_REPLICATES,
            base_seed: DEFAULT_SEED,
            q: DEFAULT_Q,
        }
    }

    /// `n = 1000`, tri-diagonal `ρ ∈ {−0.45, …, 0.45}`, four `(β, r)` pairs.
    pub fn preset_a() -> Self {
        let cells = PRESET_PAIRS
            .iter()
            .flat_map(|&(beta, r)| {
                rho_grid(-45, 45).into_iter().map(move |rho| {
                    Cell::toeplitz(1000, beta, r, rho, NoiseModel::tridiagonal(rho))
                })
            })
            .collect();
        Self {
            preset: Preset::A,
            ..Self::custom(cells, Method::STANDARD.to_vec())
        }
    }

    /// `n = 1000`, autocorrelations `(1, 0.25, ρ)`, `ρ ∈ {−0.20, …, 0.45}`.
    pub fn preset_b() -> Self {
        let cells = PRESET_PAIRS
            .iter()
            .flat_map(|&(beta, r)| {
                rho_grid(-20, 45).into_iter().map(move |rho| {
                    Cell::toeplitz(1000, beta, r, rho, NoiseModel::five_diagonal(rho))
                })
            })
            .collect();
        Self {
            preset: Preset::B,
            ..Self::custom(cells, Method::STANDARD.to_vec())
        }
    }

    /// `n ∈ {500, …, 2500}`, `(β, r) = (0.5, 0.25)`, tri-diagonal `ρ = 0.4`.
    pub fn preset_c() -> Self {
        let cells = (1..=5)
            .map(|k| Cell::toeplitz(500 * k, 0.5, 0.25, 0.4, NoiseModel::tridiagonal(0.4)))
            .collect();
        Self {
            preset: Preset::C,
            ..Self::custom(cells, Method::STANDARD.to_vec())
        }
    }

    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::A => Self::preset_a(),
            Preset::B => Self::preset_b(),
            Preset::C => Self::preset_c(),
            Preset::Custom => Self::custom(Vec::new(), Method::STANDARD.to_vec()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InvalidParameter(format!(
                "replicates = {} must be at least 2",
                self.replicates
            )));
        }
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "q = {} outside (0, 1)",
                self.q
            )));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("no methods selected".into()));
        }
        if self.cells.is_empty() {
            return Err(Error::InvalidParameter("no cells to run".into()));
        }
        Ok(())
    }
}

/// Scores of one method under one hypothesis, in replicate order.
/// `seeds[i]` is the noise substream of replicate `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSample {
    pub method: Method,
    pub hypothesis: Hypothesis,
    pub scores: Vec<f64>,
    pub seeds: Vec<u64>,
}

enum Scorer {
    Raw,
    Innovated(InnovationTransform),
    Transformed {
        alpha0: f64,
        transform: InnovationTransform,
    },
}

/// Everything a cell's replicates share: the noise factor, the signal
/// configuration and one scorer per requested method.
pub struct PreparedCell {
    factors: Arc<CholeskyFactors>,
    signal: SignalConfig,
    scorers: Vec<(Method, Result<Scorer>)>,
}

impl PreparedCell {
    /// Fails only when the noise matrix or signal configuration is invalid;
    /// a method that cannot be set up records its own error.
    pub fn new(cell: &Cell, methods: &[Method]) -> Result<Self> {
        let signal = cell.signal_config()?;
        let sigma = cell.noise.matrix(cell.n)?;
        let factors = Arc::new(cholesky_inverse(&sigma)?);
        let scorers = methods
            .iter()
            .map(|&m| (m, Self::scorer(cell, m, &factors)))
            .collect();
        Ok(Self {
            factors,
            signal,
            scorers,
        })
    }

    fn scorer(cell: &Cell, method: Method, factors: &Arc<CholeskyFactors>) -> Result<Scorer> {
        let n = cell.n;
        match method {
            Method::Hc => Ok(Scorer::Raw),
            Method::HcA | Method::HcB => Ok(Scorer::Innovated(InnovationTransform::new(
                factors.clone(),
                method.bandwidth(n).expect("iHC method"),
            )?)),
            Method::HcBTransformed => match cell.noise {
                NoiseModel::Strong { alpha, alpha0 } => {
                    let surrogate = strong_surrogate(n, alpha)?;
                    let f = Arc::new(cholesky_inverse(&surrogate)?);
                    Ok(Scorer::Transformed {
                        alpha0,
                        transform: InnovationTransform::new(f, default_bandwidth(n))?,
                    })
                }
                NoiseModel::Toeplitz(_) => Err(Error::InvalidParameter(
                    "HC-b-transformed needs a strong-dependence noise model".into(),
                )),
            },
        }
    }

    pub fn methods(&self) -> impl Iterator<Item = Method> + '_ {
        self.scorers.iter().map(|(m, _)| *m)
    }

    /// `[null, alternative]` scores of replicate `i` for every method that
    /// was set up, in method order.
    fn replicate(&self, base_seed: u64, i: usize) -> Result<Vec<[f64; 2]>> {
        let z = sample_noise(
            &self.factors.lower,
            &mut substream(base_seed, noise_stream(i)),
        );
        let mu = build_signal(&self.signal, &mut substream(base_seed, signal_stream(i)))?.mu;
        let x: Vec<f64> = z.iter().zip(&mu).map(|(z, m)| z + m).collect();
        let wrap = |e: Error| Error::Replicate {
            index: i,
            source: Box::new(e),
        };
        let whitened = if self
            .scorers
            .iter()
            .any(|(_, s)| matches!(s, Ok(Scorer::Innovated(_))))
        {
            [
                self.factors.inverse.apply(&z).map_err(wrap)?,
                self.factors.inverse.apply(&x).map_err(wrap)?,
            ]
        } else {
            [Vec::new(), Vec::new()]
        };
        let mut out = Vec::with_capacity(self.scorers.len());
        for (_, scorer) in &self.scorers {
            let Ok(scorer) = scorer else { continue };
            let mut pair = [0.0; 2];
            for (h, data) in [&z, &x].into_iter().enumerate() {
                pair[h] = match scorer {
                    Scorer::Raw => sentinel(hc_statistic(&p_values(data))),
                    Scorer::Innovated(t) => {
                        let vx = t.apply_to_innovations(&whitened[h]).map_err(wrap)?;
                        sentinel(ihc_from_transformed(&vx, t.bandwidth()))
                    }
                    Scorer::Transformed { alpha0, transform } => {
                        let vx = transform
                            .apply(&strong_transform(data, *alpha0))
                            .map_err(wrap)?;
                        sentinel(ihc_from_transformed(&vx, transform.bandwidth()))
                    }
                }
                .map_err(wrap)?;
            }
            out.push(pair);
        }
        Ok(out)
    }

    /// Null and alternative samples per method.
    pub fn run(
        &self,
        replicates: usize,
        base_seed: u64,
        exec: Execution,
    ) -> Vec<(Method, Result<(ScoreSample, ScoreSample)>)> {
        let rows = exec.map_indices(replicates, |i| self.replicate(base_seed, i));
        let rows: Result<Vec<Vec<[f64; 2]>>> = rows.into_iter().collect();
        let seeds: Vec<u64> = (0..replicates).map(noise_stream).collect();
        let mut column = 0;
        self.scorers
            .iter()
            .map(|(method, scorer)| {
                let outcome = match (scorer, &rows) {
                    (Err(e), _) => Err(e.clone()),
                    (Ok(_), Err(e)) => Err(e.clone()),
                    (Ok(_), Ok(rows)) => {
                        let c = column;
                        column += 1;
                        let sample = |h: usize, hypothesis| ScoreSample {
                            method: *method,
                            hypothesis,
                            scores: rows.iter().map(|r| r[c][h]).collect(),
                            seeds: seeds.clone(),
                        };
                        Ok((
                            sample(0, Hypothesis::Null),
                            sample(1, Hypothesis::Alternative),
                        ))
                    }
                };
                (*method, outcome)
            })
            .collect()
    }
}

/// Empty maximization range scores as `-inf`: such a replicate never exceeds
/// any finite cutoff.
fn sentinel(outcome: Result<f64>) -> Result<f64> {
    match outcome {
        Err(Error::EmptyMaximizationRange) => Ok(f64::NEG_INFINITY),
        other => other,
    }
}

/// Scores of one method under one hypothesis for a single cell.
pub fn run_replicates(
    cell: &Cell,
    method: Method,
    hypothesis: Hypothesis,
    replicates: usize,
    base_seed: u64,
    exec: Execution,
) -> Result<ScoreSample> {
    let prepared = PreparedCell::new(cell, &[method])?;
    let (_, outcome) = prepared
        .run(replicates, base_seed, exec)
        .pop()
        .expect("one method requested");
    let (null, alt) = outcome?;
    Ok(match hypothesis {
        Hypothesis::Null => null,
        Hypothesis::Alternative => alt,
    })
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// `min_t [frac(null ≥ t) + frac(alt < t)]` over observed scores and `+inf`.
pub fn min_total_error(null: &[f64], alt: &[f64]) -> f64 {
    let (null, alt) = (sorted(null), sorted(alt));
    let (n0, n1) = (null.len() as f64, alt.len() as f64);
    let objective = |t: f64| {
        let type1 = (null.len() - null.partition_point(|&v| v < t)) as f64 / n0;
        let type2 = alt.partition_point(|&v| v < t) as f64 / n1;
        type1 + type2
    };
    null.iter()
        .chain(&alt)
        .copied()
        .chain(std::iter::once(f64::INFINITY))
        .map(objective)
        .fold(f64::INFINITY, f64::min)
}

/// The `⌈(1−q)R⌉`-th smallest null score.
pub fn empirical_threshold(null: &[f64], q: f64) -> Result<f64> {
    if null.is_empty() {
        return Err(Error::InvalidParameter("empty null sample".into()));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} outside (0, 1)")));
    }
    let r = null.len();
    // The small offset keeps ⌈0.9 · 500⌉ at 450 despite rounding.
    let k = (((1.0 - q) * r as f64 - 1e-9).ceil() as usize).clamp(1, r);
    Ok(sorted(null)[k - 1])
}

/// `frac(alt > threshold)`.
pub fn power(alt: &[f64], threshold: f64) -> f64 {
    alt.iter().filter(|&&v| v > threshold).count() as f64 / alt.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    pub min_total_error: f64,
    pub empirical_threshold: f64,
    pub power: f64,
}

pub fn summarize(null: &[f64], alt: &[f64], q: f64) -> Result<ErrorSummary> {
    let empirical_threshold = empirical_threshold(null, q)?;
    Ok(ErrorSummary {
        min_total_error: min_total_error(null, alt),
        empirical_threshold,
        power: power(alt, empirical_threshold),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub preset: Preset,
    pub method: Method,
    pub beta: f64,
    pub r: f64,
    pub param: f64,
    pub n: usize,
    pub replicates: usize,
    pub seed: u64,
    pub outcome: std::result::Result<ErrorSummary, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn all_failed(&self) -> bool {
        self.rows.iter().all(|r| r.outcome.is_err())
    }

    pub fn find(&self, method: Method, n: usize, param: f64) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.n == n && (r.param - param).abs() < 1e-12)
    }
}

/// Runs every cell in order; replicates within a cell use `exec`. A cell
/// that fails is reported per method and the sweep continues.
pub fn run_experiment(config: &ExperimentConfig, exec: Execution) -> Result<ExperimentReport> {
    config.validate()?;
    let mut rows = Vec::with_capacity(config.cells.len() * config.methods.len());
    for cell in &config.cells {
        let row = |method, outcome| ReportRow {
            preset: config.preset,
            method,
            beta: cell.beta,
            r: cell.r,
            param: cell.param,
            n: cell.n,
            replicates: config.replicates,
            seed: config.base_seed,
            outcome,
        };
        match PreparedCell::new(cell, &config.methods) {
            Err(e) => rows.extend(config.methods.iter().map(|&m| row(m, Err(e.to_string())))),
            Ok(prepared) => {
                for (method, outcome) in prepared.run(config.replicates, config.base_seed, exec) {
                    let summary = outcome
                        .and_then(|(null, alt)| summarize(&null.scores, &alt.scores, config.q))
                        .map_err(|e| e.to_string());
                    rows.push(row(method, summary));
                }
            }
        }
    }
    Ok(ExperimentReport { rows })
}

pub const REPORT_HEADER: &str =
    "preset,method,beta,r,rho_or_alpha,n,R,seed,min_total_error,empirical_threshold,power,error";

/// `%g`-style formatting with `digits` significant digits.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One CSV row per cell and method. Failed rows leave the numeric columns
/// empty and fill `error`.
pub fn write_report_csv<W: Write>(
    mut w: W,
    report: &ExperimentReport,
    precision: usize,
) -> Result<()> {
    writeln!(w, "{REPORT_HEADER}")?;
    let g = |v: f64| format_sig(v, precision);
    for row in &report.rows {
        let (summary, error) = match &row.outcome {
            Ok(s) => (
                format!(
                    "{},{},{}",
                    g(s.min_total_error),
                    g(s.empirical_threshold),
                    g(s.power)
                ),
                String::new(),
            ),
            Err(e) => (",,".to_string(), csv_field(e)),
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{summary},{error}",
            row.preset.label(),
            row.method,
            g(row.beta),
            g(row.r),
            g(row.param),
            row.n,
            row.replicates,
            row.seed,
        )?;
    }
    Ok(())
}
