//! Sparse mean vectors, correlated Gaussian noise and seeded datasets.
//!
//! Locations are 0-based throughout the API; coordinate `27` in the usual
//! 1-based notation is index `26` here.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::corr::LowerTriangular;
use crate::error::{Error, Result};

/// The generator behind every simulated draw.
pub type SimRng = ChaCha8Rng;

/// Generator for substream `stream` of `base_seed`. Distinct streams of one
/// key never overlap, so replicate `i` can be drawn on any thread.
pub fn substream(base_seed: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(base_seed);
    rng.set_stream(stream);
    rng
}

/// Noise stream of replicate `i`. Its signal stream is the next one.
pub fn noise_stream(replicate: usize) -> u64 {
    2 * replicate as u64
}

pub fn signal_stream(replicate: usize) -> u64 {
    2 * replicate as u64 + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    Null,
    Alternative,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::Null => "null",
            Hypothesis::Alternative => "alternative",
        })
    }
}

impl FromStr for Hypothesis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "null" => Ok(Hypothesis::Null),
            "alternative" => Ok(Hypothesis::Alternative),
            other => Err(Error::InvalidParameter(format!(
                "hypothesis must be `null` or `alternative`, got `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalVariant {
    Singleton,
    /// Each location spawns `g[0], g[1], …` at offsets `0, 1, …`.
    Cluster(Vec<f64>),
    /// Amplitude rescaled by `a^{-1/2}` with `a = n^{α₀}/2`.
    Strong {
        alpha: f64,
        alpha0: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalConfig {
    pub n: usize,
    pub beta: f64,
    pub r: f64,
    pub variant: SignalVariant,
}

impl SignalConfig {
    /// `β ∈ [1/2, 1)`, `r ∈ (0, 1)`.
    pub fn new(n: usize, beta: f64, r: f64, variant: SignalVariant) -> Result<Self> {
        if n < 2 {
            return Err(Error::NTooSmall {
                n: n as f64,
                requirement: "n >= 2",
            });
        }
        if !(0.5..1.0).contains(&beta) {
            return Err(Error::BetaOutOfRange { beta });
        }
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!("r = {r} outside (0, 1)")));
        }
        match &variant {
            SignalVariant::Cluster(g) if g.is_empty() || g[0] == 0.0 => {
                return Err(Error::InvalidParameter(
                    "cluster generator needs a nonzero leading coefficient".into(),
                ))
            }
            SignalVariant::Strong { alpha, alpha0 } if !(*alpha0 > 0.0 && alpha0 <= alpha) => {
                return Err(Error::AlphaOutOfRange {
                    alpha: *alpha0,
                    range: "alpha0 in (0, alpha]",
                })
            }
            _ => {}
        }
        Ok(Self {
            n,
            beta,
            r,
            variant,
        })
    }

    /// `round(n^{1-β})`, at least 1.
    pub fn m(&self) -> usize {
        ((self.n as f64).powf(1.0 - self.beta).round() as usize).clamp(1, self.n)
    }

    /// `A_n = √(2 r ln n)`.
    pub fn amplitude(&self) -> f64 {
        (2.0 * self.r * (self.n as f64).ln()).sqrt()
    }

    /// Value placed on each support point before any cluster spreading.
    pub fn effective_amplitude(&self) -> f64 {
        match self.variant {
            SignalVariant::Strong { alpha0, .. } => {
                let a = (self.n as f64).powf(alpha0) / 2.0;
                self.amplitude() / a.sqrt()
            }
            _ => self.amplitude(),
        }
    }
}

/// Mean vector added to the noise together with the sampled locations. For
/// clusters `mu` is the spread vector `Σ_n(g)·μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector {
    pub mu: Vec<f64>,
    pub support: Vec<usize>,
}

impl SignalVector {
    pub fn from_support(n: usize, support: &[usize], amplitude: f64) -> Result<Self> {
        let mut support = support.to_vec();
        support.sort_unstable();
        support.dedup();
        if let Some(&last) = support.last() {
            if last >= n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: last + 1,
                });
            }
        }
        let mut mu = vec![0.0; n];
        for &l in &support {
            mu[l] = amplitude;
        }
        Ok(Self { mu, support })
    }

    /// Replaces `mu` by `Σ_n(g)·mu`; overlapping clusters add up.
    pub fn spread(mut self, g: &[f64]) -> Self {
        let n = self.mu.len();
        let mut nu = vec![0.0; n];
        for &l in &self.support {
            let v = self.mu[l];
            for (d, &gd) in g.iter().enumerate().take(n - l) {
                nu[l + d] += gd * v;
            }
        }
        self.mu = nu;
        self
    }
}

/// `m` distinct indices from `0..n`, uniformly over subsets, ascending.
pub fn sample_locations<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Vec<usize>> {
    if m > n {
        return Err(Error::MTooLarge { m, n });
    }
    let mut v = index::sample(rng, n, m).into_vec();
    v.sort_unstable();
    Ok(v)
}

pub fn build_signal<R: Rng + ?Sized>(config: &SignalConfig, rng: &mut R) -> Result<SignalVector> {
    let support = sample_locations(config.n, config.m(), rng)?;
    let signal = SignalVector::from_support(config.n, &support, config.effective_amplitude())?;
    Ok(match &config.variant {
        SignalVariant::Cluster(g) => signal.spread(g),
        _ => signal,
    })
}

/// `Z = L·ξ` with `ξ` iid standard normal.
pub fn sample_noise<R: Rng + ?Sized>(lower: &LowerTriangular, rng: &mut R) -> Vec<f64> {
    let xi: Vec<f64> = (0..lower.n()).map(|_| rng.sample(StandardNormal)).collect();
    lower.apply(&xi).expect("xi has length n")
}

/// One dataset drawn from a single generator: noise first, then (under the
/// alternative) the signal locations.
pub fn generate_dataset<R: Rng + ?Sized>(
    config: &SignalConfig,
    lower: &LowerTriangular,
    hypothesis: Hypothesis,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if lower.n() != config.n {
        return Err(Error::DimensionMismatch {
            expected: config.n,
            found: lower.n(),
        });
    }
    let mut x = sample_noise(lower, rng);
    if hypothesis == Hypothesis::Alternative {
        let signal = build_signal(config, rng)?;
        x.iter_mut().zip(&signal.mu).for_each(|(x, m)| *x += m);
    }
    Ok(x)
}

/// Observation vector with the metadata carried by the dataset file header.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub values: Vec<f64>,
    pub hypothesis: Option<Hypothesis>,
    pub seed: Option<u64>,
}

/// Header `n=<n>,hypothesis=<h>,seed=<s>` then one value per line. Missing
/// metadata is written as `unknown`.
pub fn write_dataset_csv<W: Write>(mut w: W, data: &Dataset) -> Result<()> {
    let hypothesis = data
        .hypothesis
        .map_or_else(|| "unknown".to_string(), |h| h.to_string());
    let seed = data
        .seed
        .map_or_else(|| "unknown".to_string(), |s| s.to_string());
    writeln!(
        w,
        "n={},hypothesis={hypothesis},seed={seed}",
        data.values.len()
    )?;
    for v in &data.values {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

pub fn read_dataset_csv<R: BufRead>(r: R) -> Result<Dataset> {
    let mut lines = r.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "empty dataset file".into(),
            })
        }
    };
    let mut n = None;
    let mut hypothesis = None;
    let mut seed = None;
    for field in header.split(',') {
        let (key, value) = field.split_once('=').ok_or_else(|| Error::Parse {
            line: 1,
            message: format!("header field `{field}` is not key=value"),
        })?;
        let bad = |what: &str| Error::Parse {
            line: 1,
            message: format!("bad {what} `{}`", value.trim()),
        };
        match key.trim() {
            "n" => n = Some(value.trim().parse::<usize>().map_err(|_| bad("n"))?),
            "hypothesis" if value.trim() != "unknown" => {
                hypothesis = Some(value.parse().map_err(|_| bad("hypothesis"))?)
            }
            "seed" if value.trim() != "unknown" => {
                seed = Some(value.trim().parse().map_err(|_| bad("seed"))?)
            }
            "hypothesis" | "seed" => {}
            other => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unknown header key `{other}`"),
                })
            }
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 1,
        message: "header lacks n=".into(),
    })?;
    let mut values = Vec::with_capacity(n);
    for (i, line) in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        values.push(t.parse().map_err(|_| Error::Parse {
            line: i + 1,
            message: format!("`{t}` is not a number"),
        })?);
    }
    if values.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: values.len(),
        });
    }
    Ok(Dataset {
        values,
        hypothesis,
        seed,
    })
}
