pub mod boundary;
pub mod detect;
pub mod matrix;
pub mod simulate;

use std::fmt::Display;

use ihc_core::simlab::DEFAULT_PRECISION;

use crate::config::{Config, Result, Section};
use crate::error::CliError;

pub struct Context {
    pub config: Config,
    pub seed: Option<u64>,
    pub precision: Option<usize>,
    pub svg: bool,
}

/// What a subcommand produced. `resolved` holds every setting with defaults
/// filled in, in config-key form, for the run manifest.
#[derive(Debug, Default)]
pub struct Outcome {
    pub body: Vec<u8>,
    pub resolved: Vec<(String, String)>,
    pub svg: Option<String>,
    /// Reported after the outputs are written.
    pub failure: Option<CliError>,
}

impl Outcome {
    pub fn set(&mut self, key: &str, value: impl Display) {
        self.resolved.push((key.to_string(), value.to_string()));
    }
}

/// `--precision` wins over the `precision` key; 6 significant digits
/// otherwise.
pub fn precision(s: &mut Section, flag: Option<usize>) -> Result<usize> {
    let key = s.usize("precision")?;
    let p = flag.or(key).unwrap_or(DEFAULT_PRECISION);
    if !(1..=17).contains(&p) {
        return Err(s.error("precision", format!("{p} outside 1..=17")));
    }
    Ok(p)
}

pub fn join<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
