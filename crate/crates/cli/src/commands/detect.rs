use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use ihc_core::corr::{innovation_transform, read_matrix_csv, CorrelationMatrix};
use ihc_core::hc::{default_bandwidth, detect_hc, detect_ihc, DetectionResult};
use ihc_core::signal::{read_dataset_csv, write_dataset_csv, Dataset};
use ihc_core::simlab::format_sig;
use ihc_core::spectral::DEFAULT_GRID;
use ihc_core::Error;

use super::{precision, Context, Outcome};
use crate::config::Result;
use crate::error::CliError;
use crate::noise::NoiseSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Choice {
    Hc,
    HcA,
    HcB,
    /// iHC with an explicit bandwidth.
    Ihc,
}

/// Default `a` in the HC threshold `(1 + a)√(2 ln ln n)`.
pub const DEFAULT_A: f64 = 0.5;

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::io(path, e))
}

fn read_sigma(path: &Path) -> Result<CorrelationMatrix> {
    let context = || path.display().to_string();
    let m = read_matrix_csv(open(path)?).map_err(|e| CliError::core(context(), e))?;
    CorrelationMatrix::new(m).map_err(|e| CliError::core(context(), e))
}

/// Prints the statistic, threshold and decision. The decision is output,
/// not exit status.
pub fn run(ctx: &Context) -> Result<Outcome> {
    let mut s = ctx.config.section("detect");
    let mut out = Outcome::default();
    let precision = precision(&mut s, ctx.precision)?;
    let data_path = s.path("data");
    let data_path = s.require("data", data_path)?;
    let method_name = s.str("method").unwrap_or_else(|| "HC-b".into());
    let bandwidth = s.usize("bandwidth")?;
    let a = s.f64("a")?;
    let threshold = s.f64("threshold")?;
    let transformed = s.path("transformed");
    let sigma_path = s.path("sigma");
    let grid = s.usize("grid")?.unwrap_or(DEFAULT_GRID);
    let spec = NoiseSpec::read(&mut s)?;
    s.finish()?;

    let choice = match method_name.to_ascii_lowercase().as_str() {
        "hc" => Choice::Hc,
        "hc-a" => Choice::HcA,
        "hc-b" => Choice::HcB,
        "ihc" => Choice::Ihc,
        "hc-b-transformed" => {
            return Err(s.error("method", "HC-b-transformed is only available in simulate"))
        }
        _ => {
            return Err(s.error(
                "method",
                format!("unknown method `{method_name}` (expected HC, HC-a, HC-b or iHC)"),
            ))
        }
    };
    if sigma_path.is_some() && spec.is_some() {
        return Err(s.error("sigma", "give either sigma or density, not both"));
    }

    let data = read_dataset_csv(open(&data_path)?)
        .map_err(|e| CliError::core(data_path.display().to_string(), e))?;
    let x = &data.values;
    let n = x.len();
    out.set("data", data_path.display());

    let sigma = match (&sigma_path, &spec) {
        (Some(path), _) => {
            out.set("sigma", path.display());
            read_sigma(path)?
        }
        (None, Some(spec)) => {
            out.resolved
                .extend(NoiseSpec::resolved(std::slice::from_ref(spec)));
            out.set("grid", grid);
            spec.matrix(n, grid)
                .map_err(|e| CliError::core(format!("{} matrix, n = {n}", spec.kind()), e))?
        }
        (None, None) => CorrelationMatrix::identity(n),
    };
    if sigma.n() != n {
        return Err(CliError::core(
            "correlation matrix vs data",
            Error::DimensionMismatch {
                expected: n,
                found: sigma.n(),
            },
        ));
    }

    let mut lines = Vec::new();
    let result: DetectionResult = match choice {
        Choice::Hc => {
            if threshold.is_some() || bandwidth.is_some() || transformed.is_some() {
                let key = if threshold.is_some() {
                    "threshold"
                } else if bandwidth.is_some() {
                    "bandwidth"
                } else {
                    "transformed"
                };
                return Err(s.error(key, "only applies to iHC methods"));
            }
            let a = a.unwrap_or(DEFAULT_A);
            out.set("method", "HC");
            out.set("a", a);
            lines.push("method=HC".to_string());
            detect_hc(x, a).map_err(|e| CliError::core("HC", e))?
        }
        _ => {
            if a.is_some() {
                return Err(s.error("a", "only applies to HC"));
            }
            let (label, default) = match choice {
                Choice::HcA => ("HC-a", Some(1)),
                Choice::HcB => ("HC-b", Some(default_bandwidth(n))),
                _ => ("iHC", None),
            };
            let b = bandwidth
                .or(default)
                .ok_or_else(|| s.error("bandwidth", "iHC needs a bandwidth"))?;
            out.set("method", label);
            out.set("bandwidth", b);
            lines.push(format!("method={label}"));
            let t = innovation_transform(&sigma, b)
                .map_err(|e| CliError::core("innovation transform", e))?;
            if let Some(path) = &transformed {
                let vx = t.apply(x).map_err(|e| CliError::core("V·x", e))?;
                let mut buf = Vec::new();
                write_dataset_csv(
                    &mut buf,
                    &Dataset {
                        values: vx,
                        hypothesis: data.hypothesis,
                        seed: data.seed,
                    },
                )
                .expect("in-memory write");
                std::fs::write(path, buf).map_err(|e| CliError::io(path, e))?;
                out.set("transformed", path.display());
            }
            if let Some(t) = threshold {
                out.set("threshold", t);
            }
            detect_ihc(x, &t, threshold).map_err(|e| CliError::core("iHC", e))?
        }
    };
    out.set("precision", precision);

    lines.push(format!("n={n}"));
    if let ihc_core::hc::Statistic::Ihc { bandwidth } = result.method {
        lines.push(format!("bandwidth={bandwidth}"));
    }
    lines.push(format!(
        "statistic={}",
        format_sig(result.statistic, precision)
    ));
    lines.push(format!(
        "threshold={}",
        format_sig(result.threshold, precision)
    ));
    lines.push(format!("reject={}", result.reject));
    lines.push(format!("empty_range={}", result.empty_range));
    out.body = (lines.join("\n") + "\n").into_bytes();
    Ok(out)
}
