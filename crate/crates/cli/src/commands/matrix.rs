use ihc_core::corr::{diag_inverse_range, write_matrix_csv};
use ihc_core::matrix::fitted_decay_slope;
use ihc_core::simlab::format_sig;
use ihc_core::spectral::{wiener_rate, DEFAULT_GRID};

use super::{precision, Context, Outcome};
use crate::config::Result;
use crate::error::CliError;
use crate::noise::NoiseSpec;

/// Writes the matrix as CSV; diagnostics go to stderr.
pub fn run(ctx: &Context) -> Result<Outcome> {
    let mut s = ctx.config.section("matrix");
    let mut out = Outcome::default();
    let precision = precision(&mut s, ctx.precision)?;
    let n = s.usize("n")?;
    let n = s.require("n", n)?;
    if n == 0 {
        return Err(s.error("n", "must be positive"));
    }
    let grid = s.usize("grid")?.unwrap_or(DEFAULT_GRID);
    let spec = NoiseSpec::read(&mut s)?.unwrap_or(NoiseSpec::Identity);
    s.finish()?;
    out.set("n", n);
    out.resolved
        .extend(NoiseSpec::resolved(std::slice::from_ref(&spec)));
    out.set("grid", grid);
    out.set("precision", precision);

    let sigma = spec
        .matrix(n, grid)
        .map_err(|e| CliError::core(format!("{} matrix, n = {n}", spec.kind()), e))?;
    let g = |v: f64| format_sig(v, precision);
    let mut diag = vec![
        format!("n={n}"),
        format!("min_eigenvalue={}", g(sigma.min_eigenvalue())),
    ];
    match diag_inverse_range(&sigma) {
        Ok((lo, hi)) => {
            diag.push(format!("gamma_lo={}", g(lo)));
            diag.push(format!("gamma_hi={}", g(hi)));
        }
        Err(e) => diag.push(format!("gamma_lo=n/a ({e})")),
    }
    let rate = match spec.density() {
        None => "n/a".to_string(),
        Some(f) => match f.and_then(|f| wiener_rate(&f, grid)) {
            Ok(c) => g(c),
            Err(e) => format!("n/a ({e})"),
        },
    };
    diag.push(format!("wiener_rate={rate}"));
    let decay = fitted_decay_slope(sigma.as_matrix(), 5, n / 4).map_or("n/a".to_string(), g);
    diag.push(format!("decay_exponent={decay}"));
    eprintln!("{}", diag.join("\n"));

    write_matrix_csv(&mut out.body, sigma.as_matrix()).expect("in-memory write");
    Ok(out)
}
