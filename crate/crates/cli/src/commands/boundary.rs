use std::fmt::Write;

use ihc_core::hc::rho_star;
use ihc_core::simlab::format_sig;
use ihc_core::spectral::{wiener_rate, DEFAULT_GRID};

use super::{join, precision, Context, Outcome};
use crate::config::Result;
use crate::error::CliError;
use crate::noise::NoiseSpec;
use crate::svg::{render, Panel, Region, Series};

pub const HEADER: &str = "beta,rho_star,boundary_lo,boundary_hi";

fn default_betas() -> Vec<f64> {
    (51..=99).map(|i| i as f64 / 100.0).collect()
}

/// Rows `(β, ρ*(β), ρ*(β)/γ_hi, ρ*(β)/γ_lo)`; with a density both
/// constants are the Wiener interpolation rate `C(f)`.
pub fn run(ctx: &Context) -> Result<Outcome> {
    let mut s = ctx.config.section("boundary");
    let mut out = Outcome::default();
    let precision = precision(&mut s, ctx.precision)?;
    let betas = s.f64_list("betas")?.unwrap_or_else(default_betas);
    let grid = s.usize("grid")?.unwrap_or(DEFAULT_GRID);
    let noise = NoiseSpec::read(&mut s)?;
    let gamma = s.f64("gamma")?;
    let gamma_lo = s.f64("gamma_lo")?;
    let gamma_hi = s.f64("gamma_hi")?;
    s.finish()?;

    out.set("betas", join(&betas));
    let (lo, hi) = match (noise, gamma, gamma_lo, gamma_hi) {
        (Some(spec), None, None, None) => {
            let f = spec
                .density()
                .ok_or_else(|| {
                    s.error("density", "the strong family has no boundary constant here")
                })?
                .map_err(|e| s.error("density", e.to_string()))?;
            let c = wiener_rate(&f, grid).map_err(|e| CliError::core("C(f)", e))?;
            out.resolved.extend(NoiseSpec::resolved(&[spec]));
            out.set("grid", grid);
            eprintln!("C(f) = {}", format_sig(c, precision));
            (c, c)
        }
        (None, g, None, None) => {
            let g = g.unwrap_or(1.0);
            out.set("gamma", g);
            (g, g)
        }
        (None, None, Some(lo), Some(hi)) => {
            out.set("gamma_lo", lo);
            out.set("gamma_hi", hi);
            (lo, hi)
        }
        _ => {
            let key = if gamma_lo.is_some() || gamma_hi.is_some() {
                "gamma_lo"
            } else {
                "gamma"
            };
            return Err(s.error(
                key,
                "give exactly one of: density, gamma, or gamma_lo with gamma_hi",
            ));
        }
    };
    if !(lo > 0.0 && lo <= hi) {
        return Err(s.error(
            "gamma_lo",
            format!("need 0 < gamma_lo = {lo} <= gamma_hi = {hi}"),
        ));
    }
    out.set("precision", precision);

    let mut rows = Vec::with_capacity(betas.len());
    for &beta in &betas {
        let rho = rho_star(beta).map_err(|e| s.error("betas", e.to_string()))?;
        rows.push([beta, rho, rho / hi, rho / lo]);
    }
    let mut body = String::from(HEADER);
    body.push('\n');
    for row in &rows {
        let cells: Vec<String> = row.iter().map(|&v| format_sig(v, precision)).collect();
        let _ = writeln!(body, "{}", cells.join(","));
    }
    out.body = body.into_bytes();
    if ctx.svg {
        out.svg = Some(phase_diagram(&rows, lo, hi));
    }
    Ok(out)
}

fn phase_diagram(rows: &[[f64; 4]], lo: f64, hi: f64) -> String {
    let curve = |col: usize| rows.iter().map(|r| (r[0], r[col])).collect::<Vec<_>>();
    let top = rows.iter().map(|r| r[3]).fold(1.0, f64::max);
    let (first, last) = (
        rows.first().map_or(0.5, |r| r[0]),
        rows.last().map_or(1.0, |r| r[0]),
    );
    let mut below = curve(2);
    below.extend([(last, 0.0), (first, 0.0)]);
    let mut above = curve(3);
    above.extend([(last, top), (first, top)]);
    let mut series = vec![Series {
        label: "ρ*(β)".into(),
        color: "#7f7f7f",
        dashed: true,
        points: curve(1),
    }];
    if lo == hi {
        series.push(Series {
            label: "boundary".into(),
            color: "#d62728",
            dashed: false,
            points: curve(2),
        });
    } else {
        series.push(Series {
            label: "ρ*(β)/γ_hi".into(),
            color: "#d62728",
            dashed: false,
            points: curve(2),
        });
        series.push(Series {
            label: "ρ*(β)/γ_lo".into(),
            color: "#1f77b4",
            dashed: false,
            points: curve(3),
        });
    }
    let panel = Panel {
        title: "Detection boundary".into(),
        x_label: "β".into(),
        y_label: "r".into(),
        x_range: (0.5, 1.0),
        y_range: (0.0, top),
        series,
        regions: vec![
            Region {
                label: "undetectable".into(),
                color: "#ff9896",
                polygon: below,
            },
            Region {
                label: "detectable".into(),
                color: "#98df8a",
                polygon: above,
            },
        ],
    };
    render(&[panel], 1)
}
