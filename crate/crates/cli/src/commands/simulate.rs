use ihc_core::signal::SignalVariant;
use ihc_core::simlab::{
    run_experiment, write_report_csv, Cell, ExperimentConfig, ExperimentReport, Method, NoiseModel,
    Preset, DEFAULT_Q, DEFAULT_REPLICATES, DEFAULT_SEED,
};
use ihc_core::Execution;

use super::{join, precision, Context, Outcome};
use crate::config::{Result, Section};
use crate::error::CliError;
use crate::noise::NoiseSpec;
use crate::svg::{render, span, Panel, Series};

fn matches(filter: &Option<Vec<f64>>, v: f64) -> bool {
    filter
        .as_ref()
        .is_none_or(|f| f.iter().any(|x| (x - v).abs() < 1e-9))
}

fn custom_cells(s: &mut Section, out: &mut Outcome) -> Result<Vec<Cell>> {
    let ns: Option<Vec<usize>> = s.list("n", "sample size")?;
    let ns = s.require("n", ns)?;
    let betas = s.f64_list("beta")?;
    let betas = s.require("beta", betas)?;
    let rs = s.f64_list("r")?;
    let rs = s.require("r", rs)?;
    let specs = NoiseSpec::read_all(s)?.unwrap_or_else(|| vec![NoiseSpec::Identity]);
    let cluster = s.f64_list("cluster")?;
    out.set("n", join(&ns));
    out.set("beta", join(&betas));
    out.set("r", join(&rs));
    out.resolved.extend(NoiseSpec::resolved(&specs));
    if let Some(g) = &cluster {
        out.set("cluster", join(g));
    }
    let mut cells = Vec::new();
    for &beta in &betas {
        for &r in &rs {
            for spec in &specs {
                for &n in &ns {
                    let cell = match (spec.noise_model(), &cluster) {
                        (Some(NoiseModel::Strong { alpha, alpha0 }), None) => {
                            Cell::strong(n, beta, r, alpha, alpha0)
                        }
                        (Some(NoiseModel::Strong { .. }), Some(_)) => {
                            return Err(s.error("cluster", "not available with density = strong"))
                        }
                        (Some(model), g) => Cell {
                            n,
                            beta,
                            r,
                            param: spec.param(),
                            noise: model,
                            variant: g
                                .clone()
                                .map_or(SignalVariant::Singleton, SignalVariant::Cluster),
                        },
                        (None, _) => {
                            return Err(s.error(
                                "density",
                                format!("{} is not available in simulate", spec.kind()),
                            ))
                        }
                    };
                    cells.push(cell);
                }
            }
        }
    }
    Ok(cells)
}

/// Runs a preset or custom sweep and writes the report CSV. Presets accept
/// `n`, `beta`, `r` and `rho` lists as filters on their grid.
pub fn run(ctx: &Context) -> Result<Outcome> {
    let mut s = ctx.config.section("simulate");
    let mut out = Outcome::default();
    let preset = match s.str("preset").as_deref().unwrap_or("a") {
        "a" => Preset::A,
        "b" => Preset::B,
        "c" => Preset::C,
        "custom" => Preset::Custom,
        other => {
            return Err(s.error(
                "preset",
                format!("unknown preset `{other}` (expected a, b, c or custom)"),
            ))
        }
    };
    let methods: Option<Vec<Method>> = s.list("methods", "method")?;
    let replicates = s.usize("replicates")?.unwrap_or(DEFAULT_REPLICATES);
    let q = s.f64("q")?.unwrap_or(DEFAULT_Q);
    let seed_key = s.u64("seed")?;
    let seed = ctx.seed.or(seed_key).unwrap_or(DEFAULT_SEED);
    let precision = precision(&mut s, ctx.precision)?;
    out.set("preset", preset.label());

    let cells = if preset == Preset::Custom {
        custom_cells(&mut s, &mut out)?
    } else {
        for key in ["density", "cluster", "alpha", "alpha0", "coefficients"] {
            if s.has(key) {
                return Err(s.error(key, "only applies to preset = custom"));
            }
        }
        let ns: Option<Vec<usize>> = s.list("n", "sample size")?;
        let betas = s.f64_list("beta")?;
        let rs = s.f64_list("r")?;
        let rhos = s.f64_list("rho")?;
        let mut cells = ExperimentConfig::preset(preset).cells;
        cells.retain(|c| {
            ns.as_ref().is_none_or(|ns| ns.contains(&c.n))
                && matches(&betas, c.beta)
                && matches(&rs, c.r)
                && matches(&rhos, c.param)
        });
        if cells.is_empty() {
            return Err(s.error("preset", "the n/beta/r/rho filters select no cells"));
        }
        for (key, values) in [("beta", &betas), ("r", &rs), ("rho", &rhos)] {
            if let Some(v) = values {
                out.set(key, join(v));
            }
        }
        if let Some(ns) = &ns {
            out.set("n", join(ns));
        }
        cells
    };
    s.finish()?;

    let strong = cells
        .iter()
        .any(|c| matches!(c.noise, NoiseModel::Strong { .. }));
    let methods = methods.unwrap_or_else(|| {
        let mut m = Method::STANDARD.to_vec();
        if strong {
            m.push(Method::HcBTransformed);
        }
        m
    });
    if methods.is_empty() {
        return Err(s.error("methods", "no methods selected"));
    }
    if replicates < 2 {
        return Err(s.error("replicates", format!("{replicates} must be at least 2")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(s.error("q", format!("{q} outside (0, 1)")));
    }
    out.set("methods", join(&methods));
    out.set("replicates", replicates);
    out.set("q", q);
    out.set("seed", seed);
    out.set("precision", precision);

    let config = ExperimentConfig {
        preset,
        cells,
        methods,
        replicates,
        base_seed: seed,
        q,
    };
    let report = run_experiment(&config, Execution::default())
        .map_err(|e| CliError::core("experiment", e))?;
    write_report_csv(&mut out.body, &report, precision).expect("in-memory write");
    if report.all_failed() {
        out.failure = Some(CliError::AllCellsFailed {
            cells: config.cells.len(),
        });
    }
    if ctx.svg {
        out.svg = Some(error_curves(&report));
    }
    Ok(out)
}

fn style(method: Method) -> (&'static str, bool) {
    match method {
        Method::Hc => ("#1f77b4", false),
        Method::HcA => ("#2ca02c", true),
        Method::HcB => ("#d62728", false),
        Method::HcBTransformed => ("#9467bd", true),
    }
}

/// Minimum total error per method: against ρ (or α) in one panel per
/// `(β, r, n)`, or against `n` when every cell shares one parameter.
fn error_curves(report: &ExperimentReport) -> String {
    let rows = &report.rows;
    let distinct = |v: Vec<f64>| {
        let mut v = v;
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    let by_n = distinct(rows.iter().map(|r| r.param).collect()) == 1
        && distinct(rows.iter().map(|r| r.n as f64).collect()) > 1;
    let mut keys: Vec<(f64, f64, f64)> = Vec::new();
    for r in rows {
        let key = (r.beta, r.r, if by_n { r.param } else { r.n as f64 });
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut methods: Vec<Method> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    let panels: Vec<Panel> = keys
        .iter()
        .map(|&(beta, r, fixed)| {
            let in_panel = |row: &&ihc_core::simlab::ReportRow| {
                row.beta == beta
                    && row.r == r
                    && (if by_n { row.param } else { row.n as f64 }) == fixed
            };
            let x = |row: &ihc_core::simlab::ReportRow| if by_n { row.n as f64 } else { row.param };
            let series = methods
                .iter()
                .map(|&m| {
                    let (color, dashed) = style(m);
                    Series {
                        label: m.to_string(),
                        color,
                        dashed,
                        points: rows
                            .iter()
                            .filter(in_panel)
                            .filter(|row| row.method == m)
                            .filter_map(|row| {
                                row.outcome
                                    .as_ref()
                                    .ok()
                                    .map(|s| (x(row), s.min_total_error))
                            })
                            .collect(),
                    }
                })
                .collect();
            let title = if by_n {
                format!("(β, r) = ({beta}, {r}), param = {fixed}")
            } else {
                format!("(β, r) = ({beta}, {r}), n = {fixed}")
            };
            Panel {
                title,
                x_label: if by_n { "n".into() } else { "ρ or α".into() },
                y_label: "sum of type I and II errors".into(),
                x_range: span(rows.iter().filter(in_panel).map(x)),
                y_range: (0.0, 1.0),
                series,
                regions: Vec::new(),
            }
        })
        .collect();
    render(&panels, 2)
}
