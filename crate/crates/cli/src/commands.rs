use qbattery::analysis::steepest_jump;
use qbattery::{
    critical_eta, cutoff_convergence, find_extrema, scaling_run, sweep, trace, Axis, Exec, ModelParams, Quantity,
    SweepAxis,
};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliResult, Failure};
use crate::output::{heatmap, line_plot, num, Bundle, Table};

/// Result of a command: files to write plus an optional deferred failure that
/// is reported after the files are on disk.
pub struct Outcome {
    pub bundle: Bundle,
    pub failure: Option<Failure>,
    pub summary: String,
}

impl Outcome {
    fn ok(bundle: Bundle, summary: String) -> Self {
        Self { bundle, failure: None, summary }
    }
}

pub fn run(cfg: &RunConfig) -> CliResult<Outcome> {
    use crate::config::Command as C;
    match cfg.command {
        C::Trace => run_trace(cfg),
        C::Extrema => run_extrema(cfg),
        C::Sweep => run_sweep(cfg),
        C::Phase => run_phase(cfg),
        C::Scaling => run_scaling(cfg),
        C::Convergence => run_convergence(cfg),
        C::Reproduce => crate::reproduce::run(cfg),
    }
}

fn run_trace(cfg: &RunConfig) -> CliResult<Outcome> {
    let p = &cfg.params;
    let tr = trace(p, &cfg.protocol, Exec::Parallel)?;
    let mut table = Table::new(&["t", "energy", "power", "fluctuation", "sz_ratio"]);
    for i in 0..tr.len() {
        table.push(vec![num(tr.times[i]), num(tr.energy[i]), num(tr.power[i]), num(tr.fluctuation[i]), num(tr.sz[i])]);
    }
    let horizon = cfg.protocol.horizon(p);
    let mut bundle = Bundle::default();
    bundle.add_table(
        cfg,
        "trace.csv",
        &table,
        p,
        json!({ "horizon": horizon, "max_norm_drift": tr.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max) }),
        Vec::new(),
    );
    let series = |ys: &[f64]| tr.times.iter().copied().zip(ys.iter().copied()).collect::<Vec<_>>();
    bundle.add_svg(
        cfg,
        "trace.svg",
        line_plot(
            &format!("N={} g={} η={} Ω={}", p.n_tls, p.g, p.eta, p.omega_drive),
            "ω_a t",
            "ω_a",
            &[("E", series(&tr.energy)), ("P", series(&tr.power)), ("Σ", series(&tr.fluctuation))],
            false,
        ),
    );
    Ok(Outcome::ok(bundle, format!("trace: {} samples up to t = {horizon}", tr.len())))
}

fn run_extrema(cfg: &RunConfig) -> CliResult<Outcome> {
    let p = &cfg.params;
    let rep = find_extrema(p, &cfg.protocol, Exec::Parallel)?;
    let mut table = Table::new(&["e_max", "t_e", "sigma_bar", "p_max", "p_max_normalized", "t_p", "horizon"]);
    let norm = if p.g > 0.0 { p.g } else { 1.0 };
    table.push(vec![
        num(rep.e_max),
        num(rep.t_e),
        num(rep.sigma_bar),
        num(rep.p_max),
        num(rep.p_max / norm),
        num(rep.t_p),
        num(rep.horizon),
    ]);
    let mut bundle = Bundle::default();
    bundle.add_table(cfg, "extrema.csv", &table, p, json!({ "report": rep }), rep.warnings.clone());
    let summary = format!(
        "E_max = {} at t = {}, Σ̄ = {}, P_max = {} at t = {}",
        rep.e_max, rep.t_e, rep.sigma_bar, rep.p_max, rep.t_p
    );
    Ok(Outcome::ok(bundle, summary))
}

fn grid_table(values: &[Vec<Option<f64>>], a1: &SweepAxis, a2: &SweepAxis) -> Table {
    let mut table = Table::new(&["axis1", "axis2", "value"]);
    for (i, a) in a1.values.iter().enumerate() {
        for (k, b) in a2.values.iter().enumerate() {
            // failed cells leave the value empty
            table.push(vec![num(*a), num(*b), values[i][k].map(num).unwrap_or_default()]);
        }
    }
    table
}

fn run_sweep(cfg: &RunConfig) -> CliResult<Outcome> {
    let section = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Failure::Usage("sweep needs a `sweep` section with axis1, axis2 and quantity".into()))?;
    let (a1, a2) = (section.axis1.resolve(), section.axis2.resolve());
    let grid = sweep(&cfg.params, a1.clone(), a2.clone(), section.quantity, &cfg.protocol, Exec::Parallel)?;
    let values: Vec<Vec<Option<f64>>> = (0..a1.values.len())
        .map(|i| (0..a2.values.len()).map(|k| grid.value(i, k)).collect())
        .collect();
    let n2 = a2.values.len();
    let failed: Vec<(usize, usize)> = (0..grid.cells.len())
        .filter(|&c| grid.cells[c].value.is_none())
        .map(|c| (c / n2, c % n2))
        .collect();
    let warnings: Vec<String> = grid
        .cells
        .iter()
        .flat_map(|c| c.warnings.iter().cloned())
        .chain(failed.iter().map(|&(i, k)| {
            format!(
                "cell {}={}, {}={} failed",
                a1.axis.name(),
                a1.values[i],
                a2.axis.name(),
                a2.values[k]
            )
        }))
        .collect();
    let mut bundle = Bundle::default();
    bundle.add_table(
        cfg,
        "sweep.csv",
        &grid_table(&values, &a1, &a2),
        &cfg.params,
        json!({
            "axis1": a1.axis.name(),
            "axis2": a2.axis.name(),
            "quantity": section.quantity.name(),
            "errors": grid.cells.iter().filter_map(|c| c.error.clone()).collect::<Vec<_>>(),
        }),
        warnings,
    );
    bundle.add_svg(
        cfg,
        "sweep.svg",
        heatmap(section.quantity.name(), a1.axis.name(), a2.axis.name(), &a1.values, &a2.values, &values),
    );
    let n = a1.values.len() * a2.values.len();
    let summary = format!("sweep: {} of {n} cells evaluated", n - failed.len());
    let failure = (!failed.is_empty()).then(|| Failure::PartialSweep(format!("{} of {n} sweep cells failed", failed.len())));
    Ok(Outcome { bundle, failure, summary })
}

/// Ground-state inversion over (g, η) plus the predicted critical line.
pub fn phase_bundle(cfg: &RunConfig, prefix: &str) -> CliResult<(Bundle, Vec<(f64, f64, f64)>, usize)> {
    let gs = SweepAxis::new(Axis::G, cfg.phase.g.clone());
    let etas = cfg.phase.eta.resolve();
    if etas.axis != Axis::Eta {
        return Err(Failure::Usage("phase.eta must use axis `eta`".into()));
    }
    let grid = sweep(&cfg.params, gs.clone(), etas.clone(), Quantity::GsSz, &cfg.protocol, Exec::Parallel)?;
    let values: Vec<Vec<Option<f64>>> = (0..gs.values.len())
        .map(|i| (0..etas.values.len()).map(|k| grid.value(i, k)).collect())
        .collect();
    let p = &cfg.params;
    let mut critical = Table::new(&["g", "eta_c"]);
    let mut rows = Vec::new();
    for (i, &g) in gs.values.iter().enumerate() {
        let eta_c = critical_eta(g, p.n_tls, p.omega_a, p.omega_c);
        critical.push(vec![num(g), num(eta_c)]);
        let ratios: Vec<f64> = values[i].iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        let jump = steepest_jump(&etas.values, &ratios).unwrap_or(f64::NAN);
        rows.push((g, eta_c, jump));
    }
    let mut bundle = Bundle::default();
    bundle.add_table(
        cfg,
        &format!("{prefix}sweep.csv"),
        &grid_table(&values, &gs, &etas),
        p,
        json!({ "axis1": "g", "axis2": "eta", "quantity": "gs_sz" }),
        Vec::new(),
    );
    bundle.add_table(
        cfg,
        &format!("{prefix}critical.csv"),
        &critical,
        p,
        json!({
            "steepest_jump_eta": rows.iter().map(|r| json!({ "g": r.0, "eta_c": r.1, "eta_jump": r.2 })).collect::<Vec<_>>(),
        }),
        Vec::new(),
    );
    bundle.add_svg(cfg, &format!("{prefix}phase.svg"), heatmap("⟨J_z⟩/(N/2)", "g", "η", &gs.values, &etas.values, &values));
    Ok((bundle, rows, grid.failed_cells()))
}

fn run_phase(cfg: &RunConfig) -> CliResult<Outcome> {
    let (bundle, rows, failed) = phase_bundle(cfg, "")?;
    let summary = rows
        .iter()
        .map(|(g, c, j)| format!("g = {g}: η_c = {c:.4}, steepest jump at η = {j:.4}"))
        .collect::<Vec<_>>()
        .join("\n");
    let failure = (failed > 0).then(|| Failure::PartialSweep(format!("{failed} phase cells failed")));
    Ok(Outcome { bundle, failure, summary })
}

pub fn scaling_outputs(
    cfg: &RunConfig,
    bundle: &mut Bundle,
    prefix: &str,
    series: &[(String, ModelParams)],
) -> CliResult<Vec<(String, qbattery::ScalingRun)>> {
    let mut runs = Vec::new();
    for (label, params) in series {
        let run = scaling_run(params, &cfg.scaling.n_values, &cfg.protocol, Exec::Parallel)?;
        let mut table = Table::new(&["N", "p_max_normalized"]);
        for (n, p) in run.n_values.iter().zip(&run.p_max_normalized) {
            table.push(vec![n.to_string(), num(*p)]);
        }
        let warnings = run.reports.iter().flat_map(|r| r.warnings.iter().cloned()).collect();
        bundle.add_table(
            cfg,
            &format!("{prefix}scaling_{label}.csv"),
            &table,
            params,
            json!({ "fit": run.fit, "p_max_raw": run.reports.iter().map(|r| r.p_max).collect::<Vec<_>>() }),
            warnings,
        );
        runs.push((label.clone(), run));
    }
    let mut alphas = Table::new(&["label", "alpha", "beta", "residual"]);
    for (label, run) in &runs {
        alphas.push(vec![label.clone(), num(run.fit.alpha), num(run.fit.beta), num(run.fit.residual)]);
    }
    bundle.add_table(
        cfg,
        &format!("{prefix}alphas.csv"),
        &alphas,
        &cfg.params,
        json!({
            "beta": "exp(intercept) of the natural-log fit",
            "beta_tabulated": runs.iter().map(|(l, r)| json!({ "label": l, "beta_tabulated": r.fit.beta_tabulated })).collect::<Vec<_>>(),
        }),
        Vec::new(),
    );
    let curves: Vec<(&str, Vec<(f64, f64)>)> = runs
        .iter()
        .map(|(l, r)| (l.as_str(), r.n_values.iter().map(|&n| n as f64).zip(r.p_max_normalized.iter().copied()).collect()))
        .collect();
    bundle.add_svg(cfg, &format!("{prefix}scaling.svg"), line_plot("P_max / g", "N", "P_max/g", &curves, true));
    Ok(runs)
}

fn run_scaling(cfg: &RunConfig) -> CliResult<Outcome> {
    let series: Vec<(String, ModelParams)> = if cfg.scaling.series.is_empty() {
        vec![("base".to_string(), cfg.params)]
    } else {
        cfg.scaling
            .series
            .iter()
            .map(|s| Ok((sanitize(&s.label)?, cfg.series_params(s)?)))
            .collect::<CliResult<_>>()?
    };
    let mut bundle = Bundle::default();
    let runs = scaling_outputs(cfg, &mut bundle, "", &series)?;
    let summary = runs
        .iter()
        .map(|(l, r)| format!("{l}: alpha = {:.4}, beta = {:.4}", r.fit.alpha, r.fit.beta))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Outcome::ok(bundle, summary))
}

fn sanitize(label: &str) -> CliResult<String> {
    if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
        return Err(Failure::Usage(format!("series label `{label}` must be non-empty [A-Za-z0-9._-]")));
    }
    Ok(label.to_string())
}

fn run_convergence(cfg: &RunConfig) -> CliResult<Outcome> {
    let rows = cutoff_convergence(&cfg.params, &cfg.convergence.factors, &cfg.protocol, Exec::Parallel)?;
    let mut table = Table::new(&["factor", "e_max", "p_max", "delta_e_max", "delta_p_max"]);
    for r in &rows {
        table.push(vec![
            r.factor.to_string(),
            num(r.e_max),
            num(r.p_max),
            r.delta_e_max.map(num).unwrap_or_default(),
            r.delta_p_max.map(num).unwrap_or_default(),
        ]);
    }
    let mut bundle = Bundle::default();
    bundle.add_table(cfg, "convergence.csv", &table, &cfg.params, json!({ "rows": rows }), Vec::new());
    let last = rows.last().and_then(|r| r.delta_e_max);
    Ok(Outcome::ok(bundle, format!("convergence: last |ΔE_max| = {:?}", last)))
}
