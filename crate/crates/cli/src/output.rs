//! File emission. Everything is rendered to strings first and written in one
//! pass at the end of a run, so outputs depend only on the computed data.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qbattery::{ChargingProtocol, ModelParams};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::{CliResult, Failure};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest decimal string that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Metadata written next to every data file.
#[derive(Debug, Serialize)]
pub struct Sidecar {
    pub file: String,
    pub command: String,
    pub artifact_version: &'static str,
    pub columns: Vec<String>,
    pub units: Value,
    pub params: ModelParams,
    pub protocol: ChargingProtocol,
    pub photon_cutoff: usize,
    pub hilbert_dim: usize,
    /// `"unvalidated"` when ω_a ≠ ω_c.
    pub validation: &'static str,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    pub warnings: Vec<String>,
}

pub fn units() -> Value {
    json!({
        "energy": "omega_a",
        "time": "1/omega_a",
        "power": "omega_a^2",
        "p_max_normalized": "g*omega_a^2",
        "fluctuation": "omega_a",
        "sz_ratio": "dimensionless",
    })
}

/// Pending files of one run.
#[derive(Debug, Default)]
pub struct Bundle {
    files: Vec<(PathBuf, String)>,
}

impl Bundle {
    pub fn add(&mut self, rel: impl Into<PathBuf>, content: String) {
        self.files.push((rel.into(), content));
    }

    pub fn add_json(&mut self, rel: impl Into<PathBuf>, value: &impl Serialize) {
        let mut text = serde_json::to_string_pretty(value).expect("serializable");
        text.push('\n');
        self.add(rel, text);
    }

    /// CSV plus its `.json` sidecar.
    pub fn add_table(&mut self, run: &RunConfig, rel: &str, table: &Table, params: &ModelParams, details: Value, warnings: Vec<String>) {
        let sidecar = Sidecar {
            file: file_name(rel),
            command: run.command.name().to_string(),
            artifact_version: ARTIFACT_VERSION,
            columns: table.header.clone(),
            units: units(),
            params: *params,
            protocol: run.protocol,
            photon_cutoff: params.cutoff_factor * params.n_tls,
            hilbert_dim: (params.cutoff_factor * params.n_tls + 1) * (params.n_tls + 1),
            validation: if params.is_resonant() { "resonant" } else { "unvalidated" },
            details: if run.wants(Format::Json) { details } else { Value::Null },
            warnings,
        };
        if run.wants(Format::Csv) {
            self.add(rel, table.render());
        }
        self.add_json(Path::new(rel).with_extension("json"), &sidecar);
    }

    pub fn add_svg(&mut self, run: &RunConfig, rel: &str, svg: String) {
        if run.wants(Format::Svg) {
            self.add(rel, svg);
        }
    }

    pub fn into_files(self) -> Vec<(PathBuf, String)> {
        self.files
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    pub fn write(&self, root: &Path) -> CliResult<()> {
        for (rel, content) in &self.files {
            let path = root.join(rel);
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
            }
            std::fs::write(&path, content).map_err(|e| Failure::io(&path, e))?;
        }
        Ok(())
    }
}

fn file_name(rel: &str) -> String {
    Path::new(rel).file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const M: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn frame(out: &mut String, title: &str, xlabel: &str, ylabel: &str, x: (f64, f64), y: (f64, f64)) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">
<rect width="{W}" height="{H}" fill="white"/>
<text x="{}" y="20" text-anchor="middle" font-size="14">{title}</text>
<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>
<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>
<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{ylabel}</text>
<text x="{M}" y="{}" text-anchor="start">{:.3}</text>
<text x="{}" y="{}" text-anchor="end">{:.3}</text>
<text x="{}" y="{}" text-anchor="end">{:.3}</text>
<text x="{}" y="{M}" text-anchor="end">{:.3}</text>
"#,
        W / 2.0,
        W - 2.0 * M,
        H - 2.0 * M,
        W / 2.0,
        H - 15.0,
        H / 2.0,
        H / 2.0,
        H - M + 15.0,
        x.0,
        W - M,
        H - M + 15.0,
        x.1,
        M - 4.0,
        H - M,
        y.0,
        M - 4.0,
        y.1,
    );
}

/// Line plot of several `(x, y)` series; `log` plots log10 of both axes.
pub fn line_plot(title: &str, xlabel: &str, ylabel: &str, series: &[(&str, Vec<(f64, f64)>)], log: bool) -> String {
    let tf = |v: f64| if log { v.log10() } else { v };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|(_, s)| s.iter().map(|&(x, y)| (tf(x), tf(y))).collect())
        .collect();
    let xr = extent(pts.iter().flatten().map(|p| p.0));
    let yr = extent(pts.iter().flatten().map(|p| p.1));
    let sx = |x: f64| M + (x - xr.0) / (xr.1 - xr.0) * (W - 2.0 * M);
    let sy = |y: f64| H - M - (y - yr.0) / (yr.1 - yr.0) * (H - 2.0 * M);
    let mut out = String::new();
    let (xl, yl) = if log {
        (format!("log10 {xlabel}"), format!("log10 {ylabel}"))
    } else {
        (xlabel.to_string(), ylabel.to_string())
    };
    frame(&mut out, title, &xl, &yl, xr, yr);
    for (k, ((name, _), p)) in series.iter().zip(&pts).enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = p
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}" text-anchor="end">{name}</text>"#,
            W - M - 5.0,
            M + 15.0 * (k as f64 + 1.0)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Heat map of `values[i][k]` over `xs[i]`, `ys[k]`.
pub fn heatmap(title: &str, xlabel: &str, ylabel: &str, xs: &[f64], ys: &[f64], values: &[Vec<Option<f64>>]) -> String {
    let xr = extent(xs.iter().copied());
    let yr = extent(ys.iter().copied());
    let vr = extent(values.iter().flatten().flatten().copied());
    let mut out = String::new();
    frame(&mut out, title, xlabel, ylabel, xr, yr);
    let cw = (W - 2.0 * M) / xs.len().max(1) as f64;
    let ch = (H - 2.0 * M) / ys.len().max(1) as f64;
    for (i, row) in values.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            let fill = match v {
                Some(v) => {
                    let s = ((v - vr.0) / (vr.1 - vr.0)).clamp(0.0, 1.0);
                    format!("rgb({},{},{})", (255.0 * s) as u8, (80.0 + 100.0 * (1.0 - (2.0 * s - 1.0).abs())) as u8, (255.0 * (1.0 - s)) as u8)
                }
                None => "#888888".to_string(),
            };
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                M + i as f64 * cw,
                H - M - (k as f64 + 1.0) * ch,
                cw + 0.3,
                ch + 0.3
            );
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="end">range [{:.4}, {:.4}]</text>"#,
        W - M,
        H - 25.0,
        vr.0,
        vr.1
    );
    out.push_str("</svg>\n");
    out
}
