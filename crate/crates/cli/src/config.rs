//! Run configuration: one JSON document, overridden by command-line flags.
//!
//! Precedence is flags > config file > built-in defaults. `params` and
//! `protocol` are merged key by key at the JSON level before being parsed, so
//! any field of either may come from any layer.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use qbattery::{Axis, ChargingProtocol, ModelParams, Quantity, SweepAxis};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{CliResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Trace,
    Extrema,
    Sweep,
    Scaling,
    Phase,
    Convergence,
    Reproduce,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Trace => "trace",
            Command::Extrema => "extrema",
            Command::Sweep => "sweep",
            Command::Scaling => "scaling",
            Command::Phase => "phase",
            Command::Convergence => "convergence",
            Command::Reproduce => "reproduce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DriveArg {
    LadderSum,
    Jx,
}

/// Flags that override individual config fields.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Number of two-level systems
    #[arg(long = "n")]
    pub n_tls: Option<usize>,
    /// Cavity coupling g
    #[arg(long)]
    pub g: Option<f64>,
    /// Interaction strength η
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Drive strength Ω
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub omega_a: Option<f64>,
    #[arg(long)]
    pub omega_c: Option<f64>,
    /// Photon cutoff as a multiple of N
    #[arg(long)]
    pub cutoff_factor: Option<usize>,
    #[arg(long, value_enum)]
    pub drive_term: Option<DriveArg>,
    /// Search horizon in units of 1/ω_a
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub coarse_points: Option<usize>,
    #[arg(long)]
    pub refine_tolerance: Option<f64>,
    /// Sweep quantity: e_max, p_max, sigma_bar or gs_sz
    #[arg(long)]
    pub quantity: Option<String>,
    /// Comma-separated N values for scaling runs
    #[arg(long, value_delimiter = ',')]
    pub n_values: Option<Vec<usize>>,
    /// Comma-separated cutoff factors for convergence runs
    #[arg(long, value_delimiter = ',')]
    pub factors: Option<Vec<usize>>,
    /// Comma-separated reproduction jobs
    #[arg(long, value_delimiter = ',')]
    pub jobs: Option<Vec<String>>,
    /// Comma-separated output formats (csv, json, svg)
    #[arg(long, value_delimiter = ',', value_enum)]
    pub formats: Option<Vec<Format>>,
}

/// Either explicit values or an inclusive linear range.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    List { axis: Axis, values: Vec<f64> },
    Range { axis: Axis, start: f64, stop: f64, count: usize },
}

impl AxisSpec {
    pub fn resolve(&self) -> SweepAxis {
        match self {
            AxisSpec::List { axis, values } => SweepAxis::new(*axis, values.clone()),
            AxisSpec::Range { axis, start, stop, count } => SweepAxis::linspace(*axis, *start, *stop, *count),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis1: AxisSpec,
    pub axis2: AxisSpec,
    #[serde(default = "default_quantity")]
    pub quantity: Quantity,
}

fn default_quantity() -> Quantity {
    Quantity::EMax
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSection {
    #[serde(default = "default_phase_g")]
    pub g: Vec<f64>,
    #[serde(default = "default_phase_eta")]
    pub eta: AxisSpec,
}

fn default_phase_g() -> Vec<f64> {
    vec![0.05, 0.1, 0.15, 0.2]
}

fn default_phase_eta() -> AxisSpec {
    AxisSpec::Range { axis: Axis::Eta, start: -3.0, stop: 3.0, count: 121 }
}

impl Default for PhaseSection {
    fn default() -> Self {
        Self { g: default_phase_g(), eta: default_phase_eta() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub label: String,
    /// Parameter overrides on top of the run's base parameters.
    #[serde(default)]
    pub params: Map<String, Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSection {
    #[serde(default = "default_n_values")]
    pub n_values: Vec<usize>,
    #[serde(default)]
    pub series: Vec<Series>,
}

fn default_n_values() -> Vec<usize> {
    (1..=30).collect()
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self { n_values: default_n_values(), series: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    #[serde(default = "default_factors")]
    pub factors: Vec<usize>,
}

fn default_factors() -> Vec<usize> {
    vec![2, 3, 4, 5]
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self { factors: default_factors() }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproduceSection {
    /// Empty means every job.
    #[serde(default)]
    pub jobs: Vec<String>,
}

/// The config file as written.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<Command>,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub protocol: Map<String, Value>,
    pub sweep: Option<SweepSection>,
    pub phase: Option<PhaseSection>,
    pub scaling: Option<ScalingSection>,
    pub convergence: Option<ConvergenceSection>,
    pub reproduce: Option<ReproduceSection>,
    pub formats: Option<Vec<Format>>,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        if text.trim().is_empty() {
            return Err(Failure::Usage(format!("{}: configuration is empty", path.display())));
        }
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: ModelParams,
    pub protocol: ChargingProtocol,
    pub sweep: Option<SweepSection>,
    pub phase: PhaseSection,
    pub scaling: ScalingSection,
    pub convergence: ConvergenceSection,
    pub reproduce: ReproduceSection,
    pub formats: Vec<Format>,
    pub output_dir: PathBuf,
    pub threads: Option<usize>,
}

fn default_params() -> Map<String, Value> {
    let Value::Object(map) = json!({ "n_tls": 10, "g": 0.5 }) else { unreachable!() };
    map
}

fn merge(into: &mut Map<String, Value>, from: &Map<String, Value>) {
    for (k, v) in from {
        into.insert(k.clone(), v.clone());
    }
}

fn set<T: Serialize>(map: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        map.insert(key.to_string(), json!(v));
    }
}

pub fn parse_params(map: Map<String, Value>) -> CliResult<ModelParams> {
    let params: ModelParams =
        serde_json::from_value(Value::Object(map)).map_err(|e| Failure::Usage(format!("params: {e}")))?;
    params.validate()?;
    Ok(params)
}

impl RunConfig {
    pub fn resolve(
        command: Command,
        file: FileConfig,
        flags: &Overrides,
        out: Option<PathBuf>,
        threads: Option<usize>,
    ) -> CliResult<Self> {
        if let Some(c) = file.command {
            if c != command {
                return Err(Failure::Usage(format!(
                    "config is for `{}` but `{}` was requested",
                    c.name(),
                    command.name()
                )));
            }
        }

        let mut params = default_params();
        merge(&mut params, &file.params);
        set(&mut params, "n_tls", flags.n_tls);
        set(&mut params, "g", flags.g);
        set(&mut params, "eta", flags.eta);
        set(&mut params, "omega_drive", flags.omega);
        set(&mut params, "omega_a", flags.omega_a);
        set(&mut params, "omega_c", flags.omega_c);
        set(&mut params, "cutoff_factor", flags.cutoff_factor);
        set(
            &mut params,
            "drive_term",
            flags.drive_term.map(|d| match d {
                DriveArg::LadderSum => "ladder_sum",
                DriveArg::Jx => "jx",
            }),
        );
        let base_params = params.clone();
        let params = parse_params(params)?;

        let mut protocol = file.protocol.clone();
        set(&mut protocol, "search_horizon", flags.horizon);
        set(&mut protocol, "coarse_points", flags.coarse_points);
        set(&mut protocol, "refine_tolerance", flags.refine_tolerance);
        let protocol: ChargingProtocol = serde_json::from_value(Value::Object(protocol))
            .map_err(|e| Failure::Usage(format!("protocol: {e}")))?;
        protocol.validate()?;

        let mut sweep = file.sweep;
        if let Some(q) = &flags.quantity {
            let q = Quantity::parse(q).ok_or_else(|| Failure::Usage(format!("unknown quantity `{q}`")))?;
            match sweep.as_mut() {
                Some(s) => s.quantity = q,
                None => return Err(Failure::Usage("--quantity needs a `sweep` section in the config".into())),
            }
        }

        let mut scaling = file.scaling.unwrap_or_default();
        if let Some(n) = &flags.n_values {
            scaling.n_values = n.clone();
        }
        for s in &scaling.series {
            let mut m = base_params.clone();
            merge(&mut m, &s.params);
            parse_params(m).map_err(|e| Failure::Usage(format!("series `{}`: {e}", s.label)))?;
        }
        let mut convergence = file.convergence.unwrap_or_default();
        if let Some(f) = &flags.factors {
            convergence.factors = f.clone();
        }
        let mut reproduce = file.reproduce.unwrap_or_default();
        if let Some(j) = &flags.jobs {
            reproduce.jobs = j.clone();
        }

        let formats = flags
            .formats
            .clone()
            .or(file.formats)
            .unwrap_or_else(|| vec![Format::Csv, Format::Json, Format::Svg]);
        let output_dir = out.or(file.output_dir).unwrap_or_else(|| PathBuf::from("qb-out"));

        Ok(Self {
            command,
            params,
            protocol,
            sweep,
            phase: file.phase.unwrap_or_default(),
            scaling,
            convergence,
            reproduce,
            formats,
            output_dir,
            threads: threads.or(file.threads),
        })
    }

    /// Base parameters with a series' overrides applied.
    pub fn series_params(&self, series: &Series) -> CliResult<ModelParams> {
        let Value::Object(mut m) = serde_json::to_value(self.params).expect("params serialize") else {
            unreachable!()
        };
        merge(&mut m, &series.params);
        parse_params(m)
    }

    pub fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> FileConfig {
        serde_json::from_str(text).unwrap()
    }

    #[test]
    fn precedence_flags_over_config_over_defaults() {
        let cfg = file(r#"{"params": {"g": 0.1, "eta": 2.0}, "protocol": {"coarse_points": 500}}"#);
        let flags = Overrides { eta: Some(-1.0), ..Default::default() };
        let run = RunConfig::resolve(Command::Trace, cfg, &flags, None, None).unwrap();
        assert_eq!(run.params.n_tls, 10);
        assert_eq!(run.params.g, 0.1);
        assert_eq!(run.params.eta, -1.0);
        assert_eq!(run.protocol.coarse_points, 500);
        assert_eq!(run.output_dir, PathBuf::from("qb-out"));
    }

    #[test]
    fn axis_specs() {
        let s: SweepSection = serde_json::from_str(
            r#"{"axis1": {"axis": "g", "values": [0.1, 0.5]},
                "axis2": {"axis": "eta", "start": -1, "stop": 1, "count": 5},
                "quantity": "p_max"}"#,
        )
        .unwrap();
        assert_eq!(s.axis1.resolve().values, vec![0.1, 0.5]);
        assert_eq!(s.axis2.resolve().values.len(), 5);
        assert_eq!(s.quantity, Quantity::PMax);
    }

    #[test]
    fn rejects_unknown_fields_and_mismatched_command() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"parms": {}}"#).is_err());
        let cfg = file(r#"{"command": "sweep"}"#);
        let err = RunConfig::resolve(Command::Trace, cfg, &Overrides::default(), None, None).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn invalid_params_are_usage_errors() {
        let cfg = file(r#"{"params": {"g": -1.0}}"#);
        let err = RunConfig::resolve(Command::Trace, cfg, &Overrides::default(), None, None).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
