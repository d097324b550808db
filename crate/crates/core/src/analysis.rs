//! Parameter sweeps, ground-state inversion, the critical interaction line,
//! power-law scaling fits and photon-cutoff audits.

use serde::{Deserialize, Serialize};

use crate::dynamics::{ChargingDynamics, ChargingProtocol, PowerMaximum};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{build_h_total, ModelParams};
use crate::spectral::decompose;

/// Ground states closer than this are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Parameter a sweep axis varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    G,
    Eta,
    OmegaDrive,
    NTls,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::G => "g",
            Axis::Eta => "eta",
            Axis::OmegaDrive => "omega_drive",
            Axis::NTls => "n_tls",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "g" => Some(Axis::G),
            "eta" => Some(Axis::Eta),
            "omega_drive" | "omega" | "drive" => Some(Axis::OmegaDrive),
            "n_tls" | "n" | "N" => Some(Axis::NTls),
            _ => None,
        }
    }

    /// Copy of `base` with this axis set to `value`.
    pub fn apply(self, base: &ModelParams, value: f64) -> Result<ModelParams> {
        let mut p = *base;
        match self {
            Axis::G => p.g = value,
            Axis::Eta => p.eta = value,
            Axis::OmegaDrive => p.omega_drive = value,
            Axis::NTls => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "n_tls axis value {value} is not a positive integer"
                    )));
                }
                p.n_tls = value as usize;
            }
        }
        Ok(p)
    }
}

/// Quantity evaluated in each sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    EMax,
    PMax,
    SigmaBar,
    GsSz,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::EMax => "e_max",
            Quantity::PMax => "p_max",
            Quantity::SigmaBar => "sigma_bar",
            Quantity::GsSz => "gs_sz",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "e_max" => Some(Quantity::EMax),
            "p_max" => Some(Quantity::PMax),
            "sigma_bar" => Some(Quantity::SigmaBar),
            "gs_sz" => Some(Quantity::GsSz),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub axis: Axis,
    pub values: Vec<f64>,
}

impl SweepAxis {
    pub fn new(axis: Axis, values: Vec<f64>) -> Self {
        Self { axis, values }
    }

    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(axis: Axis, start: f64, stop: f64, count: usize) -> Self {
        let values = match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect(),
        };
        Self { axis, values }
    }

    fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "axis {} has no values",
                self.axis.name()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "axis {} has non-finite values",
                self.axis.name()
            )));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "axis {} values must be strictly increasing",
                self.axis.name()
            )));
        }
        Ok(())
    }
}

/// Result of one sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub value: Option<f64>,
    pub error: Option<String>,
    pub warnings: Vec<String>,
}

/// Two-parameter scan of one quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub base: ModelParams,
    pub axis1: SweepAxis,
    pub axis2: SweepAxis,
    pub quantity: Quantity,
    /// Row-major: `cells[i1 * axis2.len() + i2]`.
    pub cells: Vec<Cell>,
}

impl SweepGrid {
    pub fn value(&self, i1: usize, i2: usize) -> Option<f64> {
        self.cells[i1 * self.axis2.values.len() + i2].value
    }

    pub fn failed_cells(&self) -> usize {
        self.cells.iter().filter(|c| c.value.is_none()).count()
    }

    /// Values as `axis1 × axis2` rows, `NaN` where a cell failed.
    pub fn values(&self) -> Vec<Vec<f64>> {
        let n2 = self.axis2.values.len();
        self.cells
            .chunks(n2)
            .map(|row| row.iter().map(|c| c.value.unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

/// One cell of a sweep: the requested figure of merit at `params`.
pub fn evaluate_quantity(
    params: &ModelParams,
    quantity: Quantity,
    protocol: &ChargingProtocol,
    exec: Exec,
) -> Result<(f64, Vec<String>)> {
    match quantity {
        Quantity::GsSz => {
            let gs = ground_state_sz(params)?;
            let warnings = if gs.degenerate {
                vec![format!("ground state degenerate (gap {:e})", gs.gap)]
            } else {
                Vec::new()
            };
            Ok((gs.ratio, warnings))
        }
        _ => {
            let rep = ChargingDynamics::new(params)?.extrema(protocol, exec)?;
            let v = match quantity {
                Quantity::EMax => rep.e_max,
                Quantity::PMax => rep.p_max,
                Quantity::SigmaBar => rep.sigma_bar,
                Quantity::GsSz => unreachable!(),
            };
            Ok((v, rep.warnings))
        }
    }
}

/// Evaluates `quantity` on every `(axis1, axis2)` point. Cells are independent;
/// a failing cell is recorded and the rest of the grid still returned.
pub fn sweep(
    base: &ModelParams,
    axis1: SweepAxis,
    axis2: SweepAxis,
    quantity: Quantity,
    protocol: &ChargingProtocol,
    exec: Exec,
) -> Result<SweepGrid> {
    axis1.validate()?;
    axis2.validate()?;
    if axis1.axis == axis2.axis {
        return Err(Error::InvalidParameter(
            "sweep axes must name distinct parameters".into(),
        ));
    }
    protocol.validate()?;
    let points: Vec<(f64, f64)> = axis1
        .values
        .iter()
        .flat_map(|&a| axis2.values.iter().map(move |&b| (a, b)))
        .collect();
    // Cells run in parallel; each one evaluates its own time grid sequentially.
    let cells = exec.map(&points, |&(a, b)| {
        let run = || -> Result<(f64, Vec<String>)> {
            let p = axis1.axis.apply(base, a)?;
            let p = axis2.axis.apply(&p, b)?;
            evaluate_quantity(&p, quantity, protocol, Exec::Sequential)
        };
        match run() {
            Ok((v, warnings)) => Cell {
                value: Some(v),
                error: None,
                warnings,
            },
            Err(e) => Cell {
                value: None,
                error: Some(e.to_string()),
                warnings: Vec::new(),
            },
        }
    });
    Ok(SweepGrid {
        base: *base,
        axis1,
        axis2,
        quantity,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundStateInversion {
    /// `⟨J_z⟩ / (N/2)` in the lowest eigenvector of `H`.
    pub ratio: f64,
    pub energy: f64,
    pub gap: f64,
    pub degenerate: bool,
}

/// Scaled inversion of the ground state of the full `H = H₀ + H₁`.
pub fn ground_state_sz(params: &ModelParams) -> Result<GroundStateInversion> {
    let space = params.space()?;
    let h = build_h_total(params, &space)?;
    let dec = decompose(&h)?;
    let v = dec.eigenvectors();
    let mut jz = 0.0;
    for i in 0..space.dim() {
        let a = v[(i, 0)];
        jz += a * a * space.m_of(i);
    }
    let gap = dec.ground_gap();
    Ok(GroundStateInversion {
        ratio: jz / space.j(),
        energy: dec.eigenvalues()[0],
        gap,
        degenerate: gap < DEGENERACY_GAP,
    })
}

/// Critical interaction `η_c = ω_a − 4 g² N / ω_c` separating the normal and
/// "Mott" phases.
pub fn critical_eta(g: f64, n_tls: usize, omega_a: f64, omega_c: f64) -> f64 {
    omega_a - 4.0 * g * g * n_tls as f64 / omega_c
}

/// `P_max ≈ β N^α` fitted by least squares in log–log space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub n_values: Vec<f64>,
    pub p_max_values: Vec<f64>,
    pub alpha: f64,
    /// Prefactor `exp(intercept)` of the natural-log fit.
    pub beta: f64,
    /// Base-10 intercept exponentiated with base e, i.e. `β^{1/ln 10}`; the
    /// convention in which reference scaling tables quote the prefactor.
    pub beta_tabulated: f64,
    /// RMS of the natural-log residuals.
    pub residual: f64,
}

/// Ordinary least squares of `ln P` against `ln N`.
pub fn fit_power_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints(points.len()));
    }
    for &(n, p) in points {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "N = {n} must be finite and at least 1"
            )));
        }
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::NonPositive { n, value: p });
        }
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, p)| p.ln()).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "power-law fit needs at least two distinct N".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let alpha = sxy / sxx;
    let intercept = my - alpha * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - alpha * x).powi(2))
        .sum();
    Ok(ScalingFit {
        n_values: points.iter().map(|&(n, _)| n).collect(),
        p_max_values: points.iter().map(|&(_, p)| p).collect(),
        alpha,
        beta: intercept.exp(),
        beta_tabulated: (intercept / std::f64::consts::LN_10).exp(),
        residual: (rss / len).sqrt(),
    })
}

/// `P_max(N)` for each `N`, normalized to units of g·ω_a² (raw ω_a² when g = 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRun {
    pub params: ModelParams,
    pub n_values: Vec<usize>,
    pub reports: Vec<PowerMaximum>,
    pub p_max_normalized: Vec<f64>,
    pub fit: ScalingFit,
}

pub fn power_normalization(params: &ModelParams) -> f64 {
    if params.g > 0.0 {
        params.g
    } else {
        1.0
    }
}

/// Maximum charging power for each `N` and the power-law fit through it.
pub fn scaling_run(
    base: &ModelParams,
    n_values: &[usize],
    protocol: &ChargingProtocol,
    exec: Exec,
) -> Result<ScalingRun> {
    if n_values.windows(2).any(|w| w[0] >= w[1]) || n_values.first() == Some(&0) {
        return Err(Error::InvalidParameter(
            "N values must be strictly increasing and at least 1".into(),
        ));
    }
    // Largest N first so the expensive jobs start early.
    let mut order: Vec<usize> = n_values.to_vec();
    order.reverse();
    let results = exec.map(&order, |&n| {
        let p = ModelParams { n_tls: n, ..*base };
        ChargingDynamics::new(&p)?.max_power(protocol)
    });
    let mut reports = Vec::with_capacity(n_values.len());
    for r in results.into_iter().rev() {
        reports.push(r?);
    }
    let norm = power_normalization(base);
    let p_max_normalized: Vec<f64> = reports.iter().map(|r| r.p_max / norm).collect();
    let points: Vec<(f64, f64)> = n_values
        .iter()
        .zip(&p_max_normalized)
        .map(|(&n, &p)| (n as f64, p))
        .collect();
    let fit = fit_power_scaling(&points)?;
    Ok(ScalingRun {
        params: *base,
        n_values: n_values.to_vec(),
        reports,
        p_max_normalized,
        fit,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffRow {
    pub factor: usize,
    pub e_max: f64,
    pub p_max: f64,
    /// `|e_max − e_max(previous factor)|`, absent on the first row.
    pub delta_e_max: Option<f64>,
    pub delta_p_max: Option<f64>,
}

/// Extrema for increasing photon cutoffs `factor · N`.
pub fn cutoff_convergence(
    params: &ModelParams,
    factors: &[usize],
    protocol: &ChargingProtocol,
    exec: Exec,
) -> Result<Vec<CutoffRow>> {
    if factors.is_empty() || factors[0] == 0 || factors.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "cutoff factors must be strictly increasing and at least 1".into(),
        ));
    }
    // The horizon must not move with the cutoff.
    let protocol = ChargingProtocol {
        search_horizon: Some(protocol.horizon(params)),
        ..*protocol
    };
    let reports = exec.map(factors, |&f| {
        let p = params.with_cutoff_factor(f);
        ChargingDynamics::new(&p)?.extrema(&protocol, Exec::Sequential)
    });
    let mut rows: Vec<CutoffRow> = Vec::with_capacity(factors.len());
    for (&factor, rep) in factors.iter().zip(reports) {
        let rep = rep?;
        let prev = rows.last();
        rows.push(CutoffRow {
            factor,
            e_max: rep.e_max,
            p_max: rep.p_max,
            delta_e_max: prev.map(|r| (rep.e_max - r.e_max).abs()),
            delta_p_max: prev.map(|r| (rep.p_max - r.p_max).abs()),
        });
    }
    Ok(rows)
}

/// `η` between the two adjacent grid points with the largest jump in
/// `|ratio|` along one row of a ground-state scan.
pub fn steepest_jump(etas: &[f64], ratios: &[f64]) -> Option<f64> {
    let mut best: Option<(f64, f64)> = None;
    for i in 1..etas.len().min(ratios.len()) {
        let jump = (ratios[i].abs() - ratios[i - 1].abs()).abs();
        if best.is_none_or(|(j, _)| jump > j) {
            best = Some((jump, 0.5 * (etas[i] + etas[i - 1])));
        }
    }
    best.map(|(_, eta)| eta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_line() {
        assert!((critical_eta(0.1, 10, 1.0, 1.0) - 0.6).abs() < 1e-15);
        assert!((critical_eta(0.5, 10, 1.0, 1.0) + 9.0).abs() < 1e-15);
        assert_eq!(critical_eta(0.0, 10, 1.0, 1.0), 1.0);
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..=30)
            .map(|n| (n as f64, 2.0 * (n as f64).powf(1.5)))
            .collect();
        let fit = fit_power_scaling(&pts).unwrap();
        assert!((fit.alpha - 1.5).abs() < 1e-12);
        assert!((fit.beta - 2.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
        assert!((fit.beta_tabulated - (2f64.log10()).exp()).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(matches!(
            fit_power_scaling(&[(1.0, 1.0), (2.0, 2.0)]),
            Err(Error::TooFewPoints(2))
        ));
        assert!(matches!(
            fit_power_scaling(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]),
            Err(Error::NonPositive { .. })
        ));
        assert!(fit_power_scaling(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn free_ground_state_is_normal() {
        let gs = ground_state_sz(&ModelParams::resonant(6, 0.0, 0.0, 0.0)).unwrap();
        assert!((gs.ratio + 1.0).abs() < 1e-12);
        assert!(!gs.degenerate);
    }

    #[test]
    fn axis_application() {
        let base = ModelParams::resonant(4, 0.1, 0.0, 0.0);
        assert_eq!(Axis::Eta.apply(&base, 2.0).unwrap().eta, 2.0);
        assert_eq!(Axis::NTls.apply(&base, 7.0).unwrap().n_tls, 7);
        assert!(Axis::NTls.apply(&base, 2.5).is_err());
        assert_eq!(Axis::parse("omega_drive"), Some(Axis::OmegaDrive));
        assert_eq!(Quantity::parse("gs_sz"), Some(Quantity::GsSz));
    }

    #[test]
    fn sweep_isolates_failing_cells() {
        let base = ModelParams {
            max_dim: 60,
            ..ModelParams::resonant(2, 0.1, 0.0, 0.0)
        };
        let grid = sweep(
            &base,
            SweepAxis::new(Axis::NTls, vec![2.0, 3.0, 10.0]),
            SweepAxis::new(Axis::Eta, vec![0.0, 1.0]),
            Quantity::GsSz,
            &ChargingProtocol::default(),
            Exec::Parallel,
        )
        .unwrap();
        assert_eq!(grid.cells.len(), 6);
        assert_eq!(grid.failed_cells(), 2);
        assert!(grid.value(2, 0).is_none());
        assert!(grid.cells[4].error.as_ref().unwrap().contains("guard"));
        assert!(grid.value(0, 1).is_some());
    }

    #[test]
    fn sweep_rejects_duplicate_axes() {
        let base = ModelParams::resonant(2, 0.1, 0.0, 0.0);
        let r = sweep(
            &base,
            SweepAxis::new(Axis::Eta, vec![0.0]),
            SweepAxis::new(Axis::Eta, vec![1.0]),
            Quantity::EMax,
            &ChargingProtocol::default(),
            Exec::Sequential,
        );
        assert!(r.is_err());
    }

    #[test]
    fn steepest_jump_location() {
        let etas = [0.0, 0.2, 0.4, 0.6];
        let r = [-1.0, -0.95, -0.4, -0.3];
        assert!((steepest_jump(&etas, &r).unwrap() - 0.3).abs() < 1e-12);
    }
}
