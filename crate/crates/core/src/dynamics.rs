//! Unitary charging dynamics and the battery figures of merit.
//!
//! Inside the charging window the state evolves under the static `H`, so
//! `ψ(t) = V e^{−iΛt} Vᵀ ψ(0)` is available in closed form at any `t`. The
//! stored energy, power, fluctuation and inversion are read off `ψ(t)` with
//! `H₀ = ω_a J_z`, which is diagonal in the product basis.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hilbert::{HilbertSpace, OperatorMatrix};
use crate::model::{build_h_total, ModelParams};
use crate::optimize::golden_section_max;
use crate::spectral::{decompose_block_containing, SpectralDecomposition};

/// Default coarse-grid resolution for extremum searches and traces.
pub const DEFAULT_COARSE_POINTS: usize = 2000;
/// Default time tolerance of the golden-section refinement (units 1/ω_a).
pub const DEFAULT_REFINE_TOLERANCE: f64 = 1e-6;
/// Horizon prefactor: `T = c / (ω_c g √N)`, clipped to `[HORIZON_MIN, HORIZON_MAX]`.
pub const HORIZON_COUPLING_PERIODS: f64 = 3.6;
pub const HORIZON_MIN: f64 = 10.0;
pub const HORIZON_MAX: f64 = 1000.0;

// Variances more negative than this (relative to ω_a² j²) are reported as errors.
const VARIANCE_SLACK: f64 = 1e-10;
// Number of time points evaluated per matrix product.
const TIME_CHUNK: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn new(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Real basis vector `|idx⟩`.
    pub fn basis(dim: usize, idx: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨ψ|A|ψ⟩` for a real operator; the imaginary part is returned too.
    pub fn expectation_complex(&self, op: &OperatorMatrix) -> Complex64 {
        let d = self.dim();
        let m = op.mat();
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..d {
            let psi_k = self.amplitudes[k];
            if psi_k == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = m.col(k);
            let mut inner = Complex64::new(0.0, 0.0);
            for i in 0..d {
                let v = col[i];
                if v != 0.0 {
                    inner += self.amplitudes[i].conj() * v;
                }
            }
            acc += inner * psi_k;
        }
        acc
    }

    /// Real expectation of a Hermitian operator.
    pub fn expectation(&self, op: &OperatorMatrix) -> f64 {
        let z = self.expectation_complex(op);
        debug_assert!(
            z.im.abs() <= 1e-10 * z.re.abs().max(1.0),
            "imaginary expectation residue {}",
            z.im
        );
        z.re
    }

    /// `A|ψ⟩` for a real operator.
    pub fn apply(&self, op: &OperatorMatrix) -> QuantumState {
        let re: Vec<f64> = self.amplitudes.iter().map(|a| a.re).collect();
        let im: Vec<f64> = self.amplitudes.iter().map(|a| a.im).collect();
        let out_re = op.apply(&re);
        let out_im = op.apply(&im);
        QuantumState::new(
            out_re
                .into_iter()
                .zip(out_im)
                .map(|(r, i)| Complex64::new(r, i))
                .collect(),
        )
    }
}

/// `|N photons⟩ ⊗ |j = N/2, m = −N/2⟩`: every two-level system in its ground state.
pub fn initial_state(space: &HilbertSpace) -> Result<QuantumState> {
    let n = space.n_tls();
    if space.n_ph_max() < n {
        return Err(Error::InvalidParameter(format!(
            "photon cutoff {} is below the initial photon number {n}",
            space.n_ph_max()
        )));
    }
    let idx = space.index_of(n, -space.j())?;
    Ok(QuantumState::basis(space.dim(), idx))
}

impl SpectralDecomposition {
    /// `ψ(t) = V e^{−iΛt} Vᵀ ψ₀`.
    pub fn evolve(&self, psi0: &QuantumState, t: f64) -> QuantumState {
        let v = self.eigenvectors();
        let d = psi0.dim();
        let lambda = self.eigenvalues();
        let mut coeff = vec![Complex64::new(0.0, 0.0); d];
        for (j, c) in coeff.iter_mut().enumerate() {
            let col = v.col(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..d {
                acc += psi0.amplitudes[i] * col[i];
            }
            *c = acc * Complex64::from_polar(1.0, -lambda[j] * t);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (j, c) in coeff.iter().enumerate() {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = v.col(j);
            for i in 0..d {
                out[i] += c * col[i];
            }
        }
        QuantumState::new(out)
    }
}

/// `E(t) = ⟨ψ(t)|H₀|ψ(t)⟩ − ⟨ψ(0)|H₀|ψ(0)⟩`.
pub fn stored_energy(psi_t: &QuantumState, psi0: &QuantumState, h0: &OperatorMatrix) -> f64 {
    psi_t.expectation(h0) - psi0.expectation(h0)
}

/// `P(t) = E(t)/t`, with `P(0) = 0`.
pub fn charging_power(energy: f64, t: f64) -> f64 {
    if t > 0.0 {
        energy / t
    } else {
        0.0
    }
}

fn std_dev(mean: f64, mean_sq: f64, scale: f64) -> Result<f64> {
    let var = mean_sq - mean * mean;
    if var < -VARIANCE_SLACK * scale.max(1.0) {
        return Err(Error::NegativeVariance(var));
    }
    Ok(var.max(0.0).sqrt())
}

/// `Σ(t) = |ΔH₀(t) − ΔH₀(0)|` with `ΔH₀` the standard deviation of `H₀`.
pub fn energy_fluctuation(
    psi_t: &QuantumState,
    psi0: &QuantumState,
    h0: &OperatorMatrix,
) -> Result<f64> {
    let h0_sq = h0.matmul(h0);
    let scale = h0.max_abs().powi(2);
    let sd_t = std_dev(psi_t.expectation(h0), psi_t.expectation(&h0_sq), scale)?;
    let sd_0 = std_dev(psi0.expectation(h0), psi0.expectation(&h0_sq), scale)?;
    Ok((sd_t - sd_0).abs())
}

/// Observables at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub energy: f64,
    pub power: f64,
    pub fluctuation: f64,
    /// `⟨J_z⟩ / (N/2)`.
    pub sz_ratio: f64,
    /// `‖ψ(t)‖`.
    pub norm: f64,
}

/// Time-search settings for traces and extremum searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargingProtocol {
    /// `None` picks `HORIZON_COUPLING_PERIODS / (ω_c g √N)` clipped to
    /// `[HORIZON_MIN, HORIZON_MAX]`.
    #[serde(default)]
    pub search_horizon: Option<f64>,
    #[serde(default = "default_points")]
    pub coarse_points: usize,
    #[serde(default = "default_tol")]
    pub refine_tolerance: f64,
}

fn default_points() -> usize {
    DEFAULT_COARSE_POINTS
}

fn default_tol() -> f64 {
    DEFAULT_REFINE_TOLERANCE
}

impl Default for ChargingProtocol {
    fn default() -> Self {
        Self {
            search_horizon: None,
            coarse_points: DEFAULT_COARSE_POINTS,
            refine_tolerance: DEFAULT_REFINE_TOLERANCE,
        }
    }
}

impl ChargingProtocol {
    pub fn with_horizon(horizon: f64) -> Self {
        Self {
            search_horizon: Some(horizon),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(h) = self.search_horizon {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidParameter(
                    "search_horizon must be positive and finite".into(),
                ));
            }
        }
        if self.coarse_points < 100 {
            return Err(Error::InvalidParameter(
                "coarse_points must be at least 100".into(),
            ));
        }
        if !(self.refine_tolerance > 0.0) {
            return Err(Error::InvalidParameter(
                "refine_tolerance must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Horizon actually scanned for `params`.
    pub fn horizon(&self, params: &ModelParams) -> f64 {
        self.search_horizon
            .unwrap_or_else(|| default_horizon(params))
    }

    pub fn grid(&self, params: &ModelParams) -> Vec<f64> {
        let t_max = self.horizon(params);
        let m = self.coarse_points;
        (0..=m).map(|i| t_max * i as f64 / m as f64).collect()
    }
}

/// Collective-coupling timescale heuristic for the search horizon.
pub fn default_horizon(params: &ModelParams) -> f64 {
    let rate = params.omega_c * params.g * (params.n_tls as f64).sqrt();
    if rate > 0.0 {
        (HORIZON_COUPLING_PERIODS / rate).clamp(HORIZON_MIN, HORIZON_MAX)
    } else {
        HORIZON_MAX
    }
}

/// Closed-form evolution of the charging initial state.
///
/// Only eigenvectors with nonzero overlap on `ψ(0)` are kept, restricted to the
/// basis rows of the block `ψ(0)` lives in; everything else contributes
/// exactly zero.
#[derive(Debug, Clone)]
pub struct ChargingDynamics {
    params: ModelParams,
    space: HilbertSpace,
    freqs: Vec<f64>,
    coeffs: Vec<f64>,
    /// `vectors[(r, k)]`: row `rows[r]` of retained eigenvector `k`.
    vectors: Mat<f64>,
    m_values: Vec<f64>,
    initial_m: f64,
    total_energy: f64,
}

impl ChargingDynamics {
    /// Builds `H`, diagonalizes the block holding `ψ(0)` and projects onto it.
    pub fn new(params: &ModelParams) -> Result<Self> {
        let space = params.space()?;
        let h = build_h_total(params, &space)?;
        let start = space.index_of(space.n_tls(), -space.j())?;
        let block = decompose_block_containing(&h, start)?;
        let local = block
            .rows
            .binary_search(&start)
            .expect("block contains its seed row");
        let v = &block.eigenvectors;
        Ok(Self::assemble(
            params,
            space,
            &block.rows,
            |r, k| v[(r, k)],
            &block.eigenvalues,
            local,
        ))
    }

    pub fn from_decomposition(params: &ModelParams, dec: &SpectralDecomposition) -> Result<Self> {
        let space = *dec.space();
        initial_state(&space)?;
        let start = space.index_of(space.n_tls(), -space.j())?;
        let block = dec.row_block(start);
        let v = dec.eigenvectors();
        let rows: Vec<usize> = (0..space.dim())
            .filter(|&r| dec.row_block(r) == block)
            .collect();
        let cols: Vec<usize> = (0..space.dim())
            .filter(|&k| dec.eig_block(k) == block)
            .collect();
        let values: Vec<f64> = cols.iter().map(|&k| dec.eigenvalues()[k]).collect();
        let local = rows.binary_search(&start).expect("start row in its block");
        Ok(Self::assemble(
            params,
            space,
            &rows,
            |r, k| v[(rows[r], cols[k])],
            &values,
            local,
        ))
    }

    /// `vec(r, k)` is entry `r` (local to `rows`) of block eigenvector `k`.
    fn assemble(
        params: &ModelParams,
        space: HilbertSpace,
        rows: &[usize],
        vec: impl Fn(usize, usize) -> f64,
        values: &[f64],
        local_start: usize,
    ) -> Self {
        let cols: Vec<usize> = (0..values.len())
            .filter(|&k| vec(local_start, k) != 0.0)
            .collect();
        let vectors = Mat::from_fn(rows.len(), cols.len(), |r, k| vec(r, cols[k]));
        let freqs: Vec<f64> = cols.iter().map(|&k| values[k]).collect();
        let coeffs: Vec<f64> = cols.iter().map(|&k| vec(local_start, k)).collect();
        let total_energy = freqs
            .iter()
            .zip(&coeffs)
            .map(|(l, c)| l * c * c)
            .sum();
        Self {
            params: *params,
            space,
            m_values: rows.iter().map(|&r| space.m_of(r)).collect(),
            freqs,
            coeffs,
            vectors,
            initial_m: -space.j(),
            total_energy,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// `⟨ψ(0)|H|ψ(0)⟩`, conserved by the evolution.
    pub fn total_energy(&self) -> f64 {
        self.total_energy
    }

    /// Number of eigenstates participating in the dynamics.
    pub fn active_modes(&self) -> usize {
        self.freqs.len()
    }

    /// Observables on an arbitrary list of times.
    pub fn sample_many(&self, times: &[f64], exec: Exec) -> Result<Vec<Sample>> {
        let chunks: Vec<&[f64]> = times.chunks(TIME_CHUNK).collect();
        let parts = exec.map(&chunks, |chunk| self.sample_chunk(chunk));
        let mut out = Vec::with_capacity(times.len());
        for part in parts {
            out.extend(part?);
        }
        Ok(out)
    }

    pub fn sample(&self, t: f64) -> Result<Sample> {
        Ok(self.sample_chunk(&[t])?[0])
    }

    /// Stored energy alone; cheaper entry point for the refinement searches.
    pub fn energy(&self, t: f64) -> f64 {
        let (mz, _, _) = self.moments(t);
        self.params.omega_a * (mz - self.initial_m)
    }

    fn moments(&self, t: f64) -> (f64, f64, f64) {
        let k = self.freqs.len();
        let mut re = vec![0.0; k];
        let mut im = vec![0.0; k];
        for j in 0..k {
            let (s, c) = (self.freqs[j] * t).sin_cos();
            re[j] = self.coeffs[j] * c;
            im[j] = -self.coeffs[j] * s;
        }
        let (mut mz, mut mz2, mut norm) = (0.0, 0.0, 0.0);
        for (r, &m) in self.m_values.iter().enumerate() {
            let row = self.vectors.row(r);
            let (mut a, mut b) = (0.0, 0.0);
            for j in 0..k {
                let v = row[j];
                a += v * re[j];
                b += v * im[j];
            }
            let p = a * a + b * b;
            norm += p;
            mz += p * m;
            mz2 += p * m * m;
        }
        (mz, mz2, norm)
    }

    fn sample_chunk(&self, times: &[f64]) -> Result<Vec<Sample>> {
        let k = self.freqs.len();
        let nt = times.len();
        let mut phase_re = Mat::<f64>::zeros(k, nt);
        let mut phase_im = Mat::<f64>::zeros(k, nt);
        for (c, &t) in times.iter().enumerate() {
            for j in 0..k {
                let (s, co) = (self.freqs[j] * t).sin_cos();
                phase_re[(j, c)] = self.coeffs[j] * co;
                phase_im[(j, c)] = -self.coeffs[j] * s;
            }
        }
        let psi_re = &self.vectors * &phase_re;
        let psi_im = &self.vectors * &phase_im;
        let wa = self.params.omega_a;
        let j = self.space.j();
        let scale = wa * wa * j * j;
        times
            .iter()
            .enumerate()
            .map(|(c, &t)| {
                let (mut mz, mut mz2, mut norm) = (0.0, 0.0, 0.0);
                let col_re = psi_re.col(c);
                let col_im = psi_im.col(c);
                for (r, &m) in self.m_values.iter().enumerate() {
                    let p = col_re[r] * col_re[r] + col_im[r] * col_im[r];
                    norm += p;
                    mz += p * m;
                    mz2 += p * m * m;
                }
                self.to_sample(t, mz, mz2, norm, scale)
            })
            .collect()
    }

    fn to_sample(&self, t: f64, mz: f64, mz2: f64, norm: f64, scale: f64) -> Result<Sample> {
        if t == 0.0 {
            // e^{-iH·0} is the identity; report ψ(0) exactly rather than the
            // round-off of V·Vᵀ.
            return Ok(Sample {
                t,
                energy: 0.0,
                power: 0.0,
                fluctuation: 0.0,
                sz_ratio: self.initial_m / self.space.j(),
                norm: 1.0,
            });
        }
        let wa = self.params.omega_a;
        // ψ(0) is a J_z eigenstate, so the initial spread drops out of Σ.
        let sd = std_dev(wa * mz, wa * wa * mz2, scale)?;
        let energy = wa * (mz - self.initial_m);
        Ok(Sample {
            t,
            energy,
            power: charging_power(energy, t),
            fluctuation: sd,
            sz_ratio: mz / self.space.j(),
            norm: norm.sqrt(),
        })
    }

    /// `Σ(t)` alone.
    pub fn fluctuation(&self, t: f64) -> Result<f64> {
        let (mz, mz2, _) = self.moments(t);
        let wa = self.params.omega_a;
        let j = self.space.j();
        std_dev(wa * mz, wa * wa * mz2, wa * wa * j * j)
    }

    /// Samples the protocol's coarse grid.
    pub fn trace(&self, protocol: &ChargingProtocol, exec: Exec) -> Result<ChargingTrace> {
        protocol.validate()?;
        let times = protocol.grid(&self.params);
        let samples = self.sample_many(&times, exec)?;
        Ok(ChargingTrace::from_samples(self.params, &samples))
    }

    /// Maximum stored energy and power over the horizon, refined by
    /// golden-section search around the best coarse-grid point.
    pub fn extrema(&self, protocol: &ChargingProtocol, exec: Exec) -> Result<ExtremumReport> {
        protocol.validate()?;
        let times = protocol.grid(&self.params);
        let samples = self.sample_many(&times, exec)?;
        self.refine(&times, &samples, protocol)
    }

    /// Maximum power alone.
    ///
    /// Since `E(t) ≤ N ω_a`, no grid point beyond `t = N ω_a / P` can beat a
    /// power `P` already found, so the scan stops there. The result equals the
    /// power part of [`extrema`](Self::extrema).
    pub fn max_power(&self, protocol: &ChargingProtocol) -> Result<PowerMaximum> {
        protocol.validate()?;
        let times = protocol.grid(&self.params);
        let bound = self.params.omega_a * self.params.n_tls as f64;
        let mut samples: Vec<Sample> = Vec::with_capacity(times.len());
        let mut best = 0.0f64;
        for chunk in times.chunks(TIME_CHUNK) {
            let part = self.sample_chunk(chunk)?;
            best = part.iter().map(|s| s.power).fold(best, f64::max);
            samples.extend(part);
            let reached = samples.last().map_or(0.0, |s| s.t);
            if best > 0.0 && reached * best > bound * (1.0 + 1e-9) {
                break;
            }
        }
        let scanned = samples.len();
        let (t_p, p_max, ip) = self.refine_power(&times[..scanned], &samples, protocol);
        let mut warnings = Vec::new();
        if ip == times.len() - 1 {
            warnings.push(horizon_warning("power", times[ip]));
        }
        Ok(PowerMaximum {
            p_max,
            t_p,
            horizon: times[times.len() - 1],
            scanned,
            warnings,
        })
    }

    /// Refined power maximum on the scanned prefix; also returns the grid argmax.
    fn refine_power(
        &self,
        times: &[f64],
        samples: &[Sample],
        protocol: &ChargingProtocol,
    ) -> (f64, f64, usize) {
        let last = times.len() - 1;
        let ip = grid_argmax(samples, |s| s.power);
        let lo = times[ip - 1].max(times[1] * 1e-3);
        let hi = times[(ip + 1).min(last)];
        let (mut t_p, mut p_max) = golden_section_max(
            |t| charging_power(self.energy(t), t),
            lo,
            hi,
            protocol.refine_tolerance,
        );
        if samples[ip].power > p_max {
            t_p = times[ip];
            p_max = samples[ip].power;
        }
        (t_p, p_max, ip)
    }

    fn refine(
        &self,
        times: &[f64],
        samples: &[Sample],
        protocol: &ChargingProtocol,
    ) -> Result<ExtremumReport> {
        let last = times.len() - 1;
        let ie = grid_argmax(samples, |s| s.energy);
        let (lo, hi) = (times[ie - 1], times[(ie + 1).min(last)]);
        let (mut t_e, mut e_max) =
            golden_section_max(|t| self.energy(t), lo, hi, protocol.refine_tolerance);
        if samples[ie].energy > e_max {
            t_e = times[ie];
            e_max = samples[ie].energy;
        }
        let (t_p, p_max, ip) = self.refine_power(times, samples, protocol);

        let mut warnings = Vec::new();
        if ie == last {
            warnings.push(horizon_warning("energy", times[last]));
        }
        if ip == last {
            warnings.push(horizon_warning("power", times[last]));
        }
        Ok(ExtremumReport {
            e_max,
            t_e,
            p_max,
            t_p,
            energy_at_t_p: self.energy(t_p),
            sigma_bar: self.fluctuation(t_e)?,
            horizon: times[last],
            warnings,
        })
    }
}

/// First index (excluding `t = 0`) where `f` is largest.
fn grid_argmax(samples: &[Sample], f: impl Fn(&Sample) -> f64) -> usize {
    let mut best = 1usize;
    for i in 2..samples.len() {
        if f(&samples[i]) > f(&samples[best]) {
            best = i;
        }
    }
    best
}

fn horizon_warning(what: &str, t: f64) -> String {
    format!("{what} maximum on the search horizon t = {t:.6}; extend the horizon")
}

/// Result of [`ChargingDynamics::max_power`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerMaximum {
    pub p_max: f64,
    pub t_p: f64,
    pub horizon: f64,
    /// Coarse-grid points evaluated before the bound cut the scan off.
    pub scanned: usize,
    pub warnings: Vec<String>,
}

/// Time series of the battery observables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargingTrace {
    pub params: ModelParams,
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub power: Vec<f64>,
    pub fluctuation: Vec<f64>,
    pub sz: Vec<f64>,
    pub norm: Vec<f64>,
}

impl ChargingTrace {
    fn from_samples(params: ModelParams, samples: &[Sample]) -> Self {
        Self {
            params,
            times: samples.iter().map(|s| s.t).collect(),
            energy: samples.iter().map(|s| s.energy).collect(),
            power: samples.iter().map(|s| s.power).collect(),
            fluctuation: samples.iter().map(|s| s.fluctuation).collect(),
            sz: samples.iter().map(|s| s.sz_ratio).collect(),
            norm: samples.iter().map(|s| s.norm).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Grid maximum of the stored energy.
    pub fn max_energy(&self) -> f64 {
        self.energy.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Best stored energy and power over the search horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremumReport {
    /// `E_max` (units ω_a).
    pub e_max: f64,
    pub t_e: f64,
    /// `P_max` (units ω_a²).
    pub p_max: f64,
    pub t_p: f64,
    /// `E(t_P)`, equal to `p_max * t_p`.
    pub energy_at_t_p: f64,
    /// `Σ(t_E)` (units ω_a).
    pub sigma_bar: f64,
    pub horizon: f64,
    pub warnings: Vec<String>,
}

impl ExtremumReport {
    /// `P_max / g`, the power in units of g·ω_a².
    pub fn p_max_normalized(&self, g: f64) -> f64 {
        self.p_max / g
    }
}

/// Builds the dynamics for `params` and returns its trace.
pub fn trace(params: &ModelParams, protocol: &ChargingProtocol, exec: Exec) -> Result<ChargingTrace> {
    ChargingDynamics::new(params)?.trace(protocol, exec)
}

/// Builds the dynamics for `params` and returns its extrema.
pub fn find_extrema(
    params: &ModelParams,
    protocol: &ChargingProtocol,
    exec: Exec,
) -> Result<ExtremumReport> {
    ChargingDynamics::new(params)?.extrema(protocol, exec)
}
