//! Battery and charger Hamiltonians of the extended Dicke model.
//!
//! ```text
//! H₀ = ω_a J_z
//! H₁ = ω_c a†a + 2 ω_c g J_x (a† + a) + (η/N) J_z² + Ω D
//! ```
//!
//! with the drive operator `D` selected by [`DriveTerm`]. Energies are in units
//! of ω_a and ħ = 1.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{HilbertSpace, OperatorMatrix, DEFAULT_DIM_GUARD};

/// Normalization of the classical drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveTerm {
    /// `Ω (J₊ + J₋) = 2Ω J_x`: Ω multiplies the bare ladder elements. This is
    /// the normalization the reference drive data is quoted in.
    #[default]
    LadderSum,
    /// `Ω J_x`.
    Jx,
}

impl DriveTerm {
    /// Multiplier of `J_x` in the drive term.
    pub fn jx_factor(self) -> f64 {
        match self {
            DriveTerm::LadderSum => 2.0,
            DriveTerm::Jx => 1.0,
        }
    }
}

fn default_one() -> f64 {
    1.0
}

fn default_cutoff() -> usize {
    4
}

fn default_guard() -> usize {
    DEFAULT_DIM_GUARD
}

/// Physical parameters of one battery configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(default = "default_one")]
    pub omega_a: f64,
    #[serde(default = "default_one")]
    pub omega_c: f64,
    #[serde(default)]
    pub g: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub omega_drive: f64,
    pub n_tls: usize,
    #[serde(default = "default_cutoff")]
    pub cutoff_factor: usize,
    #[serde(default)]
    pub drive_term: DriveTerm,
    #[serde(default = "default_guard")]
    pub max_dim: usize,
}

impl ModelParams {
    /// Resonant (`ω_a = ω_c = 1`) configuration with the default cutoff `4N`.
    pub fn resonant(n_tls: usize, g: f64, eta: f64, omega_drive: f64) -> Self {
        Self {
            omega_a: 1.0,
            omega_c: 1.0,
            g,
            eta,
            omega_drive,
            n_tls,
            cutoff_factor: 4,
            drive_term: DriveTerm::default(),
            max_dim: DEFAULT_DIM_GUARD,
        }
    }

    pub fn with_cutoff_factor(mut self, factor: usize) -> Self {
        self.cutoff_factor = factor;
        self
    }

    pub fn with_drive_term(mut self, drive: DriveTerm) -> Self {
        self.drive_term = drive;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_a", self.omega_a),
            ("omega_c", self.omega_c),
            ("g", self.g),
            ("eta", self.eta),
            ("omega_drive", self.omega_drive),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if self.omega_a <= 0.0 || self.omega_c <= 0.0 {
            return Err(Error::InvalidParameter(
                "omega_a and omega_c must be positive".into(),
            ));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParameter("g must be non-negative".into()));
        }
        if self.n_tls == 0 {
            return Err(Error::InvalidParameter("n_tls must be at least 1".into()));
        }
        if self.cutoff_factor == 0 {
            return Err(Error::InvalidParameter(
                "cutoff_factor must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Off-resonant runs are accepted but carry no validated reference data.
    pub fn is_resonant(&self) -> bool {
        (self.omega_a - self.omega_c).abs() <= 1e-12 * self.omega_a.max(self.omega_c)
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        self.validate()?;
        HilbertSpace::with_guard(self.n_tls, self.cutoff_factor, self.max_dim)
    }

    fn check_space(&self, space: &HilbertSpace) -> Result<()> {
        self.validate()?;
        if space.n_tls() != self.n_tls || space.n_ph_max() != self.n_tls * self.cutoff_factor {
            return Err(Error::SpaceMismatch(format!(
                "space has N = {}, N_ph = {}; parameters want N = {}, N_ph = {}",
                space.n_tls(),
                space.n_ph_max(),
                self.n_tls,
                self.n_tls * self.cutoff_factor
            )));
        }
        Ok(())
    }
}

/// Battery Hamiltonian `ω_a J_z`.
pub fn build_h0(params: &ModelParams, space: &HilbertSpace) -> Result<OperatorMatrix> {
    params.check_space(space)?;
    Ok(space.jz().scale(params.omega_a))
}

/// The individual charger terms, kept separate so the reduced models can be
/// compared term by term.
#[derive(Debug, Clone)]
pub struct ChargerTerms {
    pub cavity: OperatorMatrix,
    pub coupling: OperatorMatrix,
    pub interaction: OperatorMatrix,
    pub drive: OperatorMatrix,
}

impl ChargerTerms {
    pub fn build(params: &ModelParams, space: &HilbertSpace) -> Result<Self> {
        params.check_space(space)?;
        let a = space.annihilate();
        let ad = space.create();
        let jx = space.jx();
        let jz = space.jz();
        let n = params.n_tls as f64;
        Ok(Self {
            cavity: ad.matmul(&a).scale(params.omega_c),
            coupling: jx
                .matmul(&ad.add(&a))
                .scale(2.0 * params.omega_c * params.g),
            interaction: jz.matmul(&jz).scale(params.eta / n),
            drive: jx.scale(params.omega_drive * params.drive_term.jx_factor()),
        })
    }

    pub fn sum(&self) -> OperatorMatrix {
        self.cavity
            .add(&self.coupling)
            .add(&self.interaction)
            .add(&self.drive)
    }
}

/// Charger Hamiltonian `H₁`.
pub fn build_h1(params: &ModelParams, space: &HilbertSpace) -> Result<OperatorMatrix> {
    Ok(ChargerTerms::build(params, space)?.sum())
}

/// Full charging Hamiltonian `H = H₀ + H₁` (λ = 1 inside the charging window).
pub fn build_h_total(params: &ModelParams, space: &HilbertSpace) -> Result<OperatorMatrix> {
    Ok(build_h0(params, space)?.add(&build_h1(params, space)?))
}

/// Which version of the closed-form matrix elements to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementFormula {
    /// Ladder coefficients consistent with `J_±` and hermiticity.
    Corrected,
    /// The literal printed form: the `m` argument of the second drive
    /// coefficient uses `N/5 − q`, and the last coupling coefficient repeats
    /// `m(m − 1)`.
    AsPrinted,
}

/// Closed-form `⟨n', N/2, N/2 − q'| H |n, N/2, N/2 − q⟩`.
///
/// Independent of the operator-product construction; only used to cross-check it.
pub fn explicit_element(
    params: &ModelParams,
    n_out: usize,
    q_out: usize,
    n_in: usize,
    q_in: usize,
    formula: ElementFormula,
) -> f64 {
    let big_n = params.n_tls as f64;
    let j = big_n / 2.0;
    let m = j - q_in as f64;
    let cas = j * (j + 1.0);
    let lower = |m: f64| (cas - m * (m - 1.0)).max(0.0);
    let raise = |m: f64| (cas - m * (m + 1.0)).max(0.0);
    let k = n_in as f64;
    let drive = params.omega_drive * params.drive_term.jx_factor() / 2.0;
    let coupling = params.omega_c * params.g;

    let mut value = 0.0;
    if n_out == n_in && q_out == q_in {
        value += params.omega_c * k + params.omega_a * m + params.eta / big_n * m * m;
    }
    if n_out == n_in && q_out == q_in + 1 {
        value += drive * lower(m).sqrt();
    }
    if n_out == n_in && q_out + 1 == q_in {
        let m2 = match formula {
            ElementFormula::Corrected => m,
            ElementFormula::AsPrinted => big_n / 5.0 - q_in as f64,
        };
        value += drive * raise(m2).sqrt();
    }
    if n_out == n_in + 1 && q_out == q_in + 1 {
        value += coupling * ((k + 1.0) * lower(m)).sqrt();
    }
    if n_out == n_in + 1 && q_out + 1 == q_in {
        value += coupling * ((k + 1.0) * raise(m)).sqrt();
    }
    if n_out + 1 == n_in && q_out == q_in + 1 {
        value += coupling * (k * lower(m)).sqrt();
    }
    if n_out + 1 == n_in && q_out + 1 == q_in {
        let f = match formula {
            ElementFormula::Corrected => raise(m),
            ElementFormula::AsPrinted => lower(m),
        };
        value += coupling * (k * f).sqrt();
    }
    value
}

/// Dense matrix of [`explicit_element`] over the whole basis.
pub fn explicit_hamiltonian(
    params: &ModelParams,
    space: &HilbertSpace,
    formula: ElementFormula,
) -> Result<OperatorMatrix> {
    params.check_space(space)?;
    let d = space.dim();
    let s = space.spin_dim();
    let data = Mat::from_fn(d, d, |row, col| {
        explicit_element(params, row / s, row % s, col / s, col % s, formula)
    });
    OperatorMatrix::from_mat(*space, data)
}

/// Max absolute deviation between the closed-form elements and the
/// operator-product Hamiltonian.
pub fn explicit_element_deviation(
    params: &ModelParams,
    space: &HilbertSpace,
    formula: ElementFormula,
) -> Result<f64> {
    let h = build_h_total(params, space)?;
    Ok(explicit_hamiltonian(params, space, formula)?.max_abs_diff(&h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(p: &ModelParams) -> HilbertSpace {
        p.space().unwrap()
    }

    #[test]
    fn h0_spectrum_and_trace() {
        let p = ModelParams::resonant(10, 0.5, 0.0, 0.0);
        let s = space(&p);
        let h0 = build_h0(&p, &s).unwrap();
        let diag = h0.diagonal();
        for block in diag.chunks(s.spin_dim()) {
            let expect: Vec<f64> = (0..=10).map(|q| 5.0 - q as f64).collect();
            assert_eq!(block, expect.as_slice());
            assert_eq!(block.iter().sum::<f64>(), 0.0);
        }
        assert_eq!(h0.asymmetry(), 0.0);
    }

    #[test]
    fn bare_cavity_charger() {
        let p = ModelParams::resonant(3, 0.0, 0.0, 0.0);
        let s = space(&p);
        let h1 = build_h1(&p, &s).unwrap();
        for i in 0..s.dim() {
            for k in 0..s.dim() {
                let expect = if i == k { s.n_of(i) as f64 } else { 0.0 };
                assert!((h1.get(i, k) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn charger_symmetric_and_conserves_casimir() {
        let p = ModelParams::resonant(4, 0.3, -1.2, 0.7);
        let s = space(&p);
        let h = build_h_total(&p, &s).unwrap();
        assert!(h.asymmetry() <= 1e-12);
        assert!(h.commutator(&s.j_squared()).max_abs() <= 1e-9);
    }

    #[test]
    fn reduced_models_term_by_term() {
        // Ω = 0 leaves cavity + coupling + J_z² and an exactly zero drive term.
        let eta_only = ModelParams::resonant(3, 0.4, 1.5, 0.0);
        let s = space(&eta_only);
        let t = ChargerTerms::build(&eta_only, &s).unwrap();
        assert_eq!(t.drive.max_abs(), 0.0);
        let a = s.annihilate();
        let ad = s.create();
        let jz = s.jz();
        let expected = ad
            .matmul(&a)
            .add(&jz)
            .add(&s.jx().matmul(&ad.add(&a)).scale(0.8))
            .add(&jz.matmul(&jz).scale(0.5));
        let h = build_h_total(&eta_only, &s).unwrap();
        assert!(h.max_abs_diff(&expected) < 1e-12);

        let drive_only = ModelParams::resonant(3, 0.4, 0.0, 0.6);
        let t = ChargerTerms::build(&drive_only, &s).unwrap();
        assert_eq!(t.interaction.max_abs(), 0.0);
        assert!(t.drive.max_abs_diff(&s.jx().scale(1.2)) < 1e-15);
        let jx_drive = drive_only.with_drive_term(DriveTerm::Jx);
        let t = ChargerTerms::build(&jx_drive, &s).unwrap();
        assert!(t.drive.max_abs_diff(&s.jx().scale(0.6)) < 1e-15);
    }

    #[test]
    fn explicit_elements_match_operator_products() {
        let p = ModelParams::resonant(2, 0.3, 1.0, 0.5);
        let s = space(&p);
        let dev = explicit_element_deviation(&p, &s, ElementFormula::Corrected).unwrap();
        assert!(dev <= 1e-12, "deviation {dev}");
        let jx = p.with_drive_term(DriveTerm::Jx);
        let dev = explicit_element_deviation(&jx, &s, ElementFormula::Corrected).unwrap();
        assert!(dev <= 1e-12, "deviation {dev}");
    }

    #[test]
    fn printed_formula_is_inconsistent() {
        let p = ModelParams::resonant(10, 0.3, 1.0, 0.5).with_cutoff_factor(1);
        let s = space(&p);
        let dev = explicit_element_deviation(&p, &s, ElementFormula::AsPrinted).unwrap();
        assert!(dev > 1e-2, "printed formula unexpectedly matched ({dev})");
        let printed = explicit_hamiltonian(&p, &s, ElementFormula::AsPrinted).unwrap();
        assert!(printed.asymmetry() > 1e-2);
    }

    #[test]
    fn free_explicit_elements() {
        let p = ModelParams::resonant(3, 0.0, 0.0, 0.0);
        let s = space(&p);
        let h = explicit_hamiltonian(&p, &s, ElementFormula::Corrected).unwrap();
        for i in 0..s.dim() {
            let (n, m) = s.state_of(i).unwrap();
            assert!((h.get(i, i) - (n as f64 + m)).abs() < 1e-15);
        }
    }

    #[test]
    fn interaction_diagonal_entry() {
        let p = ModelParams::resonant(10, 0.0, 2.0, 0.0);
        // q = 0 at n = 0: m = 5, ω_a m = 5 and η/N m² = 5.
        let v = explicit_element(&p, 0, 0, 0, 0, ElementFormula::Corrected);
        assert!((v - 10.0).abs() < 1e-12);
        let s = space(&p);
        let h = build_h_total(&p, &s).unwrap();
        assert!((h.get(0, 0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn mismatched_space_rejected() {
        let p = ModelParams::resonant(3, 0.1, 0.0, 0.0);
        let other = HilbertSpace::new(3, 5).unwrap();
        assert!(matches!(build_h0(&p, &other), Err(Error::SpaceMismatch(_))));
        let bad = ModelParams { omega_a: 0.0, ..p };
        assert!(bad.validate().is_err());
        let bad = ModelParams { g: -0.1, ..p };
        assert!(bad.validate().is_err());
        let bad = ModelParams { eta: f64::NAN, ..p };
        assert!(bad.validate().is_err());
        assert!(p.is_resonant());
        assert!(!ModelParams { omega_c: 1.2, ..p }.is_resonant());
    }

    #[test]
    fn spectrum_is_ordering_invariant() {
        use faer::Side;
        let p = ModelParams::resonant(2, 0.4, 0.7, 0.3).with_cutoff_factor(2);
        let s = space(&p);
        let h = build_h_total(&p, &s).unwrap();
        let d = s.dim();
        // Reverse the labels: idx -> d-1-idx.
        let perm = Mat::from_fn(d, d, |i, k| h.get(d - 1 - i, d - 1 - k));
        let e1 = h.mat().self_adjoint_eigenvalues(Side::Lower).unwrap();
        let e2 = perm.self_adjoint_eigenvalues(Side::Lower).unwrap();
        for (a, b) in e1.iter().zip(&e2) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
