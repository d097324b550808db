//! Exact-diagonalization simulator for the extended Dicke quantum battery:
//! `N` two-level systems coupled to one cavity mode, with an all-to-all
//! `J_z²` interaction and a classical `J_x` drive.
//!
//! The crate is organized bottom-up:
//!
//! * [`hilbert`]: truncated `|n⟩ ⊗ |N/2, m⟩` basis and ladder operators
//! * [`model`]: battery/charger Hamiltonians and the closed-form element check
//! * [`spectral`]: block-wise dense symmetric eigendecomposition
//! * [`dynamics`]: closed-form evolution, stored energy, power, fluctuation
//! * [`analysis`]: sweeps, ground-state inversion, scaling fits, cutoff audits

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod hilbert;
pub mod model;
pub mod optimize;
pub mod spectral;

pub use analysis::{
    critical_eta, cutoff_convergence, fit_power_scaling, ground_state_sz, scaling_run, sweep,
    Axis, Quantity, ScalingFit, ScalingRun, SweepAxis, SweepGrid,
};
pub use dynamics::{
    charging_power, energy_fluctuation, find_extrema, initial_state, stored_energy, trace,
    ChargingDynamics, ChargingProtocol, ChargingTrace, ExtremumReport, PowerMaximum, QuantumState, Sample,
};
pub use error::{Error, Result};
pub use exec::Exec;
pub use hilbert::{HilbertSpace, OperatorMatrix};
pub use model::{build_h0, build_h1, build_h_total, DriveTerm, ModelParams};
pub use spectral::{decompose, SpectralDecomposition};
