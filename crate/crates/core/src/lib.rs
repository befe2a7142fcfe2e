//! Superconducting qubit pipeline: circuit electrostatics, Hamiltonian
//! spectra, coherence estimates, open-system dynamics and pulse calibration.
//!
//! Energies are in GHz (h = 1) throughout the public surface. Times are in
//! ns for pulses and dynamics, µs for coherence summaries, and rates in 1/s.

// `!(x > 0.0)` is the NaN-rejecting form used by every validator.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibrate;
pub mod control;
pub mod dynamics;
pub mod em;
pub mod error;
pub mod linalg;
pub mod noise;
pub mod spectra;
pub mod units;

pub use calibrate::{BenchmarkTrace, CalibrationConfig, CalibrationResult, DeviceModel};
pub use control::{DriveHamiltonian, GateSpec, PulseSpec};
pub use dynamics::{CollapseSet, EvolutionResult};
pub use em::{ConductorLayout, MaxwellCapacitanceMatrix};
pub use error::{Error, Result};
pub use noise::{CoherenceReport, NoiseChannel};
pub use spectra::{
    EnergySpectrum, FluxoniumParams, Parameter, QubitOperator, QubitParams, QubitProfile, TransmonParams,
};
