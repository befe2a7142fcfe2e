//! Pulse calibration by alternating τ/Δζ sweeps, DRAG optimization,
//! repeated-gate benchmarking and the coherence budget.

mod benchmark;
mod sweep;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::control::{drive_hamiltonian, DriveHamiltonian, PulseSpec};
use crate::dynamics::{thermal_populations, thermal_state, CollapseSet};
use crate::error::{Error, Result};
use crate::noise::pure_dephasing_time;
use crate::spectra::{EnergySpectrum, QubitParams};

pub use benchmark::{benchmark_gate, fit_exponential, BenchmarkTrace, ExponentialFit};
pub use sweep::{
    calibrate_pulse, golden_section_max, optimize_drag, pulse_fidelity, CalibrationConfig, CalibrationResult, Grid,
};

/// Levels kept in gate simulations.
pub const DEFAULT_LEVELS: usize = 4;

/// A driven device with its decoherence and initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceModel {
    /// Drive Hamiltonian; its pulse only supplies the carrier frequency.
    pub hamiltonian: DriveHamiltonian,
    pub collapse: CollapseSet,
    pub rho0: DMatrix<Complex64>,
    /// µs.
    pub t1_eff: f64,
    /// µs.
    pub t2_eff: f64,
}

impl DeviceModel {
    /// Device on `d` levels at `temperature` K with measured T1 and T2 (µs).
    ///
    /// The thermal excited fraction is the two-level Boltzmann value; rates
    /// follow from it and T1, and Tφ is backed out of T1 and T2.
    pub fn new(params: &QubitParams, d: usize, temperature: f64, t1_us: f64, t2_us: f64) -> Result<Self> {
        let spectrum = params.spectrum()?;
        Self::from_spectrum(params, &spectrum, d, temperature, t1_us, t2_us)
    }

    pub fn from_spectrum(
        params: &QubitParams,
        spectrum: &EnergySpectrum,
        d: usize,
        temperature: f64,
        t1_us: f64,
        t2_us: f64,
    ) -> Result<Self> {
        let carrier = PulseSpec::new(0.0, 1.0, spectrum.omega01());
        let hamiltonian = drive_hamiltonian(params, spectrum, &carrier, d)?;
        let p_th = thermal_populations(&spectrum.levels[..2], temperature)?[1];
        let t_phi = pure_dephasing_time(t1_us, t2_us)?;
        let collapse = CollapseSet::from_times(p_th, t1_us * 1e-6, t_phi * 1e-6)?;
        Ok(Self { hamiltonian, collapse, rho0: thermal_state(spectrum, temperature, d)?, t1_eff: t1_us, t2_eff: t2_us })
    }

    /// Same device without any decoherence.
    pub fn noiseless(&self) -> Self {
        Self { collapse: CollapseSet::default(), ..self.clone() }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// Carrier frequency, GHz.
    pub fn drive_freq(&self) -> f64 {
        self.hamiltonian.pulse.drive_freq
    }
}

/// How the gate count min(T1, T2)/τ is rounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rounding {
    #[default]
    Nearest,
    Floor,
}

/// Gates that fit within the shorter coherence time: min(T1, T2)/τ.
pub fn coherence_budget(t1_eff_us: f64, t2_eff_us: f64, tau_ns: f64, rounding: Rounding) -> Result<u64> {
    if !(t1_eff_us > 0.0 && t2_eff_us > 0.0 && tau_ns > 0.0) {
        return Err(Error::InvalidParameter("coherence times and duration must be positive".into()));
    }
    let q = t1_eff_us.min(t2_eff_us) * 1e3 / tau_ns;
    // Guard exact quotients such as 52.78e3/28 against round-off below the integer.
    let q = if (q - q.round()).abs() < 1e-9 * q { q.round() } else { q };
    Ok(match rounding {
        Rounding::Nearest => q.round() as u64,
        Rounding::Floor => q.floor() as u64,
    })
}
