//! Thermal initialization, collapse operators from measured rates and
//! Lindblad propagation of driven d-level qubits.

mod lindblad;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::EnergySpectrum;
use crate::units::{ghz_to_joules, BOLTZMANN};

pub use lindblad::{
    apply_superoperator, lindblad_evolve, lindblad_evolve_with, propagator_superoperator, unitary_propagator,
    EvolutionResult, EvolveOptions, Frame, MAX_TRACE_DRIFT, STEPS_PER_PERIOD,
};

/// Decay, excitation and pure-dephasing rates in 1/s.
///
/// Realized on d levels as L↓ = √Γ↓ a, L↑ = √Γ↑ a† and L_φ = √(2Γφ) n̂, so the
/// 0–1 coherence dephases at Γφ.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CollapseSet {
    pub gamma_down: f64,
    pub gamma_up: f64,
    pub gamma_phi: f64,
}

impl CollapseSet {
    pub fn new(gamma_down: f64, gamma_up: f64, gamma_phi: f64) -> Self {
        Self { gamma_down, gamma_up, gamma_phi }
    }

    /// Rates from a thermal population and measured T1 (s) and Tφ (s).
    pub fn from_times(p_th: f64, t1: f64, t_phi: f64) -> Result<Self> {
        let (up, down) = transition_rates(p_th, t1)?;
        if !(t_phi > 0.0) {
            return Err(Error::InvalidParameter(format!("Tφ = {t_phi} s")));
        }
        let phi = if t_phi.is_finite() { 1.0 / t_phi } else { 0.0 };
        Ok(Self::new(down, up, phi))
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("Γ↓", self.gamma_down), ("Γ↑", self.gamma_up), ("Γφ", self.gamma_phi)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v}")));
            }
        }
        Ok(())
    }

    /// The collapse operators themselves on d levels, √(1/ns) units.
    pub fn operators(&self, d: usize) -> Vec<DMatrix<Complex64>> {
        let lower = DMatrix::from_fn(d, d, |i, j| {
            if j == i + 1 {
                Complex64::new((j as f64).sqrt(), 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let number = DMatrix::from_fn(d, d, |i, j| Complex64::new(if i == j { i as f64 } else { 0.0 }, 0.0));
        let s = |r: f64| Complex64::new((r * 1e-9).sqrt(), 0.0);
        vec![&lower * s(self.gamma_down), lower.adjoint() * s(self.gamma_up), number * s(2.0 * self.gamma_phi)]
    }
}

/// Boltzmann occupations over the given level energies (GHz) at `temperature` K.
pub fn thermal_populations(levels: &[f64], temperature: f64) -> Result<Vec<f64>> {
    if !(temperature >= 0.0) || levels.is_empty() {
        return Err(Error::InvalidParameter(format!("temperature {temperature} K")));
    }
    let e0 = levels[0];
    if temperature == 0.0 {
        let mut p = vec![0.0; levels.len()];
        p[0] = 1.0;
        return Ok(p);
    }
    let w: Vec<f64> = levels.iter().map(|e| (-ghz_to_joules(e - e0) / (BOLTZMANN * temperature)).exp()).collect();
    let z: f64 = w.iter().sum();
    Ok(w.iter().map(|x| x / z).collect())
}

/// Diagonal thermal state from explicit level energies (GHz).
pub fn thermal_state_from_levels(levels: &[f64], temperature: f64) -> Result<DMatrix<Complex64>> {
    let p = thermal_populations(levels, temperature)?;
    Ok(DMatrix::from_diagonal(&DVector::from_iterator(p.len(), p.iter().map(|x| Complex64::new(*x, 0.0)))))
}

/// Thermal state over the lowest `d` levels of `spectrum`.
pub fn thermal_state(spectrum: &EnergySpectrum, temperature: f64, d: usize) -> Result<DMatrix<Complex64>> {
    if !(temperature > 0.0) {
        return Err(Error::InvalidParameter(format!("temperature {temperature} K must be positive")));
    }
    if d == 0 || d > spectrum.dim() {
        return Err(Error::TooFewLevels { found: spectrum.dim(), needed: d.max(1) });
    }
    thermal_state_from_levels(&spectrum.levels[..d], temperature)
}

/// (Γ↑, Γ↓) = (p_th/T1, (1 − p_th)/T1) in 1/s for T1 in s.
pub fn transition_rates(p_th: f64, t1_eff: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&p_th) {
        return Err(Error::InvalidParameter(format!("thermal population {p_th}")));
    }
    if !(t1_eff > 0.0) {
        return Err(Error::InvalidParameter(format!("T1 = {t1_eff} s")));
    }
    Ok((p_th / t1_eff, (1.0 - p_th) / t1_eff))
}
