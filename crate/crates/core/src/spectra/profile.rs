use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{EnergySpectrum, FluxoniumParams, QubitParams, TransmonParams};
use crate::error::{Error, Result};

/// Summary figures of a qubit. Frequencies in GHz, times in µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitProfile {
    pub omega01: f64,
    pub alpha: f64,
    /// ω01(n_g = 0) - ω01(n_g = 0.5); transmon only.
    pub delta_omega: Option<f64>,
    pub t1_eff: Option<f64>,
    pub t2_eff: Option<f64>,
}

/// Build the profile from a spectrum and, for a transmon, the same device at
/// n_g = 0.5.
pub fn qubit_profile(s: &EnergySpectrum, s_half: Option<&EnergySpectrum>) -> Result<QubitProfile> {
    for spec in std::iter::once(s).chain(s_half) {
        if spec.dim() < 3 {
            return Err(Error::TooFewLevels { found: spec.dim(), needed: 3 });
        }
    }
    Ok(QubitProfile {
        omega01: s.omega01(),
        alpha: s.alpha(),
        delta_omega: s_half.map(|h| s.omega01() - h.omega01()),
        t1_eff: None,
        t2_eff: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionPoint {
    pub ratio: f64,
    /// |ω_{0→k}(n_g=0) - ω_{0→k}(n_g=0.5)| for k = 1, 2, ... (GHz).
    pub per_level: Vec<f64>,
}

/// Number of transitions reported per ratio by [`charge_dispersion_decay`].
pub const DISPERSION_LEVELS: usize = 3;

/// Charge dispersion of the lowest transitions as E_J/E_C is swept at fixed E_C.
pub fn charge_dispersion_decay(ratios: &[f64], e_c: f64) -> Result<Vec<DispersionPoint>> {
    if let Some(r) = ratios.iter().find(|r| !(**r > 5.0)) {
        return Err(Error::InvalidParameter(format!("E_J/E_C ratio {r} must exceed 5")));
    }
    ratios
        .par_iter()
        .map(|&ratio| {
            let at = |n_g| TransmonParams::new(ratio * e_c, e_c, n_g);
            let s0 = super::transmon_spectrum(&at(0.0))?;
            let s5 = super::transmon_spectrum(&at(0.5))?;
            let per_level =
                (1..=DISPERSION_LEVELS).map(|k| (s0.transition(0, k) - s5.transition(0, k)).abs()).collect();
            Ok(DispersionPoint { ratio, per_level })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxPoint {
    pub phi_ext: f64,
    pub omega01: f64,
    pub alpha: f64,
}

/// ω01 and α of a fluxonium over a grid of external flux values.
pub fn flux_sweep(p: &FluxoniumParams, phi_grid: &[f64]) -> Result<Vec<FluxPoint>> {
    if let Some(phi) = phi_grid.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::InvalidParameter(format!("flux grid value {phi} outside [0, 1]")));
    }
    // Convergence is checked once at the first grid point; the others reuse the cutoff.
    if let Some(&first) = phi_grid.first() {
        super::fluxonium_spectrum(&FluxoniumParams { phi_ext: first, ..*p })?;
    }
    phi_grid
        .par_iter()
        .map(|&phi_ext| {
            let s = QubitParams::Fluxonium(FluxoniumParams { phi_ext, ..*p }).eigensystem()?;
            Ok(FluxPoint { phi_ext, omega01: s.omega01(), alpha: s.alpha() })
        })
        .collect()
}
