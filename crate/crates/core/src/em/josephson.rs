use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{ELECTRON_CHARGE, HBAR, PLANCK};

/// ħ/2e, Wb. Josephson relations below are written with the reduced quantum.
pub const REDUCED_FLUX_QUANTUM: f64 = HBAR / (2.0 * ELECTRON_CHARGE);

/// A Josephson junction described by any one of E_J, I_c or L_J.
///
/// E_J = φ0²/L_J = I_c·φ0 with φ0 = ħ/2e.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionBranch {
    /// GHz.
    pub e_j: f64,
    /// nA.
    pub i_c: f64,
    /// nH.
    pub l_j: f64,
}

impl JunctionBranch {
    pub fn from_e_j(e_j_ghz: f64) -> Result<Self> {
        positive(e_j_ghz, "E_J")?;
        let e_joule = PLANCK * e_j_ghz * 1e9;
        Ok(Self {
            e_j: e_j_ghz,
            i_c: e_joule / REDUCED_FLUX_QUANTUM * 1e9,
            l_j: REDUCED_FLUX_QUANTUM.powi(2) / e_joule * 1e9,
        })
    }

    pub fn from_critical_current(i_c_na: f64) -> Result<Self> {
        positive(i_c_na, "I_c")?;
        Self::from_e_j(i_c_na * 1e-9 * REDUCED_FLUX_QUANTUM / PLANCK * 1e-9)
    }

    pub fn from_inductance(l_j_nh: f64) -> Result<Self> {
        positive(l_j_nh, "L_J")?;
        Self::from_e_j(REDUCED_FLUX_QUANTUM.powi(2) / (l_j_nh * 1e-9) / PLANCK * 1e-9)
    }

    /// Largest relative mismatch between the three descriptions.
    pub fn inconsistency(&self) -> f64 {
        let e = PLANCK * self.e_j * 1e9;
        let from_ic = self.i_c * 1e-9 * REDUCED_FLUX_QUANTUM;
        let from_lj = REDUCED_FLUX_QUANTUM.powi(2) / (self.l_j * 1e-9);
        ((from_ic - e).abs() / e).max((from_lj - e).abs() / e)
    }
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} = {x} must be positive")))
    }
}

/// Supercurrent I_c·sin(2π·phi) for flux `phi` in units of Φ0.
pub fn junction_current(phi: f64, i_c: f64) -> f64 {
    i_c * (2.0 * PI * phi).sin()
}

/// E_J(1 − cos φ) for reduced phase φ.
pub fn exact_josephson_energy(phi: f64, e_j: f64) -> f64 {
    e_j * (1.0 - phi.cos())
}

/// Taylor series of E_J(1 − cos φ) through φ^order, order ∈ {2, 4, 6}.
pub fn josephson_energy_series(phi: f64, order: u32, e_j: f64) -> Result<f64> {
    let terms = match order {
        2 => 1,
        4 => 2,
        6 => 3,
        _ => return Err(Error::InvalidParameter(format!("series order {order} not in {{2, 4, 6}}"))),
    };
    // (1 − cos φ) = Σ_{k≥1} (−1)^{k+1} φ^{2k}/(2k)!
    let mut sum = 0.0;
    let mut term = phi * phi / 2.0;
    for k in 1..=terms {
        sum += term;
        let next = (2 * k + 1) as f64 * (2 * k + 2) as f64;
        term *= -phi * phi / next;
    }
    Ok(e_j * sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn current_extremes() {
        assert_eq!(junction_current(0.0, 30.0), 0.0);
        assert!((junction_current(0.25, 30.0) - 30.0).abs() < 1e-12);
        let h = 1e-6;
        let slope = (junction_current(h, 30.0) - junction_current(-h, 30.0)) / (2.0 * h);
        assert!((slope - 2.0 * PI * 30.0).abs() < 1e-6);
    }

    #[test]
    fn series_within_taylor_remainder() {
        let (phi, ej) = (0.1, 7.68);
        assert_eq!(exact_josephson_energy(0.0, ej), 0.0);
        assert_eq!(josephson_energy_series(0.0, 4, ej).unwrap(), 0.0);
        let err = (exact_josephson_energy(phi, ej) - josephson_energy_series(phi, 4, ej).unwrap()).abs();
        assert!(err < phi.powi(6) * ej / 720.0);
        assert!(josephson_energy_series(phi, 3, ej).is_err());
    }

    #[test]
    fn quadratic_term_is_linear_inductor() {
        let b = JunctionBranch::from_e_j(7.68).unwrap();
        let phi = 1e-3;
        // ½ L_J I² with I = φ0 φ / L_J, in GHz.
        let i = REDUCED_FLUX_QUANTUM * phi / (b.l_j * 1e-9);
        let e_ind = 0.5 * b.l_j * 1e-9 * i * i / PLANCK * 1e-9;
        let e_series = josephson_energy_series(phi, 2, b.e_j).unwrap();
        assert!((e_ind - e_series).abs() / e_series < 1e-9);
    }

    #[test]
    fn descriptions_agree() {
        for b in [
            JunctionBranch::from_e_j(4.8).unwrap(),
            JunctionBranch::from_critical_current(20.0).unwrap(),
            JunctionBranch::from_inductance(8.0).unwrap(),
        ] {
            assert!(b.inconsistency() < 1e-9);
        }
        assert!(JunctionBranch::from_e_j(-1.0).is_err());
    }
}
