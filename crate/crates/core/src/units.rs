//! Physical constants (exact SI 2019 values) and unit conversions.
//!
//! Energies inside the crate are carried as frequencies in GHz (h = 1).
//! Conversion to SI only happens at the noise and thermal boundaries.

use std::f64::consts::PI;

/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Elementary charge, C.
pub const ELECTRON_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Superconducting flux quantum h/2e, Wb.
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELECTRON_CHARGE);
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// GHz (cyclic) to angular frequency in rad/s.
pub fn ghz_to_rad_per_s(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz * 1e9
}

/// Angular frequency in rad/s to GHz.
pub fn rad_per_s_to_ghz(omega: f64) -> f64 {
    omega / (2.0 * PI * 1e9)
}

/// GHz to joules (E = h f).
pub fn ghz_to_joules(f_ghz: f64) -> f64 {
    PLANCK * f_ghz * 1e9
}

pub fn joules_to_ghz(e: f64) -> f64 {
    e / (PLANCK * 1e9)
}

/// GHz to angular frequency in rad/ns, the unit used by the dynamics module.
pub fn ghz_to_rad_per_ns(f_ghz: f64) -> f64 {
    2.0 * PI * f_ghz
}

/// ħω / k_B T for an angular frequency in rad/s.
pub fn thermal_ratio(omega: f64, temperature: f64) -> f64 {
    HBAR * omega / (BOLTZMANN * temperature)
}
