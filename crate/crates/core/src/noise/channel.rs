use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::QubitParams;
use crate::units::{ghz_to_joules, thermal_ratio, FLUX_QUANTUM, HBAR, PLANCK};

pub const DEFAULT_Q_CAP: f64 = 1.3e6;
pub const DEFAULT_Q_IND: f64 = 392.0e6;
pub const DEFAULT_LINE_IMPEDANCE: f64 = 50.0;
/// Φ0 per ampere.
pub const DEFAULT_MUTUAL_INDUCTANCE: f64 = 400.0;
/// Critical-current 1/f amplitude as a fraction of I_c.
pub const DEFAULT_CRITICAL_CURRENT_AMPLITUDE: f64 = 1e-7;
/// Cooper pairs.
pub const DEFAULT_CHARGE_AMPLITUDE: f64 = 1e-4;
/// Φ0.
pub const DEFAULT_FLUX_AMPLITUDE: f64 = 1e-6;
/// Dielectric loss tangent reference frequency, rad/s.
pub const Q_CAP_REFERENCE_OMEGA: f64 = 2.0 * PI * 6e9;
pub const Q_CAP_EXPONENT: f64 = 0.7;

/// A noise source and the qubit operator it couples through.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseChannel {
    /// Lossy shunt capacitance; couples through 2e·N̂.
    Dielectric { q_cap: f64 },
    /// Quasiparticle loss in the superinductor; couples through (Φ0/2π)·φ̂.
    QuasiparticleInductive { q_ind: f64 },
    /// Johnson current noise of the bias line through mutual inductance M,
    /// plus a 1/f flux component of amplitude `amplitude` (Φ0); couples through ∂Ĥ/∂Φ_ext.
    FluxBias { impedance: f64, mutual: f64, amplitude: f64 },
    /// 1/f critical-current noise of amplitude `relative_amplitude`·I_c; couples through ∂Ĥ/∂I_c.
    CriticalCurrent1f { relative_amplitude: f64 },
    /// 1/f offset-charge noise of amplitude `amplitude` (Cooper pairs); couples through ∂Ĥ/∂n_g.
    Charge1f { amplitude: f64 },
}

/// The operator through which a channel couples to the qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    Charge,
    Phase,
    FluxDerivative,
    CriticalCurrentDerivative,
    OffsetChargeDerivative,
}

impl NoiseChannel {
    pub fn dielectric() -> Self {
        Self::Dielectric { q_cap: DEFAULT_Q_CAP }
    }

    pub fn quasiparticle_inductive() -> Self {
        Self::QuasiparticleInductive { q_ind: DEFAULT_Q_IND }
    }

    pub fn flux_bias() -> Self {
        Self::FluxBias {
            impedance: DEFAULT_LINE_IMPEDANCE,
            mutual: DEFAULT_MUTUAL_INDUCTANCE,
            amplitude: DEFAULT_FLUX_AMPLITUDE,
        }
    }

    pub fn critical_current() -> Self {
        Self::CriticalCurrent1f { relative_amplitude: DEFAULT_CRITICAL_CURRENT_AMPLITUDE }
    }

    pub fn charge() -> Self {
        Self::Charge1f { amplitude: DEFAULT_CHARGE_AMPLITUDE }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Dielectric { .. } => "dielectric",
            Self::QuasiparticleInductive { .. } => "quasiparticle_inductive",
            Self::FluxBias { .. } => "flux_bias",
            Self::CriticalCurrent1f { .. } => "critical_current_1f",
            Self::Charge1f { .. } => "charge_1f",
        }
    }

    pub fn coupling(&self) -> Coupling {
        match self {
            Self::Dielectric { .. } => Coupling::Charge,
            Self::QuasiparticleInductive { .. } => Coupling::Phase,
            Self::FluxBias { .. } => Coupling::FluxDerivative,
            Self::CriticalCurrent1f { .. } => Coupling::CriticalCurrentDerivative,
            Self::Charge1f { .. } => Coupling::OffsetChargeDerivative,
        }
    }

    /// Whether the channel causes energy relaxation.
    pub fn relaxes(&self) -> bool {
        matches!(self, Self::Dielectric { .. } | Self::QuasiparticleInductive { .. } | Self::FluxBias { .. })
    }

    /// Whether the channel has a 1/f component that causes pure dephasing.
    pub fn dephases(&self) -> bool {
        matches!(self, Self::FluxBias { .. } | Self::CriticalCurrent1f { .. } | Self::Charge1f { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let values: &[(&str, f64)] = match self {
            Self::Dielectric { q_cap } => &[("q_cap", *q_cap)],
            Self::QuasiparticleInductive { q_ind } => &[("q_ind", *q_ind)],
            Self::FluxBias { impedance, mutual, amplitude } => {
                &[("impedance", *impedance), ("mutual", *mutual), ("amplitude", *amplitude)]
            }
            Self::CriticalCurrent1f { relative_amplitude } => &[("relative_amplitude", *relative_amplitude)],
            Self::Charge1f { amplitude } => &[("amplitude", *amplitude)],
        };
        // Zero amplitudes are allowed so a channel can be switched off in place.
        for (name, v) in values {
            if !(*v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{} {name} = {v}", self.name())));
            }
        }
        if let Self::Dielectric { q_cap: q } | Self::QuasiparticleInductive { q_ind: q } = self {
            if *q == 0.0 {
                return Err(Error::InvalidParameter(format!("{} quality factor is zero", self.name())));
            }
        }
        Ok(())
    }

    /// 1/f amplitude in units of the channel's noisy parameter (n_g, Φ0 or
    /// E_J in GHz for critical-current noise, since E_J ∝ I_c).
    pub(crate) fn one_over_f_amplitude(&self, params: &QubitParams) -> Option<f64> {
        match self {
            Self::FluxBias { amplitude, .. } => Some(*amplitude),
            Self::CriticalCurrent1f { relative_amplitude } => Some(relative_amplitude * params.e_j()),
            Self::Charge1f { amplitude } => Some(*amplitude),
            _ => None,
        }
    }
}

/// Environment of the Ramsey-type dephasing estimate and the bath temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DephasingContext {
    /// Infrared cutoff, rad/s.
    pub omega_low: f64,
    /// Experiment duration, s.
    pub t_exp: f64,
    /// K.
    pub temperature: f64,
}

impl Default for DephasingContext {
    fn default() -> Self {
        Self { omega_low: 2.0 * PI, t_exp: 10e-6, temperature: 0.020 }
    }
}

impl DephasingContext {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("omega_low", self.omega_low), ("t_exp", self.t_exp), ("temperature", self.temperature)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }

    /// √|ln(ω_low·t_exp)|.
    pub fn log_factor(&self) -> f64 {
        (self.omega_low * self.t_exp).ln().abs().sqrt()
    }
}

/// coth(x/2)/(1 + e^{−x}) with x = ħω/k_BT: equals 1 + n_th for ω > 0 and n_th
/// for ω < 0, so S(ω)/S(−ω) = e^x.
pub fn thermal_factor(omega: f64, temperature: f64) -> f64 {
    let x = thermal_ratio(omega, temperature);
    if x == 0.0 {
        return f64::INFINITY;
    }
    // Written with e^{−|x|} to stay finite for large |x|.
    let e = (-x.abs()).exp();
    let coth = (1.0 + e) / (1.0 - e);
    if x > 0.0 {
        coth / (1.0 + e)
    } else {
        coth * e / (1.0 + e)
    }
}

/// Dielectric quality factor at |ω|: Q_ref·(ω_ref/|ω|)^0.7.
pub fn q_cap_at(q_ref: f64, omega: f64) -> f64 {
    q_ref * (Q_CAP_REFERENCE_OMEGA / omega.abs()).powf(Q_CAP_EXPONENT)
}

/// Noise spectral density of the variable a channel couples to, at angular
/// frequency `omega` (rad/s).
///
/// Units: V²·s (dielectric), A²·s (inductive), Φ0²·s (flux bias, Johnson
/// part), and λ²/Hz for the 1/f kinds where λ is the noisy parameter.
pub fn psd(channel: &NoiseChannel, params: &QubitParams, omega: f64, ctx: &DephasingContext) -> Result<f64> {
    channel.validate()?;
    ctx.validate()?;
    if !omega.is_finite() {
        return Err(Error::NonFinite("psd frequency"));
    }
    if omega == 0.0 {
        return Err(Error::InvalidParameter(format!("{} spectral density diverges at ω = 0", channel.name())));
    }
    let therm = thermal_factor(omega, ctx.temperature);
    Ok(match *channel {
        NoiseChannel::Dielectric { q_cap } => {
            // Capacitance from E_C = e²/2C.
            let c = crate::units::ELECTRON_CHARGE.powi(2) / (2.0 * ghz_to_joules(params.e_c()));
            2.0 * HBAR / (c * q_cap_at(q_cap, omega)) * therm
        }
        NoiseChannel::QuasiparticleInductive { q_ind } => {
            let QubitParams::Fluxonium(p) = params else {
                return Err(Error::ChannelMismatch {
                    channel: channel.name(),
                    usage: "a device without inductive shunt",
                });
            };
            // L from E_L = (Φ0/2π)²/L.
            let l = (FLUX_QUANTUM / (2.0 * PI)).powi(2) / ghz_to_joules(p.e_l);
            2.0 * HBAR / (l * q_ind) * therm
        }
        NoiseChannel::FluxBias { impedance, mutual, .. } => {
            // Johnson current noise 2ħω/Z, mapped to flux through M.
            mutual.powi(2) * 2.0 * HBAR * omega.abs() / impedance * therm
        }
        NoiseChannel::CriticalCurrent1f { .. } | NoiseChannel::Charge1f { .. } => {
            let a = channel.one_over_f_amplitude(params).unwrap();
            a * a / (omega / (2.0 * PI)).abs()
        }
    })
}

/// Scale converting a matrix element of the coupling operator (as built by
/// the spectra module, in its natural units) to SI: C for charge, Wb for
/// phase, J/Φ0 for the flux derivative.
pub(crate) fn coupling_scale(channel: &NoiseChannel) -> f64 {
    match channel.coupling() {
        Coupling::Charge => 2.0 * crate::units::ELECTRON_CHARGE,
        Coupling::Phase => FLUX_QUANTUM / (2.0 * PI),
        Coupling::FluxDerivative => PLANCK * 1e9,
        _ => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::TransmonParams;

    fn transmon() -> QubitParams {
        QubitParams::Transmon(TransmonParams::new(7.68, 0.31, 0.0))
    }

    #[test]
    fn one_over_f_unit_point() {
        let ch = NoiseChannel::Charge1f { amplitude: 1.0 };
        let s = psd(&ch, &transmon(), 2.0 * PI, &DephasingContext::default()).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
        assert!(psd(&ch, &transmon(), 0.0, &DephasingContext::default()).is_err());
    }

    #[test]
    fn thermal_channels_obey_detailed_balance() {
        let ctx = DephasingContext::default();
        let omega = 2.0 * PI * 0.3e9;
        let x = thermal_ratio(omega, ctx.temperature);
        let flux = QubitParams::Fluxonium(crate::spectra::FluxoniumParams::new(4.8, 0.99, 0.89, 0.5));
        for ch in [NoiseChannel::dielectric(), NoiseChannel::quasiparticle_inductive(), NoiseChannel::flux_bias()] {
            let up = psd(&ch, &flux, omega, &ctx).unwrap();
            let down = psd(&ch, &flux, -omega, &ctx).unwrap();
            assert!(((up / down) / x.exp() - 1.0).abs() < 1e-9, "{}", ch.name());
        }
    }

    #[test]
    fn dielectric_inverse_in_quality_factor() {
        let ctx = DephasingContext::default();
        let omega = 2.0 * PI * 4e9;
        let s1 = psd(&NoiseChannel::Dielectric { q_cap: 1e6 }, &transmon(), omega, &ctx).unwrap();
        let s2 = psd(&NoiseChannel::Dielectric { q_cap: 2e6 }, &transmon(), omega, &ctx).unwrap();
        assert!((s1 / s2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_factor_limits() {
        assert!((thermal_factor(1e15, 0.02) - 1.0).abs() < 1e-15);
        assert!(thermal_factor(-1e15, 0.02) < 1e-300);
    }

    #[test]
    fn inductive_channel_needs_inductor() {
        let ctx = DephasingContext::default();
        assert!(matches!(
            psd(&NoiseChannel::quasiparticle_inductive(), &transmon(), 1e9, &ctx),
            Err(Error::ChannelMismatch { .. })
        ));
    }
}
