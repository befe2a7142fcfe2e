use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{Error, Result};

/// Carrier quadrature the in-phase envelope drives. With the carrier
/// referenced to the pulse start, `Y` gives rotations about the rotating-frame
/// y axis (matching R_y in the target gate) and the DRAG term lands on x.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveAxis {
    X,
    #[default]
    Y,
}

/// A truncated-Gaussian microwave pulse with optional DRAG quadrature.
///
/// τ = 4δ always; δ is derived from τ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    /// Peak Rabi rate Ω, rad/s.
    pub amplitude: f64,
    /// Duration τ, ns.
    pub tau: f64,
    /// Symmetric shift Δζ applied to θ and λ of the target gate, rad.
    pub delta_zeta: f64,
    /// DRAG coefficient β, ns.
    pub beta: f64,
    /// Carrier frequency, GHz.
    pub drive_freq: f64,
    pub axis: DriveAxis,
}

impl PulseSpec {
    pub fn new(amplitude: f64, tau: f64, drive_freq: f64) -> Self {
        Self { amplitude, tau, delta_zeta: 0.0, beta: 0.0, drive_freq, axis: DriveAxis::Y }
    }

    /// Gaussian width δ = τ/4, ns.
    pub fn sigma(&self) -> f64 {
        self.tau / 4.0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("pulse duration {} ns", self.tau)));
        }
        for (name, v) in [
            ("amplitude", self.amplitude),
            ("delta_zeta", self.delta_zeta),
            ("beta", self.beta),
            ("drive_freq", self.drive_freq),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("pulse {name} is not finite")));
            }
        }
        Ok(())
    }

    /// Offset e^{−τ²/(8δ²)} subtracted so the envelope vanishes at both ends.
    fn floor(&self) -> f64 {
        let s = self.sigma();
        (-self.tau * self.tau / (8.0 * s * s)).exp()
    }

    /// (g(t) − g0)/(1 − g0) and its time derivative (1/ns), g centred at τ/2.
    /// Zero outside [0, τ].
    pub(crate) fn shape(&self, t: f64) -> (f64, f64) {
        if !(0.0..=self.tau).contains(&t) {
            return (0.0, 0.0);
        }
        let s = self.sigma();
        let u = t - self.tau / 2.0;
        let g = (-u * u / (2.0 * s * s)).exp();
        let g0 = self.floor();
        ((g - g0) / (1.0 - g0), -g * u / (s * s) / (1.0 - g0))
    }

    /// In-phase and quadrature envelopes at `t` (ns), rad/s; zero outside [0, τ].
    pub(crate) fn envelopes(&self, t: f64) -> (f64, f64) {
        let (f, df) = self.shape(t);
        (self.amplitude * f, self.beta * self.amplitude * df)
    }

    /// ∫₀^τ Ω_G dt in rad for the current amplitude.
    pub fn area(&self) -> f64 {
        self.amplitude * 1e-9 * unit_area(self.tau)
    }

    /// Copy with the amplitude that gives pulse area `theta` (rad).
    pub fn with_area(&self, theta: f64) -> Self {
        Self { amplitude: theta / (unit_area(self.tau) * 1e-9), ..*self }
    }
}

/// ∫₀^τ (g − g0)/(1 − g0) dt in ns for τ = 4δ, closed form through erf.
fn unit_area(tau: f64) -> f64 {
    let s = tau / 4.0;
    let g0 = (-tau * tau / (8.0 * s * s)).exp();
    let gauss = s * (2.0 * PI).sqrt() * erf(tau / (2.0 * 2f64.sqrt() * s));
    (gauss - tau * g0) / (1.0 - g0)
}

fn check_time(t: f64, p: &PulseSpec) -> Result<()> {
    p.validate()?;
    if (0.0..=p.tau).contains(&t) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t = {t} ns outside pulse [0, {}]", p.tau)))
    }
}

/// Truncated Gaussian centred at τ/2, zero at t = 0 and t = τ, peak Ω (rad/s).
pub fn gaussian_envelope(t: f64, p: &PulseSpec) -> Result<f64> {
    check_time(t, p)?;
    Ok(p.envelopes(t).0)
}

/// (Ω_G(t), β·dΩ_G/dt) in rad/s; the second component drives the
/// orthogonal quadrature.
pub fn drag_envelope(t: f64, p: &PulseSpec) -> Result<(f64, f64)> {
    check_time(t, p)?;
    Ok(p.envelopes(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pulse() -> PulseSpec {
        PulseSpec { beta: -0.8, ..PulseSpec::new(1.2e8, 28.0, 4.0) }
    }

    #[test]
    fn endpoints_and_peak() {
        let p = pulse();
        assert_eq!(gaussian_envelope(0.0, &p).unwrap(), 0.0);
        assert!(gaussian_envelope(p.tau, &p).unwrap().abs() < 1e-9);
        assert!((gaussian_envelope(p.tau / 2.0, &p).unwrap() - p.amplitude).abs() < 1e-6);
        assert!(gaussian_envelope(-1.0, &p).is_err());
        assert!(gaussian_envelope(p.tau + 1.0, &p).is_err());
    }

    #[test]
    fn closed_form_area_matches_quadrature() {
        let p = pulse();
        let n = 20_000;
        let h = p.tau / n as f64;
        // Composite Simpson.
        let mut sum = 0.0;
        for k in 0..=n {
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += w * gaussian_envelope(k as f64 * h, &p).unwrap();
        }
        let numeric = sum * h / 3.0 * 1e-9;
        assert!((numeric / p.area() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn area_targeting() {
        let p = pulse().with_area(PI);
        assert!((p.area() - PI).abs() < 1e-12);
    }

    #[test]
    fn drag_quadrature_properties() {
        let p = pulse();
        assert_eq!(drag_envelope(p.tau / 2.0, &p).unwrap().1, 0.0);
        let flat = PulseSpec { beta: 0.0, ..p };
        for k in 0..=20 {
            assert_eq!(drag_envelope(k as f64 * p.tau / 20.0, &flat).unwrap().1, 0.0);
        }
    }
}
