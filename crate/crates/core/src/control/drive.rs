use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pulse::{DriveAxis, PulseSpec};
use crate::error::{Error, Result};
use crate::spectra::{EnergySpectrum, QubitParams};

/// A d-level qubit driven through its charge operator, lab frame.
///
/// Angular quantities are carried in rad/ns so that time is in ns.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveHamiltonian {
    /// Level energies, GHz, E0 = 0.
    pub energies: Vec<f64>,
    /// Charge operator in the eigenbasis, gauge-fixed so ⟨k|D|k+1⟩ ≥ 0 and ⟨0|D|1⟩ = 1.
    pub drive: DMatrix<Complex64>,
    pub pulse: PulseSpec,
    /// Half the qubit transition frequency, rad/s.
    pub epsilon: f64,
}

fn z(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

impl DriveHamiltonian {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Same device and drive operator with a different pulse.
    pub fn with_pulse(&self, pulse: PulseSpec) -> Self {
        Self { pulse, ..self.clone() }
    }

    /// diag(2π·E_k), rad/ns.
    pub fn static_part(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            self.dim(),
            self.energies.iter().map(|e| z(2.0 * PI * e)),
        ))
    }

    /// Complex envelope E(t) (rad/ns) with lab drive Re[E·e^{iω_d t}].
    pub fn complex_envelope(&self, t: f64) -> Complex64 {
        let (i, q) = self.pulse.envelopes(t);
        let e = Complex64::new(i, q) * 1e-9;
        match self.pulse.axis {
            DriveAxis::X => e,
            DriveAxis::Y => e * Complex64::new(0.0, -1.0),
        }
    }

    /// Scalar multiplying the drive operator in the lab frame, rad/ns.
    pub fn drive_coefficient(&self, t: f64) -> f64 {
        let w = 2.0 * PI * self.pulse.drive_freq * t;
        (self.complex_envelope(t) * Complex64::from_polar(1.0, w)).re
    }

    /// Full lab-frame Hamiltonian at `t` ns, rad/ns.
    pub fn at(&self, t: f64) -> DMatrix<Complex64> {
        self.static_part() + &self.drive * z(self.drive_coefficient(t))
    }

    /// Highest frequency present, GHz: top level energy or carrier.
    pub fn max_frequency(&self) -> f64 {
        self.energies.last().copied().unwrap_or(0.0).max(self.pulse.drive_freq.abs())
    }
}

/// Project the charge operator onto the lowest `d` eigenstates and attach a pulse.
pub fn drive_hamiltonian(
    params: &QubitParams,
    spectrum: &EnergySpectrum,
    pulse: &PulseSpec,
    d: usize,
) -> Result<DriveHamiltonian> {
    pulse.validate()?;
    if d < 2 || d > spectrum.dim() {
        return Err(Error::TooFewLevels { found: spectrum.dim(), needed: d.max(2) });
    }
    let n = params.charge_operator().in_eigenbasis(spectrum, d);
    let scale = n.iter().map(|x| x.norm()).fold(0.0, f64::max);
    // Phase of |k⟩ chosen so each nearest-neighbour element is real and non-negative.
    let mut phases = vec![Complex64::new(1.0, 0.0); d];
    for k in 0..d - 1 {
        let e = n[(k, k + 1)];
        phases[k + 1] = if e.norm() > 1e-12 * scale { phases[k] * e.conj() / e.norm() } else { phases[k] };
    }
    let mut drive = DMatrix::from_fn(d, d, |i, j| phases[i].conj() * n[(i, j)] * phases[j]);
    let d01 = drive[(0, 1)].re;
    if !(d01 > 1e-12 * scale) {
        return Err(Error::InvalidParameter("charge operator does not couple |0⟩ and |1⟩".into()));
    }
    drive /= z(d01);
    Ok(DriveHamiltonian {
        energies: spectrum.levels[..d].to_vec(),
        drive,
        pulse: *pulse,
        epsilon: crate::units::ghz_to_rad_per_s(spectrum.omega01()) / 2.0,
    })
}

/// The drive Hamiltonian in the frame rotating at the carrier,
/// U = exp(iω_d t n̂), optionally in the rotating-wave approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct RotatingHamiltonian {
    /// Diagonal 2π(E_k − k f_d) shifted to zero trace, rad/ns.
    pub detunings: Vec<f64>,
    pub lab: DriveHamiltonian,
    pub rwa: bool,
}

impl RotatingHamiltonian {
    pub fn at(&self, t: f64) -> DMatrix<Complex64> {
        let d = self.detunings.len();
        let wd = 2.0 * PI * self.lab.pulse.drive_freq;
        let mut h = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, self.detunings.iter().map(|x| z(*x))));
        if self.rwa {
            let half = self.lab.complex_envelope(t) * 0.5;
            for k in 0..d - 1 {
                let v = half * self.lab.drive[(k, k + 1)];
                h[(k, k + 1)] += v;
                h[(k + 1, k)] += v.conj();
            }
        } else {
            let c = self.lab.drive_coefficient(t);
            for j in 0..d {
                for k in 0..d {
                    let phase = Complex64::from_polar(1.0, wd * t * (j as f64 - k as f64));
                    h[(j, k)] += self.lab.drive[(j, k)] * phase * c;
                }
            }
        }
        h
    }
}

pub fn rotating_frame(h: &DriveHamiltonian, rwa: bool) -> RotatingHamiltonian {
    let fd = h.pulse.drive_freq;
    let raw: Vec<f64> = h.energies.iter().enumerate().map(|(k, e)| 2.0 * PI * (e - k as f64 * fd)).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    RotatingHamiltonian { detunings: raw.iter().map(|x| x - mean).collect(), lab: h.clone(), rwa }
}

/// exp(iω_d t n̂) on d levels.
pub fn frame_unitary(drive_freq: f64, t: f64, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        d,
        (0..d).map(|k| Complex64::from_polar(1.0, 2.0 * PI * drive_freq * t * k as f64)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_defect;
    use crate::spectra::{FluxoniumParams, TransmonParams};

    fn transmon_drive(d: usize) -> DriveHamiltonian {
        let p = QubitParams::Transmon(TransmonParams::new(7.68, 0.31, 0.0));
        let s = p.spectrum().unwrap();
        let pulse = PulseSpec::new(1e8, 28.0, s.omega01());
        drive_hamiltonian(&p, &s, &pulse, d).unwrap()
    }

    #[test]
    fn ladder_ratio_close_to_harmonic() {
        let h = transmon_drive(4);
        let r = h.drive[(1, 2)].norm() / h.drive[(0, 1)].norm();
        assert!((r / 2f64.sqrt() - 1.0).abs() < 0.1, "{r}");
        assert_eq!(h.drive[(0, 1)], z(1.0));
    }

    #[test]
    fn hermitian_at_all_samples() {
        let h = transmon_drive(4);
        for k in 0..=56 {
            let t = k as f64 * 0.5;
            assert!(hermiticity_defect(&h.at(t)) < 1e-14);
            assert!(hermiticity_defect(&rotating_frame(&h, false).at(t)) < 1e-14);
        }
    }

    #[test]
    fn imaginary_charge_operator_is_gauge_fixed_real_on_ladder() {
        let p = QubitParams::Fluxonium(FluxoniumParams::new(4.8, 0.99, 0.89, 0.5));
        let s = p.spectrum().unwrap();
        let pulse = PulseSpec::new(1e7, 62.0, s.omega01());
        let h = drive_hamiltonian(&p, &s, &pulse, 4).unwrap();
        for k in 0..3 {
            assert!(h.drive[(k, k + 1)].im.abs() < 1e-12 && h.drive[(k, k + 1)].re >= 0.0);
        }
    }

    #[test]
    fn resonant_two_level_rwa_has_no_static_part() {
        let h = transmon_drive(2);
        let r = rotating_frame(&h, true);
        assert!(r.detunings.iter().all(|x| x.abs() < 1e-12));
        // Mid-pulse the coupling is Ω/2 on the y quadrature.
        let m = r.at(14.0);
        let expect = h.pulse.amplitude * 1e-9 / 2.0;
        assert!((m[(0, 1)] - Complex64::new(0.0, -expect)).norm() < 1e-12);
    }

    #[test]
    fn too_many_levels_rejected() {
        let p = QubitParams::Transmon(TransmonParams::new(7.68, 0.31, 0.0));
        let s = p.spectrum().unwrap();
        let pulse = PulseSpec::new(1e8, 28.0, s.omega01());
        assert!(drive_hamiltonian(&p, &s, &pulse, s.dim() + 1).is_err());
    }
}
