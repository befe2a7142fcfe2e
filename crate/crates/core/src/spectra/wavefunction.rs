use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Basis, EnergySpectrum};
use crate::error::{Error, Result};

/// Real amplitude of eigenstate `level` in the phase representation, sampled
/// on `phi_grid` and normalized to unit L2 norm under the trapezoidal rule.
///
/// The global phase is fixed so the largest sample is real and positive; the
/// real part is returned.
pub fn wavefunction(s: &EnergySpectrum, level: usize, phi_grid: &[f64]) -> Result<Vec<f64>> {
    if level >= s.dim() {
        return Err(Error::LevelOutOfRange { level, dim: s.dim() });
    }
    if phi_grid.len() < 2 {
        return Err(Error::InvalidParameter("wavefunction grid needs at least 2 points".into()));
    }
    let coeffs = s.states.column(level);
    let raw: Vec<Complex64> = match s.basis {
        Basis::Charge { n_cut } => phi_grid
            .iter()
            .map(|&phi| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, c) in coeffs.iter().enumerate() {
                    let n = k as f64 - n_cut as f64;
                    acc += Complex64::from_polar(*c, n * phi);
                }
                acc / (2.0 * PI).sqrt()
            })
            .collect(),
        Basis::Oscillator { phi_osc, .. } => phi_grid
            .iter()
            .map(|&phi| {
                let basis = oscillator_functions(phi / phi_osc, coeffs.len());
                let amp: f64 = basis.iter().zip(coeffs.iter()).map(|(b, c)| b * c).sum();
                Complex64::new(amp / phi_osc.sqrt(), 0.0)
            })
            .collect(),
    };

    let peak = raw.iter().copied().max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap()).unwrap();
    let rot = if peak.norm() > 0.0 { peak.conj() / peak.norm() } else { Complex64::new(1.0, 0.0) };
    let mut psi: Vec<f64> = raw.iter().map(|z| (z * rot).re).collect();

    let norm = trapezoid(phi_grid, &psi.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
    if !(norm > 0.0) {
        return Err(Error::NonFinite("wavefunction norm"));
    }
    psi.iter_mut().for_each(|x| *x /= norm);
    Ok(psi)
}

/// Normalized Hermite functions ψ_0..ψ_{n-1} at x, by the stable three-term
/// recurrence.
fn oscillator_functions(x: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let psi0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(psi0);
    if n > 1 {
        out.push(2f64.sqrt() * x * psi0);
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_functions_are_orthonormal() {
        let xs: Vec<f64> = (0..4001).map(|i| -12.0 + 24.0 * i as f64 / 4000.0).collect();
        let table: Vec<Vec<f64>> = xs.iter().map(|&x| oscillator_functions(x, 6)).collect();
        for a in 0..6 {
            for b in 0..6 {
                let y: Vec<f64> = table.iter().map(|t| t[a] * t[b]).collect();
                let ip = trapezoid(&xs, &y);
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-9, "<{a}|{b}> = {ip}");
            }
        }
    }

    #[test]
    fn level_out_of_range() {
        let s = EnergySpectrum {
            levels: vec![0.0, 1.0, 2.0],
            states: nalgebra::DMatrix::identity(3, 3),
            basis: Basis::Charge { n_cut: 1 },
        };
        assert!(matches!(wavefunction(&s, 3, &[0.0, 1.0]), Err(Error::LevelOutOfRange { level: 3, dim: 3 })));
    }
}
