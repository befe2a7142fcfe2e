use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{Basis, EnergySpectrum, FluxoniumParams, QubitOperator, TransmonParams};
use crate::linalg;

fn charge_numbers(n_cut: usize) -> impl Iterator<Item = f64> {
    let n = n_cut as i64;
    (-n..=n).map(|k| k as f64)
}

pub(super) fn transmon_hamiltonian(p: &TransmonParams) -> DMatrix<f64> {
    let dim = 2 * p.n_cut + 1;
    let mut h = DMatrix::zeros(dim, dim);
    for (k, n) in charge_numbers(p.n_cut).enumerate() {
        h[(k, k)] = 4.0 * p.e_c * (n - p.n_g).powi(2);
        if k + 1 < dim {
            // cos φ̂ = (|n⟩⟨n+1| + |n+1⟩⟨n|) / 2
            h[(k, k + 1)] = -0.5 * p.e_j;
            h[(k + 1, k)] = -0.5 * p.e_j;
        }
    }
    h
}

pub(super) fn transmon_eigensystem(p: &TransmonParams) -> EnergySpectrum {
    let (values, vectors) = linalg::eigh(&transmon_hamiltonian(p));
    EnergySpectrum::from_eigh(values, vectors, Basis::Charge { n_cut: p.n_cut })
}

pub(super) fn transmon_charge(p: &TransmonParams) -> QubitOperator {
    let diag = DVector::from_iterator(2 * p.n_cut + 1, charge_numbers(p.n_cut));
    QubitOperator::Real(DMatrix::from_diagonal(&diag))
}

fn transmon_cos_phi(n_cut: usize) -> DMatrix<f64> {
    let dim = 2 * n_cut + 1;
    let mut c = DMatrix::zeros(dim, dim);
    for k in 0..dim - 1 {
        c[(k, k + 1)] = 0.5;
        c[(k + 1, k)] = 0.5;
    }
    c
}

pub(super) fn transmon_d_ej(p: &TransmonParams) -> QubitOperator {
    QubitOperator::Real(-transmon_cos_phi(p.n_cut))
}

pub(super) fn transmon_d_ng(p: &TransmonParams) -> QubitOperator {
    let diag = DVector::from_iterator(2 * p.n_cut + 1, charge_numbers(p.n_cut).map(|n| -8.0 * p.e_c * (n - p.n_g)));
    QubitOperator::Real(DMatrix::from_diagonal(&diag))
}

/// (a + a†)/√2 and (a† - a)/√2 on a truncated oscillator basis.
fn quadratures(dim: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut x = DMatrix::zeros(dim, dim);
    let mut p = DMatrix::zeros(dim, dim);
    for k in 0..dim - 1 {
        let s = ((k + 1) as f64 / 2.0).sqrt();
        x[(k, k + 1)] = s;
        x[(k + 1, k)] = s;
        // a† has ⟨k+1|a†|k⟩ = √(k+1)
        p[(k + 1, k)] = s;
        p[(k, k + 1)] = -s;
    }
    (x, p)
}

pub(super) fn fluxonium_phase_matrix(p: &FluxoniumParams) -> DMatrix<f64> {
    quadratures(p.osc_dim).0 * p.phi_osc()
}

fn shifted_cos_sin(p: &FluxoniumParams) -> (DMatrix<f64>, DMatrix<f64>) {
    let phi = fluxonium_phase_matrix(p);
    let shift = 2.0 * PI * p.phi_ext;
    let eig = phi.symmetric_eigen();
    let v = &eig.eigenvectors;
    let mut cv = v.clone();
    let mut sv = v.clone();
    for k in 0..p.osc_dim {
        let arg = eig.eigenvalues[k] - shift;
        cv.column_mut(k).scale_mut(arg.cos());
        sv.column_mut(k).scale_mut(arg.sin());
    }
    (&cv * v.transpose(), &sv * v.transpose())
}

pub(super) fn fluxonium_hamiltonian(p: &FluxoniumParams) -> DMatrix<f64> {
    let (cos, _) = shifted_cos_sin(p);
    let wp = p.plasma_frequency();
    let mut h = cos * (-p.e_j);
    for k in 0..p.osc_dim {
        h[(k, k)] += wp * (k as f64 + 0.5);
    }
    // Symmetrize away round-off from the operator cosine.
    (&h + h.transpose()) * 0.5
}

pub(super) fn fluxonium_eigensystem(p: &FluxoniumParams) -> EnergySpectrum {
    let (values, vectors) = linalg::eigh(&fluxonium_hamiltonian(p));
    EnergySpectrum::from_eigh(values, vectors, Basis::Oscillator { dim: p.osc_dim, phi_osc: p.phi_osc() })
}

/// N̂ = i (a† - a) / (√2 φ_osc)
pub(super) fn fluxonium_charge(p: &FluxoniumParams) -> QubitOperator {
    QubitOperator::Imaginary(quadratures(p.osc_dim).1 / p.phi_osc())
}

pub(super) fn fluxonium_phase(p: &FluxoniumParams) -> QubitOperator {
    QubitOperator::Real(fluxonium_phase_matrix(p))
}

pub(super) fn fluxonium_d_ej(p: &FluxoniumParams) -> QubitOperator {
    QubitOperator::Real(-shifted_cos_sin(p).0)
}

/// ∂H/∂phi_ext = -2π E_J sin(φ̂ - 2π·phi_ext), GHz per flux quantum.
pub(super) fn fluxonium_d_flux(p: &FluxoniumParams) -> QubitOperator {
    QubitOperator::Real(shifted_cos_sin(p).1 * (-2.0 * PI * p.e_j))
}
