//! Transmon and fluxonium Hamiltonians, their spectra and derived figures of
//! merit (transition frequency, anharmonicity, charge dispersion).
//!
//! All energies are in GHz (h = 1).

mod hamiltonian;
mod profile;
mod wavefunction;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use profile::{charge_dispersion_decay, flux_sweep, qubit_profile, DispersionPoint, FluxPoint, QubitProfile};
pub use wavefunction::wavefunction;

/// Default charge-basis cutoff: basis spans n = -30..=30.
pub const DEFAULT_N_CUT: usize = 30;
/// Default harmonic-oscillator basis dimension for the fluxonium.
pub const DEFAULT_OSC_DIM: usize = 110;

const MIN_N_CUT: usize = 10;
const MIN_OSC_DIM: usize = 60;
/// Relative change of ω01 and α allowed when the cutoff is doubled.
const CONVERGENCE_TOL: f64 = 1e-9;
/// Floor (GHz) for the denominator of the relative convergence test, so a
/// near-degenerate doublet does not demand absolute precision below 1 kHz.
const CONVERGENCE_FLOOR_GHZ: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransmonParams {
    pub e_j: f64,
    pub e_c: f64,
    pub n_g: f64,
    pub n_cut: usize,
}

impl TransmonParams {
    pub fn new(e_j: f64, e_c: f64, n_g: f64) -> Self {
        Self { e_j, e_c, n_g, n_cut: DEFAULT_N_CUT }
    }

    pub fn validate(&self) -> Result<()> {
        // E_J = 0 (bare charging levels) is allowed as a limiting case.
        if !(self.e_j >= 0.0 && self.e_j.is_finite()) {
            return Err(Error::InvalidParameter(format!("transmon e_j = {}", self.e_j)));
        }
        if !(self.e_c > 0.0 && self.e_c.is_finite()) {
            return Err(Error::InvalidParameter(format!("transmon e_c = {}", self.e_c)));
        }
        if !self.n_g.is_finite() {
            return Err(Error::InvalidParameter("transmon n_g is not finite".into()));
        }
        if self.n_cut < MIN_N_CUT {
            return Err(Error::InvalidParameter(format!("n_cut = {} below minimum {MIN_N_CUT}", self.n_cut)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxoniumParams {
    pub e_j: f64,
    pub e_c: f64,
    pub e_l: f64,
    /// External flux in units of the flux quantum.
    pub phi_ext: f64,
    pub osc_dim: usize,
}

impl FluxoniumParams {
    pub fn new(e_j: f64, e_c: f64, e_l: f64, phi_ext: f64) -> Self {
        Self { e_j, e_c, e_l, phi_ext, osc_dim: DEFAULT_OSC_DIM }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e_j >= 0.0 && self.e_j.is_finite()) {
            return Err(Error::InvalidParameter(format!("fluxonium e_j = {}", self.e_j)));
        }
        for (name, v) in [("e_c", self.e_c), ("e_l", self.e_l)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("fluxonium {name} = {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.phi_ext) {
            return Err(Error::InvalidParameter(format!("phi_ext = {} outside [0, 1]", self.phi_ext)));
        }
        if self.osc_dim < MIN_OSC_DIM {
            return Err(Error::InvalidParameter(format!("osc_dim = {} below minimum {MIN_OSC_DIM}", self.osc_dim)));
        }
        Ok(())
    }

    /// Oscillator length of the E_C/E_L quadratic part, (8 E_C / E_L)^(1/4).
    pub fn phi_osc(&self) -> f64 {
        (8.0 * self.e_c / self.e_l).powf(0.25)
    }

    /// Plasma frequency √(8 E_C E_L) in GHz.
    pub fn plasma_frequency(&self) -> f64 {
        (8.0 * self.e_c * self.e_l).sqrt()
    }
}

/// A device the pipeline knows how to diagonalize.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QubitParams {
    Transmon(TransmonParams),
    Fluxonium(FluxoniumParams),
}

/// Sweepable device parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    EJ,
    EC,
    EL,
    Ng,
    PhiExt,
}

impl Parameter {
    pub fn name(&self) -> &'static str {
        match self {
            Parameter::EJ => "e_j",
            Parameter::EC => "e_c",
            Parameter::EL => "e_l",
            Parameter::Ng => "n_g",
            Parameter::PhiExt => "phi_ext",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e_j" | "ej" => Some(Parameter::EJ),
            "e_c" | "ec" => Some(Parameter::EC),
            "e_l" | "el" => Some(Parameter::EL),
            "n_g" | "ng" => Some(Parameter::Ng),
            "phi_ext" | "phiext" | "flux" => Some(Parameter::PhiExt),
            _ => None,
        }
    }
}

impl QubitParams {
    pub fn validate(&self) -> Result<()> {
        match self {
            QubitParams::Transmon(p) => p.validate(),
            QubitParams::Fluxonium(p) => p.validate(),
        }
    }

    pub fn e_j(&self) -> f64 {
        match self {
            QubitParams::Transmon(p) => p.e_j,
            QubitParams::Fluxonium(p) => p.e_j,
        }
    }

    pub fn e_c(&self) -> f64 {
        match self {
            QubitParams::Transmon(p) => p.e_c,
            QubitParams::Fluxonium(p) => p.e_c,
        }
    }

    pub fn get(&self, param: Parameter) -> Result<f64> {
        match (self, param) {
            (_, Parameter::EJ) => Ok(self.e_j()),
            (_, Parameter::EC) => Ok(self.e_c()),
            (QubitParams::Transmon(p), Parameter::Ng) => Ok(p.n_g),
            (QubitParams::Fluxonium(p), Parameter::EL) => Ok(p.e_l),
            (QubitParams::Fluxonium(p), Parameter::PhiExt) => Ok(p.phi_ext),
            _ => Err(self.unsupported(param)),
        }
    }

    /// Copy with one parameter replaced. Does not validate.
    pub fn with(&self, param: Parameter, value: f64) -> Result<Self> {
        let mut out = *self;
        match (&mut out, param) {
            (QubitParams::Transmon(p), Parameter::EJ) => p.e_j = value,
            (QubitParams::Transmon(p), Parameter::EC) => p.e_c = value,
            (QubitParams::Transmon(p), Parameter::Ng) => p.n_g = value,
            (QubitParams::Fluxonium(p), Parameter::EJ) => p.e_j = value,
            (QubitParams::Fluxonium(p), Parameter::EC) => p.e_c = value,
            (QubitParams::Fluxonium(p), Parameter::EL) => p.e_l = value,
            (QubitParams::Fluxonium(p), Parameter::PhiExt) => p.phi_ext = value,
            _ => return Err(self.unsupported(param)),
        }
        Ok(out)
    }

    fn unsupported(&self, param: Parameter) -> Error {
        let kind = match self {
            QubitParams::Transmon(_) => "transmon",
            QubitParams::Fluxonium(_) => "fluxonium",
        };
        Error::InvalidParameter(format!("{kind} has no parameter {}", param.name()))
    }

    /// Diagonalize with the cutoff convergence check.
    pub fn spectrum(&self) -> Result<EnergySpectrum> {
        match self {
            QubitParams::Transmon(p) => transmon_spectrum(p),
            QubitParams::Fluxonium(p) => fluxonium_spectrum(p),
        }
    }

    /// Diagonalize without the (costly) cutoff-doubling check. Used inside
    /// finite differences and dense sweeps after the base point was checked.
    pub fn eigensystem(&self) -> Result<EnergySpectrum> {
        self.validate()?;
        Ok(match self {
            QubitParams::Transmon(p) => hamiltonian::transmon_eigensystem(p),
            QubitParams::Fluxonium(p) => hamiltonian::fluxonium_eigensystem(p),
        })
    }

    /// Charge number operator N̂ in the construction basis.
    pub fn charge_operator(&self) -> QubitOperator {
        match self {
            QubitParams::Transmon(p) => hamiltonian::transmon_charge(p),
            QubitParams::Fluxonium(p) => hamiltonian::fluxonium_charge(p),
        }
    }

    /// Reduced phase operator φ̂ (fluxonium only; the transmon phase is compact).
    pub fn phase_operator(&self) -> Result<QubitOperator> {
        match self {
            QubitParams::Transmon(_) => {
                Err(Error::InvalidParameter("transmon phase operator is not single-valued in the charge basis".into()))
            }
            QubitParams::Fluxonium(p) => Ok(hamiltonian::fluxonium_phase(p)),
        }
    }

    /// ∂Ĥ/∂λ in GHz per unit of λ.
    pub fn d_hamiltonian(&self, param: Parameter) -> Result<QubitOperator> {
        match (self, param) {
            (QubitParams::Transmon(p), Parameter::EJ) => Ok(hamiltonian::transmon_d_ej(p)),
            (QubitParams::Transmon(p), Parameter::Ng) => Ok(hamiltonian::transmon_d_ng(p)),
            (QubitParams::Fluxonium(p), Parameter::EJ) => Ok(hamiltonian::fluxonium_d_ej(p)),
            (QubitParams::Fluxonium(p), Parameter::PhiExt) => Ok(hamiltonian::fluxonium_d_flux(p)),
            _ => Err(Error::InvalidParameter(format!("∂H/∂{} not available for this device", param.name()))),
        }
    }

    /// Hamiltonian matrix in the construction basis (before the E0 shift).
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        match self {
            QubitParams::Transmon(p) => hamiltonian::transmon_hamiltonian(p),
            QubitParams::Fluxonium(p) => hamiltonian::fluxonium_hamiltonian(p),
        }
    }

    fn doubled_cutoff(&self) -> Self {
        match *self {
            QubitParams::Transmon(p) => QubitParams::Transmon(TransmonParams { n_cut: 2 * p.n_cut, ..p }),
            QubitParams::Fluxonium(p) => QubitParams::Fluxonium(FluxoniumParams { osc_dim: 2 * p.osc_dim, ..p }),
        }
    }

    fn cutoff(&self) -> usize {
        match self {
            QubitParams::Transmon(p) => p.n_cut,
            QubitParams::Fluxonium(p) => p.osc_dim,
        }
    }
}

/// Basis in which eigenvectors are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "basis", rename_all = "snake_case")]
pub enum Basis {
    /// Charge states |n⟩, n = -n_cut..=n_cut, index k ↔ n = k - n_cut.
    Charge { n_cut: usize },
    /// Harmonic-oscillator eigenstates of the E_C/E_L part.
    Oscillator { dim: usize, phi_osc: f64 },
}

/// Ordered eigenvalues (E0 shifted to zero) and eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySpectrum {
    pub levels: Vec<f64>,
    /// Column k is the k-th eigenvector. All Hamiltonians built here are real
    /// symmetric, so amplitudes are real.
    pub states: DMatrix<f64>,
    pub basis: Basis,
}

impl EnergySpectrum {
    pub(crate) fn from_eigh(values: Vec<f64>, states: DMatrix<f64>, basis: Basis) -> Self {
        let e0 = values[0];
        Self { levels: values.iter().map(|e| e - e0).collect(), states, basis }
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// E_j - E_i in GHz.
    pub fn transition(&self, i: usize, j: usize) -> f64 {
        self.levels[j] - self.levels[i]
    }

    pub fn omega01(&self) -> f64 {
        self.transition(0, 1)
    }

    /// (E2 - E1) - (E1 - E0).
    pub fn alpha(&self) -> f64 {
        self.transition(1, 2) - self.transition(0, 1)
    }
}

/// A real operator K, or a purely imaginary one iK, in the construction basis.
#[derive(Debug, Clone, PartialEq)]
pub enum QubitOperator {
    Real(DMatrix<f64>),
    Imaginary(DMatrix<f64>),
}

impl QubitOperator {
    fn parts(&self) -> (&DMatrix<f64>, Complex64) {
        match self {
            QubitOperator::Real(k) => (k, Complex64::new(1.0, 0.0)),
            QubitOperator::Imaginary(k) => (k, Complex64::new(0.0, 1.0)),
        }
    }

    /// ⟨i|O|j⟩ with eigenvectors from `spectrum`.
    pub fn matrix_element(&self, spectrum: &EnergySpectrum, i: usize, j: usize) -> Complex64 {
        let (k, phase) = self.parts();
        let vi = spectrum.states.column(i);
        let vj = spectrum.states.column(j);
        phase * vi.dot(&(k * vj))
    }

    /// The operator projected onto the lowest `d` eigenstates.
    pub fn in_eigenbasis(&self, spectrum: &EnergySpectrum, d: usize) -> DMatrix<Complex64> {
        let (k, phase) = self.parts();
        let v = spectrum.states.columns(0, d);
        let m = v.transpose() * k * v;
        m.map(|x| phase * x)
    }
}

fn check_convergence(params: &QubitParams, base: &EnergySpectrum, doubled: &EnergySpectrum) -> Result<()> {
    for (quantity, a, b) in [("omega01", base.omega01(), doubled.omega01()), ("alpha", base.alpha(), doubled.alpha())] {
        let rel = (a - b).abs() / a.abs().max(CONVERGENCE_FLOOR_GHZ);
        if rel >= CONVERGENCE_TOL {
            return Err(Error::CutoffNotConverged { cutoff: params.cutoff(), quantity, relative_change: rel });
        }
    }
    Ok(())
}

fn checked_spectrum(params: QubitParams) -> Result<EnergySpectrum> {
    let base = params.eigensystem()?;
    if base.dim() < 3 {
        return Err(Error::TooFewLevels { found: base.dim(), needed: 3 });
    }
    let doubled = params.doubled_cutoff().eigensystem()?;
    check_convergence(&params, &base, &doubled)?;
    Ok(base)
}

/// Diagonalize the transmon in the charge basis,
/// H = 4E_C (N̂ - n_g)² - E_J cos φ̂, with the cutoff-doubling check.
pub fn transmon_spectrum(p: &TransmonParams) -> Result<EnergySpectrum> {
    checked_spectrum(QubitParams::Transmon(*p))
}

/// Diagonalize the fluxonium in the oscillator basis,
/// H = 4E_C N̂² + ½E_L φ̂² - E_J cos(φ̂ - 2π·phi_ext).
pub fn fluxonium_spectrum(p: &FluxoniumParams) -> Result<EnergySpectrum> {
    checked_spectrum(QubitParams::Fluxonium(*p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1() -> TransmonParams {
        TransmonParams::new(7.68, 0.31, 0.0)
    }

    #[test]
    fn free_charging_levels() {
        let s = transmon_spectrum(&TransmonParams::new(0.0, 0.25, 0.0)).unwrap();
        let expect = [0.0, 1.0, 1.0, 4.0, 4.0, 9.0, 9.0];
        for (e, x) in s.levels.iter().zip(expect) {
            assert!((e - x).abs() < 1e-12, "{e} vs {x}");
        }
    }

    #[test]
    fn transmon_close_to_perturbative_estimate() {
        let s = transmon_spectrum(&table1()).unwrap();
        let pert = (8.0_f64 * 7.68 * 0.31).sqrt() - 0.31;
        assert!((s.omega01() - pert).abs() / pert < 0.05);
        assert!(s.alpha() < 0.0);
    }

    #[test]
    fn harmonic_fluxonium_without_junction() {
        let p = FluxoniumParams::new(0.0, 0.7, 1.3, 0.5);
        let s = fluxonium_spectrum(&p).unwrap();
        let gap = (8.0_f64 * 0.7 * 1.3).sqrt();
        for k in 1..6 {
            assert!((s.levels[k] - k as f64 * gap).abs() < 1e-10);
        }
    }

    #[test]
    fn tiny_cutoff_rejected() {
        let mut p = table1();
        p.n_cut = 4;
        assert!(matches!(transmon_spectrum(&p), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn unconverged_cutoff_reports_cutoff() {
        // A nearly free rotor needs many charge states; n_cut = 10 fails.
        let mut p = TransmonParams::new(2000.0, 0.05, 0.0);
        p.n_cut = 10;
        match transmon_spectrum(&p) {
            Err(Error::CutoffNotConverged { cutoff, .. }) => assert_eq!(cutoff, 10),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn parameter_access_round_trips() {
        let q = QubitParams::Transmon(table1());
        let q2 = q.with(Parameter::Ng, 0.25).unwrap();
        assert_eq!(q2.get(Parameter::Ng).unwrap(), 0.25);
        assert!(q.with(Parameter::PhiExt, 0.5).is_err());
    }

    #[test]
    fn hamiltonians_are_symmetric() {
        for q in [
            QubitParams::Transmon(TransmonParams::new(7.68, 0.31, 0.3)),
            QubitParams::Fluxonium(FluxoniumParams::new(4.8, 0.99, 0.89, 0.37)),
        ] {
            let h = q.hamiltonian();
            let defect = (&h - h.transpose()).amax() / h.amax();
            assert!(defect < 1e-12);
        }
    }
}
