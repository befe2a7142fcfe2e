use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Euler angles of a single-qubit gate U = R_z(φ)·R_y(θ)·R_z(λ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateSpec {
    pub theta: f64,
    pub phi: f64,
    pub lam: f64,
}

impl GateSpec {
    pub fn new(theta: f64, phi: f64, lam: f64) -> Self {
        Self { theta, phi, lam }
    }

    /// π rotation, X up to global phase.
    pub fn x() -> Self {
        Self::new(std::f64::consts::PI, 0.0, std::f64::consts::PI)
    }

    /// Hadamard up to global phase.
    pub fn hadamard() -> Self {
        Self::new(std::f64::consts::FRAC_PI_2, 0.0, std::f64::consts::PI)
    }

    /// The same gate with θ and λ both shifted by `dz`.
    pub fn detuned(&self, dz: f64) -> Self {
        Self { theta: self.theta + dz, lam: self.lam + dz, ..*self }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// exp(−iθσ_z/2).
pub fn rz(theta: f64) -> Matrix2<Complex64> {
    let h = theta / 2.0;
    Matrix2::new(c(h.cos(), -h.sin()), c(0.0, 0.0), c(0.0, 0.0), c(h.cos(), h.sin()))
}

/// exp(−iθσ_y/2).
pub fn ry(theta: f64) -> Matrix2<Complex64> {
    let (s, co) = (theta / 2.0).sin_cos();
    Matrix2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

/// exp(−iθσ_x/2).
pub fn rx(theta: f64) -> Matrix2<Complex64> {
    let (s, co) = (theta / 2.0).sin_cos();
    Matrix2::new(c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0))
}

/// R_z(φ)·R_y(θ)·R_z(λ).
pub fn universal_gate(g: &GateSpec) -> Matrix2<Complex64> {
    rz(g.phi) * ry(g.theta) * rz(g.lam)
}

/// Embed a qubit gate in a d-level space, acting as identity above |1⟩.
pub fn embed(u: &Matrix2<Complex64>, d: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::identity(d, d);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = u[(i, j)];
        }
    }
    out
}

/// ⟨σ_z⟩ after resonant driving with pulse area Ωτ, starting in |0⟩
/// (σ_z = +1 on |1⟩ in this convention): −cos(Ωτ).
pub fn rabi_population(omega_times_tau: f64) -> f64 {
    -omega_times_tau.cos()
}
