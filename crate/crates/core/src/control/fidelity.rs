use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigh_complex, hermiticity_defect};

/// Tolerance on Hermiticity, trace and positivity of fidelity inputs.
pub const STATE_TOLERANCE: f64 = 1e-9;

/// Check that `rho` is a density matrix within `tol`.
pub fn check_density(rho: &DMatrix<Complex64>, tol: f64) -> Result<()> {
    if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
        return Err(Error::NonPhysicalState("matrix is not square".into()));
    }
    let herm = hermiticity_defect(rho);
    if herm > tol {
        return Err(Error::NonPhysicalState(format!("not Hermitian (defect {herm:.2e})")));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(Error::NonPhysicalState(format!("trace {tr} is not 1")));
    }
    let (vals, _) = eigh_complex(rho);
    if vals[0] < -tol {
        return Err(Error::NonPhysicalState(format!("negative eigenvalue {:.2e}", vals[0])));
    }
    Ok(())
}

/// |ψ⟩⟨ψ| for a normalized copy of ψ.
pub fn pure_state(psi: &DVector<Complex64>) -> DMatrix<Complex64> {
    let v = psi / Complex64::new(psi.norm(), 0.0);
    &v * v.adjoint()
}

/// √ρ with round-off eigenvalues (below 1e-14 of the largest) set to zero,
/// since their square roots would otherwise reach ~1e-8.
fn floored_sqrt(rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (vals, vecs) = eigh_complex(&((rho + rho.adjoint()) * Complex64::new(0.5, 0.0)));
    let floor = 1e-14 * vals.iter().fold(0.0f64, |m, v| m.max(*v));
    let mut scaled = vecs.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex64::new(if vals[k] > floor { vals[k].sqrt() } else { 0.0 }, 0.0);
    }
    &scaled * vecs.adjoint()
}

/// Uhlmann fidelity [Tr √(√ρ χ √ρ)]², clamped to [0, 1].
///
/// Evaluated as the squared nuclear norm of √ρ·√χ, which avoids taking square
/// roots of eigenvalues that are themselves products of small populations.
pub fn state_fidelity(rho: &DMatrix<Complex64>, chi: &DMatrix<Complex64>) -> Result<f64> {
    check_density(rho, STATE_TOLERANCE)?;
    check_density(chi, STATE_TOLERANCE)?;
    if rho.shape() != chi.shape() {
        return Err(Error::NonPhysicalState("states have different dimensions".into()));
    }
    let m = floored_sqrt(rho) * floored_sqrt(chi);
    let root: f64 = m.svd(false, false).singular_values.sum();
    Ok((root * root).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn self_fidelity_is_one() {
        let rho = DMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, -0.2), c(0.1, 0.2), c(0.3, 0.0)]);
        assert!((state_fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_pure_states() {
        let a = pure_state(&DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        let b = pure_state(&DVector::from_vec(vec![c(0.0, 0.0), c(0.0, 1.0)]));
        assert!(state_fidelity(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn mixed_versus_pure_is_half() {
        let mixed = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        let psi = pure_state(&DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]));
        assert!((state_fidelity(&mixed, &psi).unwrap() - 0.5).abs() < 1e-12);
        assert!((state_fidelity(&psi, &mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_unnormalized_state() {
        let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![c(0.5, 0.0), c(0.6, 0.0)]));
        assert!(matches!(state_fidelity(&bad, &bad), Err(Error::NonPhysicalState(_))));
    }
}
