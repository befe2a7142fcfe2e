use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use scqkit::control::*;

fn unitarity_error(u: &DMatrix<Complex64>) -> f64 {
    (u.adjoint() * u - DMatrix::identity(u.nrows(), u.ncols())).norm()
}

/// Composite Simpson integral of the envelope, independent of the closed form.
fn simpson_area(p: &PulseSpec) -> f64 {
    let n = 4000;
    let h = p.tau / n as f64;
    let f = |k: usize| gaussian_envelope(k as f64 * h, p).unwrap();
    let inner: f64 = (1..n).map(|k| if k % 2 == 1 { 4.0 * f(k) } else { 2.0 * f(k) }).sum();
    (f(0) + f(n) + inner) * h / 3.0 * 1e-9
}

#[test]
fn envelope_vanishes_at_edges_and_peaks_in_the_middle() {
    let p = PulseSpec::new(2.0e8, 28.0, 4.0);
    assert!(gaussian_envelope(0.0, &p).unwrap().abs() < 1e-6);
    assert!(gaussian_envelope(28.0, &p).unwrap().abs() < 1e-6);
    assert!((gaussian_envelope(14.0, &p).unwrap() - 2.0e8).abs() < 1e-3);
    assert!(gaussian_envelope(29.0, &p).is_err());
}

#[test]
fn amplitude_targets_requested_area() {
    for tau in [10.0, 28.0, 62.0] {
        let p = PulseSpec::new(1.0, tau, 4.0).with_area(std::f64::consts::PI);
        assert!((simpson_area(&p) - std::f64::consts::PI).abs() < 1e-9);
        assert!((p.area() - std::f64::consts::PI).abs() < 1e-12);
    }
}

#[test]
fn named_gates_match_their_matrices() {
    let x = universal_gate(&GateSpec::x());
    // |⟨1|U|0⟩| = 1 for a π rotation.
    assert!((x[(1, 0)].norm() - 1.0).abs() < 1e-12);
    let h = universal_gate(&GateSpec::hadamard());
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for v in h.iter() {
        assert!((v.norm() - s).abs() < 1e-12);
    }
}

#[test]
fn fidelity_of_orthogonal_and_identical_states() {
    let ket = |v: [f64; 2]| nalgebra::DVector::from_iterator(2, v.iter().map(|x| Complex64::new(*x, 0.0)));
    let a = pure_state(&ket([1.0, 0.0]));
    let b = pure_state(&ket([0.0, 1.0]));
    assert!(state_fidelity(&a, &b).unwrap() < 1e-12);
    assert!((state_fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    let mixed = (&a + &b) * Complex64::new(0.5, 0.0);
    assert!((state_fidelity(&a, &mixed).unwrap() - 0.5).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn drag_quadrature_is_beta_times_derivative(
        tau in 8.0f64..80.0, beta in -1.0f64..1.0, frac in 0.05f64..0.95,
    ) {
        let p = PulseSpec { beta, ..PulseSpec::new(1.0e8, tau, 4.0) };
        let t = frac * tau;
        let h = 1e-4 * tau;
        let fd = (gaussian_envelope(t + h, &p).unwrap() - gaussian_envelope(t - h, &p).unwrap()) / (2.0 * h);
        let (i, q) = drag_envelope(t, &p).unwrap();
        prop_assert!((i - gaussian_envelope(t, &p).unwrap()).abs() < 1e-6);
        prop_assert!((q - beta * fd).abs() <= 1e-5 * (p.amplitude / tau));
    }

    #[test]
    fn universal_gates_are_unitary(theta in -7.0f64..7.0, phi in -7.0f64..7.0, lam in -7.0f64..7.0, d in 2usize..6) {
        let u = universal_gate(&GateSpec::new(theta, phi, lam));
        let e = embed(&u, d);
        prop_assert!(unitarity_error(&e) < 1e-12);
        // Decomposition R_z(φ)·R_y(θ)·R_z(λ) holds by construction; check R_x = R_z(−π/2)·R_y·R_z(π/2).
        let rx_alt = rz(-std::f64::consts::FRAC_PI_2) * ry(theta) * rz(std::f64::consts::FRAC_PI_2);
        prop_assert!((rx_alt - rx(theta)).norm() < 1e-12);
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(a in 0.0f64..1.0, b in 0.0f64..1.0, c in -0.3f64..0.3) {
        let rho = |p: f64, coh: f64| {
            let coh = coh.clamp(-(p * (1.0 - p)).sqrt(), (p * (1.0 - p)).sqrt());
            DMatrix::from_row_slice(2, 2, &[
                Complex64::new(1.0 - p, 0.0), Complex64::new(coh, 0.0),
                Complex64::new(coh, 0.0), Complex64::new(p, 0.0),
            ])
        };
        let (x, y) = (rho(a, c), rho(b, -c));
        let f = state_fidelity(&x, &y).unwrap();
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&f));
        prop_assert!((f - state_fidelity(&y, &x).unwrap()).abs() < 1e-7);
    }
}
