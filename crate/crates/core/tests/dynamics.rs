use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use scqkit::control::{rabi_population, PulseSpec};
use scqkit::dynamics::*;
use scqkit::DriveHamiltonian;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Weakly anharmonic ladder with a harmonic-oscillator drive operator.
fn ladder(d: usize, f01: f64, alpha: f64, pulse: PulseSpec) -> DriveHamiltonian {
    let energies = (0..d).map(|k| k as f64 * f01 + alpha * (k * k.saturating_sub(1)) as f64 / 2.0).collect();
    let drive =
        DMatrix::from_fn(d, d, |i, j| if i + 1 == j || j + 1 == i { c((i.max(j) as f64).sqrt()) } else { c(0.0) });
    DriveHamiltonian { energies, drive, pulse, epsilon: f01 * 1e9 * std::f64::consts::PI }
}

fn ground(d: usize) -> DMatrix<Complex64> {
    let mut r = DMatrix::zeros(d, d);
    r[(0, 0)] = c(1.0);
    r
}

#[test]
fn resonant_two_level_rotation_follows_rabi_formula() {
    let pulse = PulseSpec::new(1.0, 30.0, 5.0);
    let opts = EvolveOptions { frame: Frame::RotatingWave, max_step: Some(0.01) };
    for area in [0.3, 1.0, 2.0, std::f64::consts::PI] {
        let h = ladder(2, 5.0, 0.0, pulse.with_area(area));
        let r = lindblad_evolve_with(&h, &CollapseSet::default(), &ground(2), &[0.0, 30.0], &opts).unwrap();
        let sz = 2.0 * r.populations[1][1] - 1.0;
        assert!((sz - rabi_population(area)).abs() < 1e-6, "{area}: {sz}");
    }
}

#[test]
fn amplitude_damping_matches_exponential() {
    // Free decay of |1⟩ on two levels: p1(t) = e^{−Γt}.
    let h = ladder(2, 0.0, 0.0, PulseSpec::new(0.0, 1.0, 0.0));
    let gamma = 1.0e7;
    let mut rho = DMatrix::zeros(2, 2);
    rho[(1, 1)] = c(1.0);
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 * 20.0).collect();
    let opts = EvolveOptions { frame: Frame::Lab, max_step: Some(0.5) };
    let r = lindblad_evolve_with(&h, &CollapseSet::new(gamma, 0.0, 0.0), &rho, &grid, &opts).unwrap();
    for (t, p) in grid.iter().zip(&r.populations) {
        assert!((p[1] - (-gamma * t * 1e-9).exp()).abs() < 1e-8);
    }
}

#[test]
fn superoperator_composes_like_evolution() {
    let pulse = PulseSpec::new(0.0, 20.0, 4.0).with_area(std::f64::consts::FRAC_PI_2);
    let h = ladder(3, 4.0, -0.3, pulse);
    let rates = CollapseSet::new(2.0e4, 1.0e3, 5.0e5);
    let opts = EvolveOptions { frame: Frame::Rotating, max_step: None };
    let s = propagator_superoperator(&h, &rates, 0.0, 20.0, &opts).unwrap();
    let direct = lindblad_evolve_with(&h, &rates, &ground(3), &[0.0, 20.0], &opts).unwrap();
    assert!((apply_superoperator(&s, &ground(3)) - direct.final_state).norm() < 1e-10);
}

#[test]
fn unitary_propagator_preserves_norm() {
    let h = ladder(4, 4.0, -0.3, PulseSpec::new(0.0, 20.0, 4.0).with_area(std::f64::consts::PI));
    let u = unitary_propagator(|t| h.at(t), 0.0, 20.0, 200_000);
    let err = (u.adjoint() * &u - DMatrix::identity(4, 4)).norm();
    assert!(err < 1e-8, "{err}");
}

fn rates_strategy() -> impl Strategy<Value = CollapseSet> {
    (0.0f64..5e6, 0.0f64..5e5, 0.0f64..5e6).prop_map(|(d, u, p)| CollapseSet::new(d, u, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_keeps_trace_and_positivity(
        rates in rates_strategy(),
        area in 0.0f64..6.0,
        detune in -0.02f64..0.02,
        p_exc in 0.0f64..0.3,
    ) {
        let pulse = PulseSpec::new(0.0, 40.0, 4.0 + detune).with_area(area);
        let h = ladder(3, 4.0, -0.25, pulse);
        let mut rho = ground(3);
        rho[(0, 0)] = c(1.0 - p_exc);
        rho[(1, 1)] = c(p_exc);
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 2.0).collect();
        let opts = EvolveOptions { frame: Frame::RotatingWave, max_step: None };
        let r = lindblad_evolve_with(&h, &rates, &rho, &grid, &opts).unwrap();
        prop_assert!(r.trace_drift < 1e-8);
        prop_assert!(r.min_eigenvalue >= -1e-7);
        let f = &r.final_state;
        prop_assert!((f - f.adjoint()).norm() < 1e-10);
    }

    #[test]
    fn thermal_populations_follow_boltzmann(f in 0.1f64..8.0, t in 0.005f64..0.2) {
        let p = thermal_populations(&[0.0, f, 2.0 * f - 0.2], t).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let x = f * 1e9 * scqkit::units::PLANCK / (scqkit::units::BOLTZMANN * t);
        prop_assert!(((p[0] / p[1]).ln() - x).abs() < 1e-9 * x.max(1.0));
    }

    #[test]
    fn transition_rates_satisfy_detailed_balance(p_th in 0.0f64..0.49, t1 in 1e-6f64..1e-2) {
        let (up, down) = transition_rates(p_th, t1).unwrap();
        prop_assert!(((up + down) * t1 - 1.0).abs() < 1e-12);
        prop_assert!((up * (1.0 - p_th) - down * p_th).abs() < 1e-9 * down);
    }
}
