use proptest::prelude::*;
use scqkit::calibrate::*;
use scqkit::control::GateSpec;
use scqkit::dynamics::Frame;
use scqkit::spectra::{QubitParams, TransmonParams};

fn transmon_device(d: usize) -> DeviceModel {
    let p = QubitParams::Transmon(TransmonParams::new(7.68, 0.31, 0.0));
    DeviceModel::new(&p, d, 0.02, 52.78, 97.48).unwrap()
}

fn small_config() -> CalibrationConfig {
    CalibrationConfig {
        tau: Grid::new(14.0, 28.0, 2.0),
        delta_zeta: Grid::new(-0.035, 0.035, 0.01),
        frame: Frame::RotatingWave,
        ..CalibrationConfig::default()
    }
}

#[test]
fn alternating_sweep_finds_the_exhaustive_optimum() {
    let dev = transmon_device(3);
    let cfg = small_config();
    let gate = GateSpec::x();
    let r = calibrate_pulse(&gate, &dev, &cfg).unwrap();
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for tau in cfg.tau.values() {
        for dz in cfg.delta_zeta.values() {
            let f = pulse_fidelity(&dev, &gate, tau, dz, 0.0, cfg.frame).unwrap();
            if f > best.0 {
                best = (f, tau, dz);
            }
        }
    }
    assert_eq!((r.tau_star, r.delta_zeta_star), (best.1, best.2));
    assert_eq!(r.fidelity, best.0);
    assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn zero_iterations_return_the_initial_tau_sweep() {
    let dev = transmon_device(3);
    let cfg = CalibrationConfig { max_iterations: 0, ..small_config() };
    let gate = GateSpec::x();
    let r = calibrate_pulse(&gate, &dev, &cfg).unwrap();
    assert!(r.history.is_empty());
    // Δζ stays at the grid value nearest zero.
    let dz0 = cfg.delta_zeta.values().into_iter().min_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap();
    assert_eq!(r.delta_zeta_star, dz0);
    let best = cfg
        .tau
        .values()
        .into_iter()
        .map(|t| pulse_fidelity(&dev, &gate, t, dz0, 0.0, cfg.frame).unwrap())
        .fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(r.fidelity, best);
}

#[test]
fn drag_never_lowers_fidelity() {
    let dev = transmon_device(3);
    let r = calibrate_pulse(&GateSpec::x(), &dev, &small_config()).unwrap();
    let betas: Vec<f64> = (0..=10).map(|k| -0.5 + 0.1 * k as f64).collect();
    let tuned = optimize_drag(&r, &dev, &betas).unwrap();
    assert!(tuned.fidelity >= r.fidelity);
    assert!(tuned.beta_star < 0.0);
}

#[test]
fn idle_gate_without_noise_gives_a_flat_trace() {
    let dev = transmon_device(3).noiseless();
    let cfg = CalibrationConfig {
        tau: Grid::point(20.0),
        delta_zeta: Grid::point(0.0),
        frame: Frame::RotatingWave,
        ..CalibrationConfig::default()
    };
    let r = calibrate_pulse(&GateSpec::new(0.0, 0.0, 0.0), &dev, &cfg).unwrap();
    assert!((r.fidelity - 1.0).abs() < 1e-9, "{}", r.fidelity);
    let trace = benchmark_gate(&r, &dev, 200).unwrap();
    assert_eq!(trace.n_gates(), 200);
    assert!(trace.error_per_gate < 1e-9, "{}", trace.error_per_gate);
}

#[test]
fn benchmark_trace_decays_under_noise() {
    // Coherent over-rotation would dominate a coarse calibration, so refine Δζ and β first.
    let dev = transmon_device(3);
    let cfg = CalibrationConfig { refine_delta_zeta: true, ..small_config() };
    let r = calibrate_pulse(&GateSpec::x(), &dev, &cfg).unwrap();
    let betas: Vec<f64> = (0..=10).map(|k| -0.5 + 0.1 * k as f64).collect();
    let r = optimize_drag(&r, &dev, &betas).unwrap();
    let trace = benchmark_gate(&r, &dev, 400).unwrap();
    assert_eq!(trace.stride, 2);
    let p0: Vec<f64> = trace.populations.iter().step_by(2).map(|p| p[0]).collect();
    assert!(p0.last().unwrap() < &p0[0]);
    assert!(trace.error_per_gate > 1e-5 && trace.error_per_gate < 1e-2, "{:?}", trace.fit);
    assert!(trace.to_csv().starts_with("n,p0,p1,p2\n0,"));
    assert!(benchmark_gate(&r, &dev, 10).is_err());
}

#[test]
fn impossible_calibration_is_reported() {
    // A carrier far from resonance cannot drive the transition.
    let mut dev = transmon_device(3);
    dev.hamiltonian.pulse.drive_freq += 1.0;
    assert!(calibrate_pulse(&GateSpec::x(), &dev, &small_config()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn synthetic_decay_rates_are_recovered(
        a in 0.05f64..0.6, rate in 1e-5f64..5e-3, y0 in 0.2f64..0.9, stride in 1usize..3,
    ) {
        let x: Vec<f64> = (0..=2000).step_by(stride).map(|n| n as f64).collect();
        let y: Vec<f64> = x.iter().map(|n| a * (-rate * n).exp() + y0).collect();
        let f = fit_exponential(&x, &y).unwrap();
        prop_assert!((f.rate.abs() / rate - 1.0).abs() < 0.01, "{:?}", f);
    }

    #[test]
    fn budget_roundings_are_consistent(t1 in 1.0f64..3000.0, t2 in 1.0f64..3000.0, tau in 5.0f64..100.0) {
        let near = coherence_budget(t1, t2, tau, Rounding::Nearest).unwrap();
        let floor = coherence_budget(t1, t2, tau, Rounding::Floor).unwrap();
        prop_assert!(near == floor || near == floor + 1);
        prop_assert!(floor as f64 * tau <= t1.min(t2) * 1e3 * (1.0 + 1e-9));
        prop_assert_eq!(floor, coherence_budget(t2, t1, tau, Rounding::Floor).unwrap());
    }
}
