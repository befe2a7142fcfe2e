use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::sweep::{virtual_rotations, CalibrationResult};
use super::DeviceModel;
use crate::control::{frame_unitary, universal_gate};
use crate::dynamics::{apply_superoperator, propagator_superoperator, EvolveOptions, Frame};
use crate::error::{Error, Result};

/// Shortest sequence accepted by [`benchmark_gate`].
pub const MIN_GATES: usize = 50;

/// y(n) = A·e^{rate·n} + y0 with its least-squares residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFit {
    pub amplitude: f64,
    pub rate: f64,
    pub offset: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
    pub iterations: usize,
}

impl ExponentialFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.amplitude * (self.rate * n).exp() + self.offset
    }
}

/// Populations after 0..=n gates with the fitted ground-state decay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTrace {
    /// populations[n][k] = p_k after n gates.
    pub populations: Vec<Vec<f64>>,
    /// Gate counts used in the fit are multiples of this.
    pub stride: usize,
    pub fit: ExponentialFit,
    /// |rate| of the fit.
    pub error_per_gate: f64,
}

impl BenchmarkTrace {
    pub fn n_gates(&self) -> usize {
        self.populations.len() - 1
    }

    /// CSV with columns n, p0, p1, ...
    pub fn to_csv(&self) -> String {
        let d = self.populations.first().map_or(0, |p| p.len());
        let cols: Vec<String> = (0..d).map(|k| format!("p{k}")).collect();
        let mut out = format!("n,{}\n", cols.join(","));
        for (n, p) in self.populations.iter().enumerate() {
            let row: Vec<String> = p.iter().map(|x| format!("{x:.12}")).collect();
            out.push_str(&format!("{n},{}\n", row.join(",")));
        }
        out
    }
}

fn sse(x: &[f64], y: &[f64], p: &Vector3<f64>) -> f64 {
    x.iter().zip(y).map(|(x, y)| (p[0] * (p[1] * x).exp() + p[2] - y).powi(2)).sum()
}

/// Least-squares fit of A·e^{rate·x} + y0.
///
/// Starts from a three-point estimate of y0 and a log-linear fit of
/// ln|y − y0|, then runs damped Gauss–Newton (Levenberg–Marquardt).
pub fn fit_exponential(x: &[f64], y: &[f64]) -> Result<ExponentialFit> {
    let n = x.len();
    if n < 4 || y.len() != n {
        return Err(Error::InvalidParameter("exponential fit needs ≥ 4 paired samples".into()));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("fit data"));
    }
    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let mean = y.iter().sum::<f64>() / n as f64;
    if hi - lo <= 1e-12 * mean.abs().max(1.0) {
        return Ok(ExponentialFit { amplitude: 0.0, rate: 0.0, offset: mean, rms_residual: 0.0, iterations: 0 });
    }

    // y0 from (first, middle, last): exact for noiseless equally spaced data.
    let (y1, y2, y3) = (y[0], y[(n - 1) / 2], y[2 * ((n - 1) / 2)]);
    let den = y1 + y3 - 2.0 * y2;
    let span = hi - lo;
    let falling = y3 < y1;
    let mut y0 = if den.abs() > 1e-12 * span { (y1 * y3 - y2 * y2) / den } else { f64::NAN };
    let valid = |y0: f64| y.iter().all(|v| if falling { v - y0 > 0.0 } else { y0 - v > 0.0 });
    if !y0.is_finite() || !valid(y0) {
        y0 = if falling { lo - 0.1 * span } else { hi + 0.1 * span };
    }
    let sign = if falling { 1.0 } else { -1.0 };
    // Log-linear regression of ln(sign·(y − y0)) on x.
    let ly: Vec<f64> = y.iter().map(|v| (sign * (v - y0)).ln()).collect();
    let mx = x.iter().sum::<f64>() / n as f64;
    let ml = ly.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxl: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - ml)).sum();
    let rate = if sxx > 0.0 { sxl / sxx } else { 0.0 };
    let mut p = Vector3::new(sign * (ml - rate * mx).exp(), rate, y0);

    let mut cost = sse(x, y, &p);
    let mut lambda = 1e-3;
    let mut residuals = vec![cost];
    let mut iterations = 0;
    for it in 0..500 {
        iterations = it + 1;
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (xi, yi) in x.iter().zip(y) {
            let e = (p[1] * xi).exp();
            let j = Vector3::new(e, p[0] * xi * e, 1.0);
            let r = p[0] * e + p[2] - yi;
            jtj += j * j.transpose();
            jtr += j * r;
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj;
            for k in 0..3 {
                a[(k, k)] *= 1.0 + lambda;
            }
            let Some(step) = a.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + step;
            let c = sse(x, y, &trial);
            if c.is_finite() && c <= cost {
                let done = cost - c <= 1e-15 * cost.max(1e-300) || step.norm() <= 1e-14 * (1.0 + p.norm());
                p = trial;
                cost = c;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if done {
                    lambda = f64::INFINITY;
                }
                break;
            }
            lambda *= 10.0;
        }
        residuals.push(cost);
        if !improved || lambda.is_infinite() {
            break;
        }
    }
    if p.iter().any(|v| !v.is_finite()) || !cost.is_finite() {
        return Err(Error::FitDiverged { residuals });
    }
    Ok(ExponentialFit { amplitude: p[0], rate: p[1], offset: p[2], rms_residual: (cost / n as f64).sqrt(), iterations })
}

/// Row-major vec(XρX†) = (X ⊗ X̄)·vec(ρ).
fn conjugation(x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    x.kronecker(&x.map(|v| v.conj()))
}

/// Whether U² is proportional to the identity.
fn is_involution(result: &CalibrationResult) -> bool {
    let u = universal_gate(&result.gate);
    let u2 = u * u;
    (u2[(0, 1)].norm() + u2[(1, 0)].norm() + (u2[(0, 0)] - u2[(1, 1)]).norm()) < 1e-9
}

/// Apply the calibrated gate `n_gates` times back to back, recording all
/// populations, and fit the ground-state decay.
///
/// Each pulse has its carrier referenced to its own start, so one gate is a
/// fixed linear map built once. For involutive gates (π rotations, Hadamard)
/// the state returns near |0⟩ every second gate, so only even counts are fit.
pub fn benchmark_gate(result: &CalibrationResult, device: &DeviceModel, n_gates: usize) -> Result<BenchmarkTrace> {
    if n_gates < MIN_GATES {
        return Err(Error::InvalidParameter(format!("need at least {MIN_GATES} gates, got {n_gates}")));
    }
    let d = device.dim();
    let tau = result.tau_star;
    let h = device.hamiltonian.with_pulse(result.pulse(device));
    let opts = EvolveOptions { frame: result.frame, max_step: None };
    let s = propagator_superoperator(&h, &device.collapse, 0.0, tau, &opts)?;
    let (pre, post) = virtual_rotations(&result.gate, result.delta_zeta_star, d);
    let post = if result.frame == Frame::Lab { post * frame_unitary(device.drive_freq(), tau, d) } else { post };
    let gate_map = conjugation(&post) * s * conjugation(&pre);

    let mut rho = device.rho0.clone();
    let mut populations = Vec::with_capacity(n_gates + 1);
    for n in 0..=n_gates {
        if n > 0 {
            rho = apply_superoperator(&gate_map, &rho);
        }
        let p: Vec<f64> = (0..d).map(|k| rho[(k, k)].re).collect();
        let total: f64 = p.iter().sum();
        let min = p.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        if (total - 1.0).abs() > 1e-8 || min < -1e-7 {
            return Err(Error::NonPhysicalState(format!("populations after {n} gates: {p:?}")));
        }
        populations.push(p);
    }

    let stride = if is_involution(result) { 2 } else { 1 };
    let (xs, ys): (Vec<f64>, Vec<f64>) = (0..=n_gates).step_by(stride).map(|n| (n as f64, populations[n][0])).unzip();
    let fit = fit_exponential(&xs, &ys)?;
    Ok(BenchmarkTrace { populations, stride, error_per_gate: fit.rate.abs(), fit })
}
