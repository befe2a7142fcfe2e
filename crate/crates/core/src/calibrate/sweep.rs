use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{coherence_budget, DeviceModel, Rounding};
use crate::control::{embed, frame_unitary, rz, state_fidelity, universal_gate, GateSpec, PulseSpec};
use crate::dynamics::{lindblad_evolve_with, EvolveOptions, Frame};
use crate::error::{Error, Result};

/// Inclusive arithmetic grid min, min + step, ..., max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(min: f64, max: f64, step: f64) -> Self {
        Self { min, max, step }
    }

    /// A grid holding the single value `x`.
    pub fn point(x: f64) -> Self {
        Self { min: x, max: x, step: 1.0 }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.step > 0.0 && self.max >= self.min && self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidParameter(format!("{name} grid {self:?}")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = ((self.max - self.min) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.min + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    /// ns.
    pub tau: Grid,
    /// rad.
    pub delta_zeta: Grid,
    pub max_iterations: usize,
    /// Stop once an outer iteration improves F by less than this.
    pub tolerance: f64,
    /// DRAG coefficient held during the τ/Δζ sweeps, ns.
    pub beta: f64,
    pub frame: Frame,
    /// Golden-section polish of Δζ between grid neighbours after the sweeps.
    pub refine_delta_zeta: bool,
    pub rounding: Rounding,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            tau: Grid::new(10.0, 48.0, 2.0),
            delta_zeta: Grid::new(-0.095, 0.095, 0.01),
            max_iterations: 10,
            tolerance: 1e-7,
            beta: 0.0,
            frame: Frame::Lab,
            refine_delta_zeta: false,
            rounding: Rounding::Nearest,
        }
    }
}

impl CalibrationConfig {
    pub fn validate(&self) -> Result<()> {
        self.tau.validate("tau")?;
        self.delta_zeta.validate("delta_zeta")?;
        if self.tau.min <= 0.0 {
            return Err(Error::InvalidParameter("pulse durations must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub gate: GateSpec,
    /// ns.
    pub tau_star: f64,
    /// rad.
    pub delta_zeta_star: f64,
    /// ns.
    pub beta_star: f64,
    /// Peak Rabi rate of the calibrated pulse, rad/s.
    pub amplitude: f64,
    pub fidelity: f64,
    /// Per-gate decay from benchmarking, once measured.
    pub error_per_gate: Option<f64>,
    /// Gates within min(T1, T2).
    pub coherence_budget: u64,
    /// Fidelity after each outer iteration.
    pub history: Vec<f64>,
    pub frame: Frame,
}

impl CalibrationResult {
    /// The calibrated pulse on `device`'s carrier.
    pub fn pulse(&self, device: &DeviceModel) -> PulseSpec {
        build_pulse(&self.gate, device, self.tau_star, self.delta_zeta_star, self.beta_star)
    }
}

/// Pulse of duration τ whose area implements θ + Δζ.
fn build_pulse(gate: &GateSpec, device: &DeviceModel, tau: f64, dz: f64, beta: f64) -> PulseSpec {
    let p = PulseSpec { delta_zeta: dz, beta, ..PulseSpec::new(0.0, tau, device.drive_freq()) };
    p.with_area(gate.theta + dz)
}

/// Virtual R_z before and after the physical R_y pulse.
pub(super) fn virtual_rotations(gate: &GateSpec, dz: f64, d: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    (embed(&rz(gate.lam + dz), d), embed(&rz(gate.phi), d))
}

/// State fidelity of the simulated gate against the ideal gate on ρ0.
///
/// The pulse implements R_z(φ)·R_y(θ + Δζ)·R_z(λ + Δζ), with the R_z parts as
/// frame updates; the target is the unshifted gate. Lab-frame results are
/// brought into the carrier frame at t = τ before comparing.
pub fn pulse_fidelity(
    device: &DeviceModel,
    gate: &GateSpec,
    tau: f64,
    delta_zeta: f64,
    beta: f64,
    frame: Frame,
) -> Result<f64> {
    let d = device.dim();
    let pulse = build_pulse(gate, device, tau, delta_zeta, beta);
    let h = device.hamiltonian.with_pulse(pulse);
    let (pre, post) = virtual_rotations(gate, delta_zeta, d);
    let rho0 = &pre * &device.rho0 * pre.adjoint();
    let opts = EvolveOptions { frame, max_step: None };
    let r = lindblad_evolve_with(&h, &device.collapse, &rho0, &[0.0, tau], &opts)?;
    let mut rho = r.final_state;
    if frame == Frame::Lab {
        let v = frame_unitary(device.drive_freq(), tau, d);
        rho = &v * rho * v.adjoint();
    }
    let rho = &post * rho * post.adjoint();
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    let u = embed(&universal_gate(gate), d);
    let target = &u * &device.rho0 * u.adjoint();
    state_fidelity(&rho, &target)
}

/// Maximum of a unimodal `f` on [a, b] by golden-section search.
pub fn golden_section_max(f: impl Fn(f64) -> Result<f64>, a: f64, b: f64, iterations: usize) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..iterations {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Index of the first maximum.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

struct Sweeper<'a> {
    device: &'a DeviceModel,
    gate: &'a GateSpec,
    cfg: &'a CalibrationConfig,
    taus: Vec<f64>,
    dzs: Vec<f64>,
    cache: HashMap<(usize, usize), f64>,
}

impl Sweeper<'_> {
    /// Fidelities at the given grid index pairs, evaluated concurrently.
    fn eval(&mut self, points: &[(usize, usize)]) -> Result<Vec<f64>> {
        let missing: Vec<(usize, usize)> = points.iter().copied().filter(|p| !self.cache.contains_key(p)).collect();
        let fresh: Vec<Result<f64>> = missing
            .par_iter()
            .map(|&(i, j)| {
                pulse_fidelity(self.device, self.gate, self.taus[i], self.dzs[j], self.cfg.beta, self.cfg.frame)
            })
            .collect();
        for (p, f) in missing.into_iter().zip(fresh) {
            self.cache.insert(p, f?);
        }
        Ok(points.iter().map(|p| self.cache[p]).collect())
    }
}

/// Alternate τ sweeps at fixed Δζ and Δζ sweeps at fixed τ until the
/// fidelity gain of an outer iteration drops below the tolerance.
pub fn calibrate_pulse(gate: &GateSpec, device: &DeviceModel, cfg: &CalibrationConfig) -> Result<CalibrationResult> {
    cfg.validate()?;
    let mut s =
        Sweeper { device, gate, cfg, taus: cfg.tau.values(), dzs: cfg.delta_zeta.values(), cache: HashMap::new() };
    // Start from the Δζ grid value closest to zero.
    let mut j = argmax(&s.dzs.iter().map(|x| -x.abs()).collect::<Vec<_>>());
    // A zero iteration cap keeps the optimum of the initial τ sweep.
    let pts: Vec<_> = (0..s.taus.len()).map(|k| (k, j)).collect();
    let fs = s.eval(&pts)?;
    let mut i = argmax(&fs);
    let mut best = fs[i];
    let mut history = Vec::new();
    if cfg.max_iterations > 0 {
        best = f64::NEG_INFINITY;
    }
    for _ in 0..cfg.max_iterations {
        let pts: Vec<_> = (0..s.taus.len()).map(|k| (k, j)).collect();
        i = argmax(&s.eval(&pts)?);
        let pts: Vec<_> = (0..s.dzs.len()).map(|k| (i, k)).collect();
        let fs = s.eval(&pts)?;
        j = argmax(&fs);
        let gain = fs[j] - best;
        best = fs[j];
        history.push(best);
        if gain < cfg.tolerance {
            break;
        }
    }
    if !(best > 0.5) {
        return Err(Error::Calibration(format!("best fidelity {best:.4} ≤ 0.5; check drive and carrier")));
    }
    let (tau, mut dz) = (s.taus[i], s.dzs[j]);
    if cfg.refine_delta_zeta && s.dzs.len() > 1 {
        let f = |x: f64| pulse_fidelity(device, gate, tau, x, cfg.beta, cfg.frame);
        let (x, fx) = golden_section_max(f, dz - cfg.delta_zeta.step, dz + cfg.delta_zeta.step, 20)?;
        if fx > best {
            dz = x;
            best = fx;
        }
    }
    let pulse = build_pulse(gate, device, tau, dz, cfg.beta);
    Ok(CalibrationResult {
        gate: *gate,
        tau_star: tau,
        delta_zeta_star: dz,
        beta_star: cfg.beta,
        amplitude: pulse.amplitude,
        fidelity: best,
        error_per_gate: None,
        coherence_budget: coherence_budget(device.t1_eff, device.t2_eff, tau, cfg.rounding)?,
        history,
        frame: cfg.frame,
    })
}

/// Best DRAG coefficient on `beta_grid` (ns), polished by one golden-section
/// search between the neighbours of the best grid point. β = 0 is always a
/// candidate, so the result never does worse than the plain Gaussian.
pub fn optimize_drag(result: &CalibrationResult, device: &DeviceModel, beta_grid: &[f64]) -> Result<CalibrationResult> {
    if beta_grid.is_empty() {
        return Err(Error::InvalidParameter("empty β grid".into()));
    }
    let f = |b: f64| pulse_fidelity(device, &result.gate, result.tau_star, result.delta_zeta_star, b, result.frame);
    let mut betas = beta_grid.to_vec();
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    let fs = betas.par_iter().map(|b| f(*b)).collect::<Result<Vec<f64>>>()?;
    let k = argmax(&fs);
    let (mut beta, mut best) = (betas[k], fs[k]);
    if betas.len() > 1 {
        let lo = if k > 0 { betas[k - 1] } else { betas[k] };
        let hi = if k + 1 < betas.len() { betas[k + 1] } else { betas[k] };
        let (x, fx) = golden_section_max(f, lo, hi, 25)?;
        if fx > best {
            beta = x;
            best = fx;
        }
    }
    let f0 = if result.beta_star == 0.0 { result.fidelity } else { f(0.0)? };
    if f0 >= best {
        beta = 0.0;
        best = f0;
    }
    if beta == result.beta_star {
        return Ok(result.clone());
    }
    Ok(CalibrationResult { beta_star: beta, fidelity: best, ..result.clone() })
}
