use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CollapseSet;
use crate::control::{rotating_frame, DriveHamiltonian};
use crate::error::{Error, Result};
use crate::linalg::eigh_complex;

/// Largest tolerated |Tr ρ − 1| before an evolution is rejected.
pub const MAX_TRACE_DRIFT: f64 = 1e-6;
/// Integration steps per period of the fastest frequency in the problem.
pub const STEPS_PER_PERIOD: f64 = 40.0;

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);

/// Frame in which the equation of motion is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    #[default]
    Lab,
    /// Rotating at the carrier, with counter-rotating terms kept.
    Rotating,
    /// Rotating at the carrier in the rotating-wave approximation.
    RotatingWave,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvolveOptions {
    pub frame: Frame,
    /// Upper bound on the step, ns; the default bound is 1/(40·f_max).
    pub max_step: Option<f64>,
}

/// Populations sampled on a time grid and the final state.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    /// ns.
    pub times: Vec<f64>,
    /// populations[k][i] = ⟨i|ρ(times[k])|i⟩.
    pub populations: Vec<Vec<f64>>,
    pub final_state: DMatrix<C>,
    /// Largest |Tr ρ − 1| seen at the samples.
    pub trace_drift: f64,
    /// Smallest eigenvalue of ρ seen at the samples.
    pub min_eigenvalue: f64,
    /// Integration steps taken.
    pub steps: usize,
}

impl EvolutionResult {
    /// CSV with columns time_ns, p0, p1, ...
    pub fn to_csv(&self) -> String {
        let d = self.populations.first().map_or(0, |p| p.len());
        let header: Vec<String> = (0..d).map(|i| format!("p{i}")).collect();
        let mut out = format!("time_ns,{}\n", header.join(","));
        for (t, pops) in self.times.iter().zip(&self.populations) {
            let row: Vec<String> = pops.iter().map(|p| format!("{p:.12}")).collect();
            out.push_str(&format!("{t:.6},{}\n", row.join(",")));
        }
        out
    }
}

/// Right-hand side of the master equation on row-major d×d buffers.
///
/// dρ/dt = Aρ + ρA† + Σ LρL†, A = −iH − ½ΣL†L. All collapse operators are
/// ladder or number operators, so ΣL†L is diagonal and the jumps are shifts.
/// Writes H(t) into a row-major d×d buffer.
type HamiltonianFn<'a> = Box<dyn Fn(f64, &mut [C]) + 'a>;

struct Generator<'a> {
    d: usize,
    hamiltonian: HamiltonianFn<'a>,
    /// ½ΣL†L diagonal, 1/ns.
    half_decay: Vec<f64>,
    /// Rates in 1/ns.
    down: f64,
    up: f64,
    dephase: f64,
    h: Vec<C>,
    a: Vec<C>,
}

impl<'a> Generator<'a> {
    fn new(d: usize, c: &CollapseSet, hamiltonian: HamiltonianFn<'a>) -> Self {
        let (down, up, dephase) = (c.gamma_down * 1e-9, c.gamma_up * 1e-9, 2.0 * c.gamma_phi * 1e-9);
        let half_decay = (0..d)
            .map(|k| {
                let kf = k as f64;
                let raise = if k + 1 < d { kf + 1.0 } else { 0.0 };
                0.5 * (down * kf + up * raise + dephase * kf * kf)
            })
            .collect();
        Self { d, hamiltonian, half_decay, down, up, dephase, h: vec![ZERO; d * d], a: vec![ZERO; d * d] }
    }

    fn eval(&mut self, t: f64, rho: &[C], out: &mut [C]) {
        let d = self.d;
        (self.hamiltonian)(t, &mut self.h);
        for i in 0..d {
            for j in 0..d {
                // A = −iH − ½K
                self.a[i * d + j] = C::new(self.h[i * d + j].im, -self.h[i * d + j].re);
            }
            self.a[i * d + i] -= self.half_decay[i];
        }
        for i in 0..d {
            for j in 0..d {
                let mut acc = ZERO;
                for k in 0..d {
                    acc += self.a[i * d + k] * rho[k * d + j] + rho[i * d + k] * self.a[j * d + k].conj();
                }
                let (fi, fj) = (i as f64, j as f64);
                // a ρ a†, a† ρ a and n ρ n.
                if i + 1 < d && j + 1 < d {
                    acc += rho[(i + 1) * d + j + 1] * (self.down * ((fi + 1.0) * (fj + 1.0)).sqrt());
                }
                if i > 0 && j > 0 {
                    acc += rho[(i - 1) * d + j - 1] * (self.up * (fi * fj).sqrt());
                }
                acc += rho[i * d + j] * (self.dephase * fi * fj);
                out[i * d + j] = acc;
            }
        }
    }
}

/// Classical RK4 on a flat buffer.
struct Rk4 {
    k1: Vec<C>,
    k2: Vec<C>,
    k3: Vec<C>,
    k4: Vec<C>,
    tmp: Vec<C>,
}

impl Rk4 {
    fn new(n: usize) -> Self {
        Self { k1: vec![ZERO; n], k2: vec![ZERO; n], k3: vec![ZERO; n], k4: vec![ZERO; n], tmp: vec![ZERO; n] }
    }

    #[allow(clippy::needless_range_loop)]
    fn step(&mut self, g: &mut Generator, t: f64, dt: f64, y: &mut [C]) {
        let n = y.len();
        g.eval(t, y, &mut self.k1);
        for i in 0..n {
            self.tmp[i] = y[i] + self.k1[i] * (0.5 * dt);
        }
        g.eval(t + 0.5 * dt, &self.tmp, &mut self.k2);
        for i in 0..n {
            self.tmp[i] = y[i] + self.k2[i] * (0.5 * dt);
        }
        g.eval(t + 0.5 * dt, &self.tmp, &mut self.k3);
        for i in 0..n {
            self.tmp[i] = y[i] + self.k3[i] * dt;
        }
        g.eval(t + dt, &self.tmp, &mut self.k4);
        for i in 0..n {
            y[i] += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * (dt / 6.0);
        }
    }
}

/// Lab-frame runs are integrated in the frame rotating at the carrier
/// without the rotating-wave approximation, which is an exact change of
/// picture. The ladder and number collapse operators only pick up phases
/// under exp(iω_d t n̂), so the dissipator is unchanged, and the fast
/// static phases no longer limit the step.
fn hamiltonian_fn<'a>(h: &'a DriveHamiltonian, frame: Frame) -> HamiltonianFn<'a> {
    let d = h.dim();
    let rwa = frame == Frame::RotatingWave;
    let detunings = rotating_frame(h, rwa).detunings;
    let wd = 2.0 * std::f64::consts::PI * h.pulse.drive_freq;
    Box::new(move |t, out: &mut [C]| {
        out.fill(ZERO);
        for k in 0..d {
            out[k * d + k] = C::new(detunings[k], 0.0);
        }
        if rwa {
            let half = h.complex_envelope(t) * 0.5;
            for k in 0..d - 1 {
                let v = half * h.drive[(k, k + 1)];
                out[k * d + k + 1] += v;
                out[(k + 1) * d + k] += v.conj();
            }
            return;
        }
        let c = h.drive_coefficient(t);
        if c == 0.0 {
            return;
        }
        // e^{iω_d t m} for m = 0..d−1.
        let base = C::from_polar(1.0, wd * t);
        let mut powers = [C::new(1.0, 0.0); 16];
        let mut pw = Vec::new();
        let powers: &mut [C] = if d <= 16 {
            &mut powers[..d]
        } else {
            pw.resize(d, C::new(1.0, 0.0));
            &mut pw
        };
        for m in 1..d {
            powers[m] = powers[m - 1] * base;
        }
        for j in 0..d {
            for k in 0..d {
                let ph = if j >= k { powers[j - k] } else { powers[k - j].conj() };
                out[j * d + k] += h.drive[(j, k)] * ph * c;
            }
        }
    })
}

/// ρ ↦ e^{s·iω_d t n̂} ρ e^{−s·iω_d t n̂}: s = +1 enters the carrier frame,
/// s = −1 leaves it. Identity for the rotating frames.
fn change_frame(y: &mut [C], d: usize, h: &DriveHamiltonian, frame: Frame, t: f64, s: f64) {
    if frame != Frame::Lab {
        return;
    }
    let w = 2.0 * std::f64::consts::PI * h.pulse.drive_freq * t * s;
    for i in 0..d {
        for j in 0..d {
            y[i * d + j] *= C::from_polar(1.0, w * (i as f64 - j as f64));
        }
    }
}

/// Step bound for a Hamiltonian in a given frame, ns.
fn default_step(h: &DriveHamiltonian, frame: Frame) -> f64 {
    let f_max = match frame {
        // Counter-rotating terms reach the top transition plus the carrier.
        Frame::Lab | Frame::Rotating => h.max_frequency() + h.pulse.drive_freq.abs(),
        Frame::RotatingWave => {
            let r = rotating_frame(h, true);
            let det = r.detunings.iter().fold(0.0f64, |m, x| m.max(x.abs())) / (2.0 * std::f64::consts::PI);
            det.max(h.pulse.amplitude * 1e-9 / (2.0 * std::f64::consts::PI))
        }
    };
    if f_max > 0.0 {
        1.0 / (STEPS_PER_PERIOD * f_max)
    } else {
        f64::INFINITY
    }
}

fn flatten(m: &DMatrix<C>) -> Vec<C> {
    let d = m.nrows();
    (0..d * d).map(|k| m[(k / d, k % d)]).collect()
}

fn unflatten(v: &[C], d: usize) -> DMatrix<C> {
    DMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("time grid must be strictly increasing with ≥ 2 points".into()));
    }
    Ok(())
}

/// Integrate the master equation from `t_grid[0]`, sampling at every grid time.
pub fn lindblad_evolve(
    h: &DriveHamiltonian,
    c: &CollapseSet,
    rho0: &DMatrix<C>,
    t_grid: &[f64],
) -> Result<EvolutionResult> {
    lindblad_evolve_with(h, c, rho0, t_grid, &EvolveOptions::default())
}

pub fn lindblad_evolve_with(
    h: &DriveHamiltonian,
    c: &CollapseSet,
    rho0: &DMatrix<C>,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<EvolutionResult> {
    let d = h.dim();
    if rho0.nrows() != d || rho0.ncols() != d {
        return Err(Error::InvalidParameter(format!("initial state is not {d}×{d}")));
    }
    c.validate()?;
    check_grid(t_grid)?;
    let dt_max = opts.max_step.unwrap_or(f64::INFINITY).min(default_step(h, opts.frame));
    let mut gen = Generator::new(d, c, hamiltonian_fn(h, opts.frame));
    let mut rk = Rk4::new(d * d);
    let mut y = flatten(rho0);
    change_frame(&mut y, d, h, opts.frame, t_grid[0], 1.0);

    let mut populations = Vec::with_capacity(t_grid.len());
    let mut trace_drift: f64 = 0.0;
    let mut min_eigenvalue = f64::INFINITY;
    let mut steps = 0;
    let mut record = |y: &[C], t: f64, populations: &mut Vec<Vec<f64>>| -> Result<()> {
        let mut out = y.to_vec();
        change_frame(&mut out, d, h, opts.frame, t, -1.0);
        let rho = unflatten(&out, d);
        let drift = (rho.trace() - C::new(1.0, 0.0)).norm();
        trace_drift = trace_drift.max(drift);
        if drift > MAX_TRACE_DRIFT || !drift.is_finite() {
            return Err(Error::TraceDrift { drift });
        }
        let herm = (&rho + rho.adjoint()) * C::new(0.5, 0.0);
        min_eigenvalue = min_eigenvalue.min(eigh_complex(&herm).0[0]);
        populations.push((0..d).map(|i| rho[(i, i)].re).collect());
        Ok(())
    };
    record(&y, t_grid[0], &mut populations)?;
    for w in t_grid.windows(2) {
        let span = w[1] - w[0];
        let n = (span / dt_max).ceil().max(1.0) as usize;
        let dt = span / n as f64;
        for k in 0..n {
            rk.step(&mut gen, w[0] + k as f64 * dt, dt, &mut y);
        }
        steps += n;
        record(&y, w[1], &mut populations)?;
    }
    change_frame(&mut y, d, h, opts.frame, *t_grid.last().unwrap(), -1.0);
    Ok(EvolutionResult {
        times: t_grid.to_vec(),
        populations,
        final_state: unflatten(&y, d),
        trace_drift,
        min_eigenvalue,
        steps,
    })
}

/// Linear map ρ(t0) ↦ ρ(t1) as a d²×d² matrix acting on row-major vec(ρ).
pub fn propagator_superoperator(
    h: &DriveHamiltonian,
    c: &CollapseSet,
    t0: f64,
    t1: f64,
    opts: &EvolveOptions,
) -> Result<DMatrix<C>> {
    let d = h.dim();
    c.validate()?;
    check_grid(&[t0, t1])?;
    let dt_max = opts.max_step.unwrap_or(f64::INFINITY).min(default_step(h, opts.frame));
    let n = ((t1 - t0) / dt_max).ceil().max(1.0) as usize;
    let dt = (t1 - t0) / n as f64;
    let mut gen = Generator::new(d, c, hamiltonian_fn(h, opts.frame));
    let mut rk = Rk4::new(d * d);
    let mut s = DMatrix::zeros(d * d, d * d);
    for col in 0..d * d {
        // The generator is linear, so non-Hermitian basis matrices propagate too.
        let mut y = vec![ZERO; d * d];
        y[col] = C::new(1.0, 0.0);
        change_frame(&mut y, d, h, opts.frame, t0, 1.0);
        for k in 0..n {
            rk.step(&mut gen, t0 + k as f64 * dt, dt, &mut y);
        }
        change_frame(&mut y, d, h, opts.frame, t1, -1.0);
        for (row, v) in y.iter().enumerate() {
            s[(row, col)] = *v;
        }
    }
    Ok(s)
}

/// Apply a superoperator from [`propagator_superoperator`] to ρ.
pub fn apply_superoperator(s: &DMatrix<C>, rho: &DMatrix<C>) -> DMatrix<C> {
    let d = rho.nrows();
    let v = nalgebra::DVector::from_vec(flatten(rho));
    let out = s * v;
    unflatten(out.as_slice(), d)
}

/// Unitary propagator of i dU/dt = H(t) U by RK4 with `steps` equal steps.
pub fn unitary_propagator(h: impl Fn(f64) -> DMatrix<C>, t0: f64, t1: f64, steps: usize) -> DMatrix<C> {
    let d = h(t0).nrows();
    let dt = (t1 - t0) / steps as f64;
    let mi = C::new(0.0, -1.0);
    let f = |t: f64, u: &DMatrix<C>| (h(t) * u) * mi;
    let mut u = DMatrix::<C>::identity(d, d);
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        let half = C::new(0.5 * dt, 0.0);
        let k1 = f(t, &u);
        let k2 = f(t + 0.5 * dt, &(&u + &k1 * half));
        let k3 = f(t + 0.5 * dt, &(&u + &k2 * half));
        let k4 = f(t + dt, &(&u + &k3 * C::new(dt, 0.0)));
        u += (k1 + (k2 + k3) * C::new(2.0, 0.0) + k4) * C::new(dt / 6.0, 0.0);
    }
    u
}
