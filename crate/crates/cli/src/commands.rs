use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use scqkit::calibrate::{
    benchmark_gate, calibrate_pulse, optimize_drag, pulse_fidelity, BenchmarkTrace, CalibrationResult, DeviceModel,
    ExponentialFit,
};
use scqkit::em::{differential_capacitance, effective_charging_energy, maxwell_capacitance, reduce_capacitance};
use scqkit::em::{ConductorLayout, MaxwellCapacitanceMatrix};
use scqkit::noise::{effective_coherence, CoherenceReport};
use scqkit::spectra::{wavefunction, Parameter, QubitParams};

use crate::config::{parameter, RunConfig, SweepAxis};
use crate::Failure;

/// Bumped whenever a report changes shape.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    config: &'a RunConfig,
    result: T,
}

/// Files produced by one command, written only after every result is ready.
pub struct Outputs {
    files: Vec<(String, String)>,
}

impl Outputs {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn json<T: Serialize>(&mut self, name: &str, command: &str, cfg: &RunConfig, result: T) -> Result<(), Failure> {
        let env = Envelope { schema_version: SCHEMA_VERSION, command, config: cfg, result };
        let text = serde_json::to_string_pretty(&env).map_err(|e| Failure::Numerical(e.to_string()))?;
        self.files.push((name.to_string(), text + "\n"));
        Ok(())
    }

    fn csv(&mut self, name: &str, text: String) {
        self.files.push((name.to_string(), text));
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, Failure> {
        let io = |p: &Path, e: std::io::Error| Failure::Config(format!("cannot write {}: {e}", p.display()));
        std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut written = Vec::new();
        for (name, text) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

#[derive(Serialize)]
struct SpectrumReport {
    kind: &'static str,
    omega01_ghz: f64,
    alpha_ghz: f64,
    /// ω01(n_g = 0) − ω01(n_g = 0.5); transmon only.
    delta_omega_mhz: Option<f64>,
    levels_ghz: Vec<f64>,
}

fn kind(p: &QubitParams) -> &'static str {
    match p {
        QubitParams::Transmon(_) => "transmon",
        QubitParams::Fluxonium(_) => "fluxonium",
    }
}

/// ω01(n_g = 0) − ω01(n_g = 0.5) in MHz for a transmon.
fn delta_omega(p: &QubitParams) -> Result<Option<f64>, Failure> {
    if !matches!(p, QubitParams::Transmon(_)) {
        return Ok(None);
    }
    let at = |n_g| -> Result<f64, Failure> { Ok(p.with(Parameter::Ng, n_g)?.eigensystem()?.omega01()) };
    Ok(Some((at(0.0)? - at(0.5)?) * 1e3))
}

fn linspace(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    (0..points).map(|k| min + (max - min) * k as f64 / (points - 1) as f64).collect()
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outputs, Failure> {
    let params = cfg.params()?;
    let s = params.spectrum()?;
    let report = SpectrumReport {
        kind: kind(&params),
        omega01_ghz: s.omega01(),
        alpha_ghz: s.alpha(),
        delta_omega_mhz: delta_omega(&params)?,
        levels_ghz: s.levels.iter().take(cfg.spectrum.levels).copied().collect(),
    };
    let sc = &cfg.spectrum;
    let grid = linspace(sc.phi_min_rad, sc.phi_max_rad, sc.phi_points);
    let n = sc.wavefunctions.min(s.dim());
    let waves = (0..n).map(|k| wavefunction(&s, k, &grid)).collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("phi_rad");
    for k in 0..n {
        let _ = write!(csv, ",psi{k}");
    }
    csv.push('\n');
    for (i, phi) in grid.iter().enumerate() {
        let _ = write!(csv, "{phi}");
        for w in &waves {
            let _ = write!(csv, ",{}", w[i]);
        }
        csv.push('\n');
    }
    let mut out = Outputs::new();
    out.json("spectrum.json", "spectrum", cfg, report)?;
    out.csv("wavefunctions.csv", csv);
    Ok(out)
}

#[derive(Serialize)]
struct SweepReport {
    columns: Vec<String>,
    rows: usize,
}

pub fn sweep(cfg: &RunConfig, axes_override: &[SweepAxis]) -> Result<Outputs, Failure> {
    let params = cfg.params()?;
    let axes: Vec<SweepAxis> = if axes_override.is_empty() {
        cfg.sweep
            .as_ref()
            .map(|s| s.axis.clone())
            .ok_or_else(|| Failure::Config("sweep needs [[sweep.axis]] entries or --axis NAME=MIN:MAX:POINTS".into()))?
    } else {
        axes_override.to_vec()
    };
    if axes.len() > 2 {
        return Err(Failure::Config("at most two sweep axes".into()));
    }
    let resolved: Vec<(Parameter, Vec<f64>)> = axes
        .iter()
        .map(|a| {
            if a.points == 0 || !(a.max >= a.min) {
                return Err(Failure::Config(format!("sweep axis {} has an empty range", a.parameter)));
            }
            Ok((parameter(&a.parameter)?, linspace(a.min, a.max, a.points)))
        })
        .collect::<Result<_, _>>()?;
    for (p, _) in &resolved {
        params.get(*p).map_err(|e| Failure::Config(e.to_string()))?;
    }
    let points: Vec<Vec<f64>> = match resolved.as_slice() {
        [(_, a)] => a.iter().map(|x| vec![*x]).collect(),
        [(_, a), (_, b)] => a.iter().flat_map(|x| b.iter().map(move |y| vec![*x, *y])).collect(),
        _ => unreachable!("one or two axes"),
    };
    let coherence = cfg.sweep.as_ref().is_none_or(|s| s.coherence);
    let channels = cfg.channels(&params)?;
    let ctx = cfg.context();
    let transmon = matches!(params, QubitParams::Transmon(_));

    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|values| -> Result<Vec<f64>, Failure> {
            let mut p = params;
            for ((param, _), v) in resolved.iter().zip(values) {
                p = p.with(*param, *v)?;
            }
            let s = p.eigensystem()?;
            let mut row = values.clone();
            row.extend([s.omega01(), s.alpha()]);
            if transmon {
                row.push(delta_omega(&p)?.unwrap_or(f64::NAN));
            }
            if coherence {
                let r = effective_coherence(&channels, &p, &s, &ctx)?;
                row.extend([r.t1_eff, r.t2_eff, r.t_phi_eff]);
            }
            Ok(row)
        })
        .collect::<Result<_, _>>()?;

    let mut columns: Vec<String> = axes.iter().map(|a| a.parameter.clone()).collect();
    columns.extend(["omega01_ghz".into(), "alpha_ghz".into()]);
    if transmon {
        columns.push("delta_omega_mhz".into());
    }
    if coherence {
        columns.extend(["t1_us".into(), "t2_us".into(), "t_phi_us".into()]);
    }
    let mut csv = columns.join(",") + "\n";
    for row in &rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    let mut out = Outputs::new();
    out.json("sweep.json", "sweep", cfg, SweepReport { columns, rows: rows.len() })?;
    out.csv("sweep.csv", csv);
    Ok(out)
}

#[derive(Serialize)]
struct CapacitanceReport {
    labels: Vec<String>,
    /// Relative asymmetry of the raw extraction (0 for a given matrix).
    asymmetry: f64,
    islands: Option<[String; 2]>,
    /// Two-island matrix after eliminating every other conductor, fF.
    reduced_ff: Option<[[f64; 2]; 2]>,
    differential_capacitance_ff: Option<f64>,
    e_c_mhz: Option<f64>,
    convention: &'static str,
}

const REDUCTION_CONVENTION: &str = "other conductors eliminated by Schur complement as floating nodes; \
     C = C_ab + C_ag·C_bg/(C_ag + C_bg); E_C = e²/2C";

pub fn capmatrix(cfg: &RunConfig) -> Result<Outputs, Failure> {
    let em = cfg.em.as_ref().ok_or_else(|| Failure::Config("capmatrix needs an [em] section".into()))?;
    let read = |p: &PathBuf| {
        std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("cannot read {}: {e}", p.display())))
    };
    let m = match (&em.layout, &em.matrix) {
        (Some(p), _) => {
            let layout: ConductorLayout =
                read(p)?.parse().map_err(|e: scqkit::Error| Failure::Config(e.to_string()))?;
            maxwell_capacitance(&layout.refined(em.refine))?
        }
        (None, Some(p)) => MaxwellCapacitanceMatrix::from_csv(&read(p)?).map_err(|e| Failure::Config(e.to_string()))?,
        (None, None) => return Err(Failure::Config("em section needs layout or matrix".into())),
    };
    let islands = em.islands.clone().or_else(|| match m.labels.as_slice() {
        [a, b] => Some([a.clone(), b.clone()]),
        _ => None,
    });
    let (mut reduced_ff, mut c_diff, mut e_c) = (None, None, None);
    if let Some([a, b]) = &islands {
        let red = reduce_capacitance(&m, &[a, b])?;
        reduced_ff = Some([[red.c[(0, 0)], red.c[(0, 1)]], [red.c[(1, 0)], red.c[(1, 1)]]]);
        let c = differential_capacitance(&m, a, b)?;
        c_diff = Some(c);
        e_c = Some(effective_charging_energy(c)? * 1e3);
    }
    let report = CapacitanceReport {
        labels: m.labels.clone(),
        asymmetry: m.asymmetry,
        islands,
        reduced_ff,
        differential_capacitance_ff: c_diff,
        e_c_mhz: e_c,
        convention: REDUCTION_CONVENTION,
    };
    let mut out = Outputs::new();
    out.json("capmatrix.json", "capmatrix", cfg, report)?;
    out.csv("capmatrix.csv", m.to_csv());
    Ok(out)
}

fn coherence_report(cfg: &RunConfig, params: &QubitParams) -> Result<CoherenceReport, Failure> {
    let s = params.spectrum()?;
    Ok(effective_coherence(&cfg.channels(params)?, params, &s, &cfg.context())?)
}

pub fn coherence(cfg: &RunConfig) -> Result<Outputs, Failure> {
    let params = cfg.params()?;
    let report = coherence_report(cfg, &params)?;
    let mut csv = String::from("channel,gamma1_per_s,gamma_phi_per_s\n");
    for c in &report.channels {
        let _ = writeln!(csv, "{},{},{}", c.channel.name(), c.gamma1, c.gamma_phi);
    }
    let mut out = Outputs::new();
    out.json("coherence.json", "coherence", cfg, &report)?;
    out.csv("coherence.csv", csv);
    Ok(out)
}

#[derive(Serialize)]
struct DeviceSummary {
    levels: usize,
    drive_freq_ghz: f64,
    t1_us: f64,
    t2_us: f64,
    /// "config" when T1/T2 were given, "channels" when computed.
    coherence_source: &'static str,
    thermal_populations: Vec<f64>,
}

fn device(cfg: &RunConfig) -> Result<(DeviceModel, DeviceSummary), Failure> {
    let params = cfg.params()?;
    let n = &cfg.noise;
    let (t1, t2, source) = match (n.t1_us, n.t2_us) {
        (Some(t1), Some(t2)) => (t1, t2, "config"),
        (None, None) => {
            let r = coherence_report(cfg, &params)?;
            (r.t1_eff, r.t2_eff, "channels")
        }
        _ => return Err(Failure::Config("give both noise.t1_us and noise.t2_us, or neither".into())),
    };
    let dev = DeviceModel::new(&params, n.levels, n.temperature_k, t1, t2)?;
    let summary = DeviceSummary {
        levels: dev.dim(),
        drive_freq_ghz: dev.drive_freq(),
        t1_us: t1,
        t2_us: t2,
        coherence_source: source,
        thermal_populations: (0..dev.dim()).map(|k| dev.rho0[(k, k)].re).collect(),
    };
    Ok((dev, summary))
}

fn history_csv(r: &CalibrationResult) -> String {
    let mut csv = String::from("iteration,fidelity\n");
    for (k, f) in r.history.iter().enumerate() {
        let _ = writeln!(csv, "{},{f}", k + 1);
    }
    csv
}

#[derive(Serialize)]
struct CalibrationReport {
    device: DeviceSummary,
    calibration: CalibrationResult,
}

pub fn calibrate(cfg: &RunConfig) -> Result<Outputs, Failure> {
    let (dev, summary) = device(cfg)?;
    let r = calibrate_pulse(&cfg.gate()?, &dev, &cfg.calibration()?)?;
    let mut out = Outputs::new();
    out.csv("calibration_history.csv", history_csv(&r));
    out.json("calibration.json", "calibrate", cfg, CalibrationReport { device: summary, calibration: r })?;
    Ok(out)
}

#[derive(Serialize)]
struct DragReport {
    device: DeviceSummary,
    before: CalibrationResult,
    after: CalibrationResult,
}

pub fn drag(cfg: &RunConfig) -> Result<Outputs, Failure> {
    let (dev, summary) = device(cfg)?;
    let before = calibrate_pulse(&cfg.gate()?, &dev, &cfg.calibration()?)?;
    let betas = cfg.beta_grid()?;
    let after = optimize_drag(&before, &dev, &betas)?;
    let scan = betas
        .par_iter()
        .map(|b| pulse_fidelity(&dev, &before.gate, before.tau_star, before.delta_zeta_star, *b, before.frame))
        .collect::<Result<Vec<f64>, _>>()?;
    let mut csv = String::from("beta_ns,fidelity\n");
    for (b, f) in betas.iter().zip(&scan) {
        let _ = writeln!(csv, "{b},{f}");
    }
    let mut out = Outputs::new();
    out.csv("drag.csv", csv);
    out.json("drag.json", "drag", cfg, DragReport { device: summary, before, after })?;
    Ok(out)
}

#[derive(Serialize)]
struct BenchmarkReport {
    device: DeviceSummary,
    calibration: CalibrationResult,
    n_gates: usize,
    stride: usize,
    fit: ExponentialFit,
    error_per_gate: f64,
    /// Fitted ground-state population after the coherence budget of gates.
    p0_at_budget: f64,
}

pub fn benchmark(cfg: &RunConfig, n_gates: Option<usize>) -> Result<Outputs, Failure> {
    let (dev, summary) = device(cfg)?;
    let mut r = calibrate_pulse(&cfg.gate()?, &dev, &cfg.calibration()?)?;
    if cfg.pulse.drag_before_benchmark {
        r = optimize_drag(&r, &dev, &cfg.beta_grid()?)?;
    }
    let trace: BenchmarkTrace = benchmark_gate(&r, &dev, n_gates.unwrap_or(cfg.pulse.n_gates))?;
    r.error_per_gate = Some(trace.error_per_gate);
    let report = BenchmarkReport {
        device: summary,
        n_gates: trace.n_gates(),
        stride: trace.stride,
        fit: trace.fit,
        error_per_gate: trace.error_per_gate,
        p0_at_budget: trace.fit.eval(r.coherence_budget as f64),
        calibration: r,
    };
    let mut out = Outputs::new();
    out.csv("benchmark.csv", trace.to_csv());
    out.json("benchmark.json", "benchmark", cfg, report)?;
    Ok(out)
}
