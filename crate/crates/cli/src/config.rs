//! Run configuration: a TOML file with one device section and optional
//! noise, pulse, sweep, spectrum and em sections. Units are spelled out in
//! key names.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use scqkit::calibrate::{CalibrationConfig, Grid, Rounding};
use scqkit::control::GateSpec;
use scqkit::dynamics::Frame;
use scqkit::noise::{DephasingContext, NoiseChannel};
use scqkit::spectra::{FluxoniumParams, Parameter, QubitParams, TransmonParams};

use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub transmon: Option<TransmonSection>,
    #[serde(default)]
    pub fluxonium: Option<FluxoniumSection>,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub pulse: PulseSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub em: Option<EmSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonSection {
    pub e_j_ghz: f64,
    pub e_c_ghz: f64,
    #[serde(default)]
    pub n_g: f64,
    #[serde(default = "default_n_cut")]
    pub n_cut: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxoniumSection {
    pub e_j_ghz: f64,
    pub e_c_ghz: f64,
    pub e_l_ghz: f64,
    #[serde(default = "half")]
    pub phi_ext: f64,
    #[serde(default = "default_osc_dim")]
    pub osc_dim: usize,
}

fn default_n_cut() -> usize {
    TransmonParams::new(1.0, 1.0, 0.0).n_cut
}

fn default_osc_dim() -> usize {
    FluxoniumParams::new(1.0, 1.0, 1.0, 0.5).osc_dim
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// Channel names; empty means the device's default set.
    pub channels: Vec<String>,
    pub q_cap: Option<f64>,
    pub q_ind: Option<f64>,
    pub temperature_k: f64,
    pub omega_low_rad_per_s: f64,
    pub t_exp_s: f64,
    /// Measured coherence used for pulse simulations; computed from the
    /// channels when absent.
    pub t1_us: Option<f64>,
    pub t2_us: Option<f64>,
    /// Levels kept in pulse simulations.
    pub levels: usize,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let ctx = DephasingContext::default();
        Self {
            channels: Vec::new(),
            q_cap: None,
            q_ind: None,
            temperature_k: ctx.temperature,
            omega_low_rad_per_s: ctx.omega_low,
            t_exp_s: ctx.t_exp,
            t1_us: None,
            t2_us: None,
            levels: scqkit::calibrate::DEFAULT_LEVELS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseSection {
    /// "x" (π pulse), "hadamard" or "custom" with the three angles.
    pub gate: String,
    pub theta_rad: Option<f64>,
    pub phi_rad: Option<f64>,
    pub lambda_rad: Option<f64>,
    pub tau_min_ns: f64,
    pub tau_max_ns: f64,
    pub tau_step_ns: f64,
    pub delta_zeta_min_rad: f64,
    pub delta_zeta_max_rad: f64,
    pub delta_zeta_step_rad: f64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub beta_ns: f64,
    pub beta_min_ns: f64,
    pub beta_max_ns: f64,
    pub beta_step_ns: f64,
    /// "lab", "rotating" or "rotating_wave".
    pub frame: String,
    pub refine_delta_zeta: bool,
    /// "nearest" or "floor".
    pub rounding: String,
    pub n_gates: usize,
    /// Optimize β before benchmarking.
    pub drag_before_benchmark: bool,
}

impl Default for PulseSection {
    fn default() -> Self {
        let c = CalibrationConfig::default();
        Self {
            gate: "x".into(),
            theta_rad: None,
            phi_rad: None,
            lambda_rad: None,
            tau_min_ns: c.tau.min,
            tau_max_ns: c.tau.max,
            tau_step_ns: c.tau.step,
            delta_zeta_min_rad: c.delta_zeta.min,
            delta_zeta_max_rad: c.delta_zeta.max,
            delta_zeta_step_rad: c.delta_zeta.step,
            max_iterations: c.max_iterations,
            tolerance: c.tolerance,
            beta_ns: c.beta,
            beta_min_ns: -0.5,
            beta_max_ns: 0.5,
            beta_step_ns: 0.05,
            frame: "lab".into(),
            refine_delta_zeta: c.refine_delta_zeta,
            rounding: "nearest".into(),
            n_gates: 2000,
            drag_before_benchmark: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    /// Levels reported in the JSON.
    pub levels: usize,
    /// Eigenstates written to the wavefunction CSV.
    pub wavefunctions: usize,
    pub phi_min_rad: f64,
    pub phi_max_rad: f64,
    pub phi_points: usize,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self { levels: 6, wavefunctions: 3, phi_min_rad: -2.0 * PI, phi_max_rad: 2.0 * PI, phi_points: 401 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// One or two axes; the last varies fastest.
    pub axis: Vec<SweepAxis>,
    /// Also compute T1/T2 at each point.
    #[serde(default = "yes")]
    pub coherence: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmSection {
    /// Conductor layout file; relative paths are taken from the config file.
    pub layout: Option<PathBuf>,
    /// A Maxwell matrix CSV to reduce instead of extracting one.
    pub matrix: Option<PathBuf>,
    /// The two islands of the qubit mode.
    pub islands: Option<[String; 2]>,
    #[serde(default = "one")]
    pub refine: usize,
}

fn one() -> usize {
    1
}

fn config_error(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(config_error(format!("{name} = {v} must be positive")))
    }
}

impl RunConfig {
    /// Read, parse and validate a config file. Relative paths inside it are
    /// resolved against its directory.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(em) = cfg.em.as_mut() {
            for p in [&mut em.layout, &mut em.matrix].into_iter().flatten() {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        match (&self.transmon, &self.fluxonium) {
            (Some(t), None) => {
                positive("transmon.e_j_ghz", t.e_j_ghz)?;
                positive("transmon.e_c_ghz", t.e_c_ghz)?;
            }
            (None, Some(f)) => {
                positive("fluxonium.e_j_ghz", f.e_j_ghz)?;
                positive("fluxonium.e_c_ghz", f.e_c_ghz)?;
                positive("fluxonium.e_l_ghz", f.e_l_ghz)?;
            }
            (None, None) if self.em.is_some() => {}
            (None, None) => return Err(config_error("missing device section ([transmon] or [fluxonium])")),
            (Some(_), Some(_)) => return Err(config_error("exactly one device section is allowed")),
        }
        if self.transmon.is_some() || self.fluxonium.is_some() {
            self.params()?.validate().map_err(|e| config_error(e.to_string()))?;
        }
        let n = &self.noise;
        positive("noise.temperature_k", n.temperature_k)?;
        positive("noise.omega_low_rad_per_s", n.omega_low_rad_per_s)?;
        positive("noise.t_exp_s", n.t_exp_s)?;
        for (name, v) in
            [("noise.t1_us", n.t1_us), ("noise.t2_us", n.t2_us), ("noise.q_cap", n.q_cap), ("noise.q_ind", n.q_ind)]
        {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        if n.levels < 2 {
            return Err(config_error("noise.levels must be at least 2"));
        }
        let s = &self.spectrum;
        if s.phi_points < 2 || !(s.phi_max_rad > s.phi_min_rad) {
            return Err(config_error("spectrum φ grid needs ≥ 2 points and phi_max_rad > phi_min_rad"));
        }
        if let Some(sw) = &self.sweep {
            if sw.axis.is_empty() || sw.axis.len() > 2 {
                return Err(config_error("sweep needs one or two [[sweep.axis]] entries"));
            }
            for a in &sw.axis {
                parameter(&a.parameter)?;
                if a.points == 0 || !(a.max >= a.min) || (a.points > 1 && a.max == a.min) {
                    return Err(config_error(format!("sweep axis {} has an empty range", a.parameter)));
                }
            }
        }
        if let Some(em) = &self.em {
            match (&em.layout, &em.matrix) {
                (Some(p), None) | (None, Some(p)) => {
                    if !p.is_file() {
                        return Err(config_error(format!("em input {} does not exist", p.display())));
                    }
                }
                _ => return Err(config_error("em section needs exactly one of layout or matrix")),
            }
            if em.refine == 0 {
                return Err(config_error("em.refine must be at least 1"));
            }
        }
        self.gate()?;
        self.calibration()?;
        self.beta_grid()?;
        Ok(())
    }

    /// The device of the single device section.
    pub fn params(&self) -> Result<QubitParams, Failure> {
        match (&self.transmon, &self.fluxonium) {
            (Some(t), None) => Ok(QubitParams::Transmon(TransmonParams {
                n_cut: t.n_cut,
                ..TransmonParams::new(t.e_j_ghz, t.e_c_ghz, t.n_g)
            })),
            (None, Some(f)) => Ok(QubitParams::Fluxonium(FluxoniumParams {
                osc_dim: f.osc_dim,
                ..FluxoniumParams::new(f.e_j_ghz, f.e_c_ghz, f.e_l_ghz, f.phi_ext)
            })),
            _ => Err(config_error("missing device section ([transmon] or [fluxonium])")),
        }
    }

    pub fn context(&self) -> DephasingContext {
        DephasingContext {
            omega_low: self.noise.omega_low_rad_per_s,
            t_exp: self.noise.t_exp_s,
            temperature: self.noise.temperature_k,
        }
    }

    pub fn channels(&self, params: &QubitParams) -> Result<Vec<NoiseChannel>, Failure> {
        let mut out = if self.noise.channels.is_empty() {
            scqkit::noise::default_channels(params)
        } else {
            self.noise.channels.iter().map(|n| channel(n)).collect::<Result<_, _>>()?
        };
        for ch in &mut out {
            match ch {
                NoiseChannel::Dielectric { q_cap } => *q_cap = self.noise.q_cap.unwrap_or(*q_cap),
                NoiseChannel::QuasiparticleInductive { q_ind } => *q_ind = self.noise.q_ind.unwrap_or(*q_ind),
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn gate(&self) -> Result<GateSpec, Failure> {
        let p = &self.pulse;
        match p.gate.as_str() {
            "x" | "pi" => Ok(GateSpec::x()),
            "hadamard" | "h" => Ok(GateSpec::hadamard()),
            "custom" => match (p.theta_rad, p.phi_rad, p.lambda_rad) {
                (Some(t), Some(f), Some(l)) => Ok(GateSpec::new(t, f, l)),
                _ => Err(config_error("custom gate needs theta_rad, phi_rad and lambda_rad")),
            },
            other => Err(config_error(format!("unknown gate '{other}' (x, hadamard or custom)"))),
        }
    }

    pub fn calibration(&self) -> Result<CalibrationConfig, Failure> {
        let p = &self.pulse;
        let frame = match p.frame.as_str() {
            "lab" => Frame::Lab,
            "rotating" => Frame::Rotating,
            "rotating_wave" | "rwa" => Frame::RotatingWave,
            other => return Err(config_error(format!("unknown frame '{other}'"))),
        };
        let rounding = match p.rounding.as_str() {
            "nearest" => Rounding::Nearest,
            "floor" => Rounding::Floor,
            other => return Err(config_error(format!("unknown rounding '{other}'"))),
        };
        let cfg = CalibrationConfig {
            tau: Grid::new(p.tau_min_ns, p.tau_max_ns, p.tau_step_ns),
            delta_zeta: Grid::new(p.delta_zeta_min_rad, p.delta_zeta_max_rad, p.delta_zeta_step_rad),
            max_iterations: p.max_iterations,
            tolerance: p.tolerance,
            beta: p.beta_ns,
            frame,
            refine_delta_zeta: p.refine_delta_zeta,
            rounding,
        };
        cfg.validate().map_err(|e| config_error(e.to_string()))?;
        Ok(cfg)
    }

    pub fn beta_grid(&self) -> Result<Vec<f64>, Failure> {
        let p = &self.pulse;
        let g = Grid::new(p.beta_min_ns, p.beta_max_ns, p.beta_step_ns);
        g.validate("beta").map_err(|e| config_error(e.to_string()))?;
        Ok(g.values())
    }
}

/// Sweepable parameter from its config key.
pub fn parameter(name: &str) -> Result<Parameter, Failure> {
    match name {
        "e_j_ghz" => Ok(Parameter::EJ),
        "e_c_ghz" => Ok(Parameter::EC),
        "e_l_ghz" => Ok(Parameter::EL),
        "n_g" => Ok(Parameter::Ng),
        "phi_ext" => Ok(Parameter::PhiExt),
        other => Err(config_error(format!(
            "unsupported sweep parameter '{other}' (e_j_ghz, e_c_ghz, e_l_ghz, n_g, phi_ext)"
        ))),
    }
}

fn channel(name: &str) -> Result<NoiseChannel, Failure> {
    match name {
        "dielectric" => Ok(NoiseChannel::dielectric()),
        "quasiparticle_inductive" => Ok(NoiseChannel::quasiparticle_inductive()),
        "flux_bias" => Ok(NoiseChannel::flux_bias()),
        "critical_current" => Ok(NoiseChannel::critical_current()),
        "charge" => Ok(NoiseChannel::charge()),
        other => Err(config_error(format!("unknown noise channel '{other}'"))),
    }
}

/// Parse `NAME=MIN:MAX:POINTS` from the command line.
pub fn parse_axis(text: &str) -> Result<SweepAxis, Failure> {
    let err = || config_error(format!("sweep axis '{text}' is not NAME=MIN:MAX:POINTS"));
    let (name, range) = text.split_once('=').ok_or_else(err)?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(err());
    }
    Ok(SweepAxis {
        parameter: name.trim().to_string(),
        min: parts[0].trim().parse().map_err(|_| err())?,
        max: parts[1].trim().parse().map_err(|_| err())?,
        points: parts[2].trim().parse().map_err(|_| err())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, Failure> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    #[test]
    fn minimal_transmon_uses_defaults() {
        let cfg = parse("[transmon]\ne_j_ghz = 7.68\ne_c_ghz = 0.31\n").unwrap();
        assert_eq!(cfg.noise.levels, 4);
        assert_eq!(cfg.calibration().unwrap(), CalibrationConfig::default());
        assert_eq!(cfg.gate().unwrap(), GateSpec::x());
    }

    #[test]
    fn device_section_rules() {
        assert!(matches!(parse("seed = 1\n"), Err(Failure::Config(_))));
        let both = "[transmon]\ne_j_ghz = 1\ne_c_ghz = 1\n[fluxonium]\ne_j_ghz = 1\ne_c_ghz = 1\ne_l_ghz = 1\n";
        assert!(parse(both).is_err());
        assert!(parse("[transmon]\ne_j_ghz = -1\ne_c_ghz = 0.3\n").is_err());
        assert!(parse("[transmon]\ne_j_ghz = 1\ne_c_ghz = 0.3\ntypo = 2\n").is_err());
    }

    #[test]
    fn axis_flag_parses() {
        let a = parse_axis("e_j_ghz=5:12:8").unwrap();
        assert_eq!((a.parameter.as_str(), a.min, a.max, a.points), ("e_j_ghz", 5.0, 12.0, 8));
        assert!(parse_axis("e_j_ghz=5:12").is_err());
        assert!(parameter("temperature").is_err());
    }
}
