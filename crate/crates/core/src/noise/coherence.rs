use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::channel::{coupling_scale, psd, Coupling, DephasingContext, NoiseChannel};
use crate::error::{Error, Result};
use crate::spectra::{EnergySpectrum, Parameter, QubitOperator, QubitParams};
use crate::units::{ghz_to_rad_per_s, HBAR};

/// Base step of the central difference for ∂ω01/∂λ, in natural units of λ.
pub const DERIVATIVE_STEP: f64 = 1e-4;

/// Channels used when a configuration does not list any.
pub fn default_channels(params: &QubitParams) -> Vec<NoiseChannel> {
    match params {
        QubitParams::Transmon(_) => {
            vec![NoiseChannel::dielectric(), NoiseChannel::critical_current(), NoiseChannel::charge()]
        }
        QubitParams::Fluxonium(_) => vec![
            NoiseChannel::dielectric(),
            NoiseChannel::flux_bias(),
            NoiseChannel::quasiparticle_inductive(),
            NoiseChannel::critical_current(),
        ],
    }
}

/// Fermi's golden rule |⟨0|Ŝ|1⟩|²·S/ħ² in 1/s, for an SI matrix element and
/// a spectral density of the conjugate variable.
pub fn golden_rule_rate(matrix_element: f64, spectral_density: f64) -> f64 {
    matrix_element * matrix_element * spectral_density / (HBAR * HBAR)
}

fn coupling_operator(channel: &NoiseChannel, params: &QubitParams) -> Result<QubitOperator> {
    let mismatch = || Error::ChannelMismatch { channel: channel.name(), usage: "this device" };
    match channel.coupling() {
        Coupling::Charge => Ok(params.charge_operator()),
        Coupling::Phase => params.phase_operator().map_err(|_| mismatch()),
        Coupling::FluxDerivative => params.d_hamiltonian(Parameter::PhiExt).map_err(|_| mismatch()),
        _ => Err(Error::ChannelMismatch { channel: channel.name(), usage: "relaxation" }),
    }
}

/// Downward relaxation rate Γ1 (1/s) caused by one channel.
pub fn t1_rate(
    channel: &NoiseChannel,
    params: &QubitParams,
    spectrum: &EnergySpectrum,
    ctx: &DephasingContext,
) -> Result<f64> {
    if !channel.relaxes() {
        return Err(Error::ChannelMismatch { channel: channel.name(), usage: "relaxation" });
    }
    let op = coupling_operator(channel, params)?;
    let element = op.matrix_element(spectrum, 0, 1).norm() * coupling_scale(channel);
    let omega = ghz_to_rad_per_s(spectrum.omega01());
    let rate = golden_rule_rate(element, psd(channel, params, omega, ctx)?);
    if rate.is_finite() {
        Ok(rate)
    } else {
        Err(Error::NonFinite("relaxation rate"))
    }
}

/// The parameter whose 1/f fluctuations a dephasing channel represents.
fn noisy_parameter(channel: &NoiseChannel, params: &QubitParams) -> Result<Parameter> {
    let p = match (channel, params) {
        (NoiseChannel::FluxBias { .. }, QubitParams::Fluxonium(_)) => Parameter::PhiExt,
        (NoiseChannel::CriticalCurrent1f { .. }, _) => Parameter::EJ,
        (NoiseChannel::Charge1f { .. }, QubitParams::Transmon(_)) => Parameter::Ng,
        (ch, _) if !ch.dephases() => return Err(Error::ChannelMismatch { channel: ch.name(), usage: "dephasing" }),
        (ch, _) => return Err(Error::ChannelMismatch { channel: ch.name(), usage: "this device" }),
    };
    Ok(p)
}

/// ω01 (GHz) at `param = value`, reflecting external flux back into [0, 1]
/// using the spectrum's symmetry under phi_ext → −phi_ext and → 1 − phi_ext.
fn omega01_at(params: &QubitParams, param: Parameter, value: f64) -> Result<f64> {
    let value = if param == Parameter::PhiExt {
        if value < 0.0 {
            -value
        } else if value > 1.0 {
            2.0 - value
        } else {
            value
        }
    } else {
        value
    };
    Ok(params.with(param, value)?.eigensystem()?.omega01())
}

/// ∂ω01/∂λ in GHz per unit λ: central differences at h and h/2 combined by
/// one Richardson step, (4·D(h/2) − D(h))/3.
pub fn omega01_derivative(params: &QubitParams, param: Parameter) -> Result<f64> {
    let x = params.get(param)?;
    let central = |h: f64| -> Result<f64> {
        Ok((omega01_at(params, param, x + h)? - omega01_at(params, param, x - h)?) / (2.0 * h))
    };
    let d = (4.0 * central(DERIVATIVE_STEP / 2.0)? - central(DERIVATIVE_STEP)?) / 3.0;
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::NonFinite("frequency derivative"))
    }
}

/// Pure dephasing rate Γφ = √2·A·|∂ω01/∂λ|·√|ln ω_low t_exp| (1/s) of a 1/f channel.
pub fn tphi_rate(channel: &NoiseChannel, params: &QubitParams, ctx: &DephasingContext) -> Result<f64> {
    channel.validate()?;
    ctx.validate()?;
    let param = noisy_parameter(channel, params)?;
    let amplitude = channel.one_over_f_amplitude(params).unwrap_or(0.0);
    if amplitude == 0.0 {
        return Ok(0.0);
    }
    let slope = ghz_to_rad_per_s(omega01_derivative(params, param)?);
    Ok(2f64.sqrt() * amplitude * slope.abs() * ctx.log_factor())
}

/// Rates contributed by one channel, 1/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRates {
    pub channel: NoiseChannel,
    pub gamma1: f64,
    pub gamma_phi: f64,
}

/// Aggregated coherence of a device under a set of channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub channels: Vec<ChannelRates>,
    /// Σ Γ1, 1/s.
    pub gamma1: f64,
    /// Σ Γφ, 1/s.
    pub gamma_phi: f64,
    /// µs; infinite when no channel relaxes.
    pub t1_eff: f64,
    pub t_phi_eff: f64,
    pub t2_eff: f64,
}

/// 1/T2 = 1/Tφ + 1/(2 T1), any consistent time unit.
pub fn t2_from(t1: f64, t_phi: f64) -> f64 {
    1.0 / (1.0 / t_phi + 0.5 / t1)
}

/// Tφ backed out of measured T1 and T2: 1/Tφ = 1/T2 − 1/(2 T1).
pub fn pure_dephasing_time(t1: f64, t2: f64) -> Result<f64> {
    let inv = 1.0 / t2 - 0.5 / t1;
    if t1 > 0.0 && t2 > 0.0 && inv > 0.0 {
        Ok(1.0 / inv)
    } else {
        Err(Error::InvalidParameter(format!("T2 = {t2} exceeds 2·T1 = {}", 2.0 * t1)))
    }
}

/// Sum the per-channel rates and convert to effective times.
pub fn effective_coherence(
    channels: &[NoiseChannel],
    params: &QubitParams,
    spectrum: &EnergySpectrum,
    ctx: &DephasingContext,
) -> Result<CoherenceReport> {
    if channels.is_empty() {
        return Err(Error::InvalidParameter("no noise channels given".into()));
    }
    let per: Vec<ChannelRates> = channels
        .iter()
        .map(|ch| {
            let gamma1 = if ch.relaxes() { t1_rate(ch, params, spectrum, ctx)? } else { 0.0 };
            let gamma_phi = if ch.dephases() { tphi_rate(ch, params, ctx)? } else { 0.0 };
            Ok(ChannelRates { channel: *ch, gamma1, gamma_phi })
        })
        .collect::<Result<_>>()?;
    let gamma1: f64 = per.iter().map(|c| c.gamma1).sum();
    let gamma_phi: f64 = per.iter().map(|c| c.gamma_phi).sum();
    let micro = |rate: f64| 1e6 / rate;
    let t1_eff = micro(gamma1);
    let t_phi_eff = micro(gamma_phi);
    Ok(CoherenceReport { channels: per, gamma1, gamma_phi, t1_eff, t_phi_eff, t2_eff: micro(gamma_phi + 0.5 * gamma1) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherencePoint {
    pub value: f64,
    pub report: CoherenceReport,
}

/// Effective coherence over a grid of one device parameter.
pub fn coherence_sweep(
    template: &QubitParams,
    channels: &[NoiseChannel],
    parameter: Parameter,
    grid: &[f64],
    ctx: &DephasingContext,
) -> Result<Vec<CoherencePoint>> {
    grid.par_iter()
        .map(|&value| {
            let params = template.with(parameter, value)?;
            let spectrum = params.spectrum()?;
            let report = effective_coherence(channels, &params, &spectrum, ctx)?;
            Ok(CoherencePoint { value, report })
        })
        .collect()
}
