//! Noise channels, relaxation and dephasing rates, and effective coherence.
//!
//! Spectral densities are in SI. Relaxation follows the golden rule with the
//! downward (emission) side of a thermally weighted loss spectrum; 1/f
//! channels dephase through the first derivative of ω01.

mod channel;
mod coherence;

pub use channel::{
    psd, q_cap_at, thermal_factor, Coupling, DephasingContext, NoiseChannel, DEFAULT_CHARGE_AMPLITUDE,
    DEFAULT_CRITICAL_CURRENT_AMPLITUDE, DEFAULT_FLUX_AMPLITUDE, DEFAULT_LINE_IMPEDANCE, DEFAULT_MUTUAL_INDUCTANCE,
    DEFAULT_Q_CAP, DEFAULT_Q_IND,
};
pub use coherence::{
    coherence_sweep, default_channels, effective_coherence, golden_rule_rate, omega01_derivative, pure_dephasing_time,
    t1_rate, t2_from, tphi_rate, ChannelRates, CoherencePoint, CoherenceReport, DERIVATIVE_STEP,
};
