use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("basis cutoff {cutoff} not converged: doubling it moved {quantity} by {relative_change:.3e} (relative)")]
    CutoffNotConverged { cutoff: usize, quantity: &'static str, relative_change: f64 },

    #[error("spectrum has {found} levels, need at least {needed}")]
    TooFewLevels { found: usize, needed: usize },

    #[error("level {level} out of range for basis of dimension {dim}")]
    LevelOutOfRange { level: usize, dim: usize },

    #[error("iterative solve did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("capacitance matrix asymmetry {asymmetry:.3e} exceeds 1% (grid too coarse)")]
    AsymmetricCapacitance { asymmetry: f64 },

    #[error("singular block while eliminating nodes {0:?}")]
    SingularReduction(Vec<String>),

    #[error("unknown conductor label '{0}'")]
    UnknownLabel(String),

    #[error("layout: {0}")]
    Layout(String),

    #[error("noise channel {channel} cannot be used for {usage}")]
    ChannelMismatch { channel: &'static str, usage: &'static str },

    #[error("non-physical density matrix: {0}")]
    NonPhysicalState(String),

    #[error("trace drifted by {drift:.3e}; reduce the integration step")]
    TraceDrift { drift: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("exponential fit diverged (residual trace: {residuals:?})")]
    FitDiverged { residuals: Vec<f64> },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
