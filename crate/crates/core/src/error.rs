use thiserror::Error;

use crate::frames::Frame;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("frame mismatch: expected {expected:?} tensor, got {found:?}")]
    FrameMismatch { expected: Frame, found: Frame },

    #[error("invalid NV orientation: {0}")]
    InvalidOrientation(String),

    #[error("{field} = {value} is out of range: {reason}")]
    Domain {
        field: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("mixing angle undefined: Π⊥ = 0 (degenerate branches)")]
    DegenerateBranches,

    #[error("degenerate levels: vanishing denominator in {0}")]
    DegenerateLevel(&'static str),

    #[error("invalid vibronic coupling: {0}")]
    InvalidCoupling(String),

    #[error("vibronic state {index} has no clean irrep label (best projector weight {weight:.4}); increase n_max")]
    TruncationTooSmall { index: usize, weight: f64 },

    #[error("eigensolver did not converge for a {0}x{0} matrix")]
    Eigensolver(usize),

    #[error("irrep mismatch: {0}")]
    IrrepMismatch(String),

    #[error("spectral data: {0}")]
    Spectral(String),

    #[error("temperature mismatch: dataset at {dataset} K, run at {run} K")]
    TemperatureMismatch { dataset: f64, run: f64 },

    #[error(
        "dt·max_rate = {product:.3} exceeds the stability bound 0.1; use dt ≤ {suggested:.3e} s"
    )]
    StabilityGuard { product: f64, suggested: f64 },

    #[error("rate model is not connected: null space has dimension {0}")]
    Structural(usize),

    #[error("negative rate {value} for {name}")]
    NegativeRate { name: String, value: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
