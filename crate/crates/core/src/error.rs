use thiserror::Error;

/// Errors raised by series validation, transforms, generators and tests.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series is constant (zero sample variance)")]
    ConstantSeries,

    #[error("sample {index} is not finite")]
    NonFinite { index: usize },

    #[error("series too short: need at least {min} samples, got {len}")]
    TooShort { len: usize, min: usize },

    #[error("bad window: {0}")]
    BadWindow(String),

    #[error("cutoff bin {fc} outside 0..={max}")]
    BadCutoff { fc: usize, max: usize },

    #[error("spectrum bin {bin} must be real (phase 0 or pi), found phase {phase}")]
    SymmetryViolation { bin: usize, phase: f64 },

    #[error("lag {lag} invalid for series of length {len}")]
    BadLag { lag: usize, len: usize },

    #[error("need at least 2 bins, got {0}")]
    BadBins(usize),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("recursion diverged at sample {index} (|x| > 1e6)")]
    Divergence { index: usize },

    #[error("spectrum has no pronounced peak")]
    NoPeak,

    #[error("surrogate ensemble is degenerate: {0}")]
    DegenerateEnsemble(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
