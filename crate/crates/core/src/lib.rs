//! Surrogate-data tests for nonlinearity in stationary and non-stationary
//! time series.
//!
//! The crate provides
//!
//! * a validated [`TimeSeries`] type with normalization, end-point trimming,
//!   windowed moments and calibrated noise ([`series`]);
//! * one-sided Fourier decomposition with band-limited phase randomization
//!   ([`spectral`]);
//! * the surrogate generators RS, RP, AAFT, IAAFT, SSS, BPR and the
//!   amplitude-adjusted band-phase-randomized method ([`surrogate`]);
//! * test statistics `AC(tau)`, `I(tau)` and local-moment mismatch ([`stats`]);
//! * the rank test, cutoff selection, the cutoff sweep with classification,
//!   and Monte Carlo error rates ([`hypothesis`]);
//! * the benchmark processes ([`models`]) and file formats ([`io`]).
//!
//! All randomness is seeded; see [`rng`] for how seeds are split across
//! ensemble members.
//!
//! ```
//! use bandphase::{models::Preset, series, hypothesis};
//!
//! let x = series::preprocess(&Preset::Nls.generate(1024, 0)?, 0.9)?;
//! let mut cfg = hypothesis::SweepConfig::new(x.len(), 50, 7);
//! cfg.grid_size = 3;
//! cfg.surrogates = 19;
//! let sweep = hypothesis::sweep(&x, &cfg)?;
//! assert_eq!(hypothesis::classify(&sweep), hypothesis::Classification::Nonlinear);
//! # Ok::<(), bandphase::Error>(())
//! ```

pub mod error;
pub mod hypothesis;
pub mod io;
pub mod models;
pub mod rng;
pub mod series;
pub mod spectral;
pub mod stats;
pub mod surrogate;

pub use error::{Error, Result};
pub use hypothesis::{
    classify, estimate_power, rank_test, select_fc_min, sweep, Classification, ErrorRates,
    FcMinConfig, FcMinMethod, SweepConfig, SweepResult, TestConfig, TestVerdict,
};
pub use models::Preset;
pub use series::{LocalMoments, TimeSeries};
pub use spectral::Spectrum;
pub use stats::{Binning, Moment, Statistic};
pub use surrogate::{Method, SurrogateSpec};
