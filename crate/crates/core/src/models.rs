//! Benchmark processes: a damped-oscillator AR(2) with optional period
//! modulation, and a nonlinear second-order map with an optional regime switch.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::series::TimeSeries;

/// Samples generated and dropped before the returned series starts.
pub const TRANSIENT: usize = 1000;

/// Default series length of the presets.
pub const DEFAULT_LEN: usize = 2048;

const DIVERGENCE_BOUND: f64 = 1e6;

/// Parameters of
/// `x(n) = a1(n) x(n-1) + a2 x(n-2) + eta_n`, with
/// `a1(n) = 2 cos(2 pi / T(n)) e^(-1/tau)`, `a2 = -e^(-2/tau)` and
/// `T(n) = T_e + M_T sin(2 pi n / T_mod)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ar2Params {
    pub base_period: f64,
    pub modulation_depth: f64,
    pub modulation_period: f64,
    pub decay_time: f64,
    pub len: usize,
    pub seed: u64,
    /// Scale of the driving noise; 0 gives the homogeneous recursion.
    pub noise_scale: f64,
    /// `(x(-1), x(-2))`.
    pub initial: (f64, f64),
}

impl Ar2Params {
    pub fn new(len: usize, modulation_depth: f64, seed: u64) -> Self {
        Self {
            base_period: 10.0,
            modulation_depth,
            modulation_period: 250.0,
            decay_time: 50.0,
            len,
            seed,
            noise_scale: 1.0,
            initial: (0.0, 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.base_period > 0.0) {
            return Err(invalid("base_period", "must be positive"));
        }
        if !(self.modulation_period > 0.0) {
            return Err(invalid("modulation_period", "must be positive"));
        }
        if !(self.decay_time > 0.0) {
            return Err(invalid("decay_time", "must be positive"));
        }
        if self.len < 4 {
            return Err(Error::TooShort {
                len: self.len,
                min: 4,
            });
        }
        Ok(())
    }

    /// Coefficient `a1(n)`; `n` counts from the first generated sample.
    pub fn a1(&self, n: usize) -> f64 {
        let period = self.base_period
            + self.modulation_depth * (2.0 * PI * n as f64 / self.modulation_period).sin();
        2.0 * (2.0 * PI / period).cos() * (-1.0 / self.decay_time).exp()
    }

    pub fn a2(&self) -> f64 {
        -(-2.0 / self.decay_time).exp()
    }
}

/// Generates the AR(2) series after discarding [`TRANSIENT`] samples.
pub fn gen_ar2(p: &Ar2Params) -> Result<TimeSeries> {
    p.validate()?;
    let mut r = rng::rng(p.seed);
    let a2 = p.a2();
    let (mut x1, mut x2) = p.initial;
    let total = TRANSIENT + p.len;
    let mut out = Vec::with_capacity(p.len);
    for n in 0..total {
        let eta: f64 = StandardNormal.sample(&mut r);
        let x = p.a1(n) * x1 + a2 * x2 + p.noise_scale * eta;
        if !(x.abs() <= DIVERGENCE_BOUND) {
            return Err(Error::Divergence { index: n });
        }
        x2 = x1;
        x1 = x;
        if n >= TRANSIENT {
            out.push(x);
        }
    }
    TimeSeries::new(out)
}

/// Parameters of
/// `x(n) = a1(n) x(n-1) (1 - x(n-1)^2) e^(-x(n-1)^2) + a2 x(n-2)`,
/// where `a1` switches from `a1_first` to `a1_second` after
/// `floor(switch_fraction * len)` returned samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NlParams {
    pub a1_first: f64,
    pub a1_second: f64,
    pub switch_fraction: f64,
    pub a2: f64,
    pub len: usize,
    pub seed: u64,
    /// Standard deviation of optional additive dynamic noise; 0 by default.
    pub noise_scale: f64,
    /// `(x(-1), x(-2))`.
    pub initial: (f64, f64),
}

impl NlParams {
    pub fn stationary(len: usize) -> Self {
        Self {
            a1_first: 3.4,
            a1_second: 3.4,
            switch_fraction: 0.5,
            a2: 0.8,
            len,
            seed: 0,
            noise_scale: 0.0,
            initial: (0.1, 0.1),
        }
    }

    pub fn switching(len: usize) -> Self {
        Self {
            a1_first: 3.0,
            ..Self::stationary(len)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.len < 4 {
            return Err(Error::TooShort {
                len: self.len,
                min: 4,
            });
        }
        if !(self.switch_fraction > 0.0 && self.switch_fraction <= 1.0) {
            return Err(invalid("switch_fraction", "must lie in (0, 1]"));
        }
        if self.noise_scale < 0.0 {
            return Err(invalid("noise_scale", "must be non-negative"));
        }
        Ok(())
    }

    /// Index into the returned series at which `a1_second` takes over.
    pub fn switch_index(&self) -> usize {
        (self.switch_fraction * self.len as f64).floor() as usize
    }
}

/// Iterates the nonlinear map after discarding [`TRANSIENT`] samples.
pub fn gen_nl(p: &NlParams) -> Result<TimeSeries> {
    p.validate()?;
    let mut r = rng::rng(p.seed);
    let switch = TRANSIENT + p.switch_index();
    let (mut x1, mut x2) = p.initial;
    let mut out = Vec::with_capacity(p.len);
    for n in 0..TRANSIENT + p.len {
        let a1 = if n < switch { p.a1_first } else { p.a1_second };
        let mut x = a1 * x1 * (1.0 - x1 * x1) * (-x1 * x1).exp() + p.a2 * x2;
        if p.noise_scale > 0.0 {
            let eta: f64 = StandardNormal.sample(&mut r);
            x += p.noise_scale * eta;
        }
        if !(x.abs() <= DIVERGENCE_BOUND) {
            return Err(Error::Divergence { index: n });
        }
        x2 = x1;
        x1 = x;
        if n >= TRANSIENT {
            out.push(x);
        }
    }
    TimeSeries::new(out)
}

/// The four benchmark signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    /// Linear stationary: AR(2), `M_T = 0`.
    #[serde(rename = "LS")]
    Ls,
    /// Linear non-stationary: AR(2), `M_T = 6`.
    #[serde(rename = "LNS")]
    Lns,
    /// Nonlinear stationary: `a1 = 3.4`.
    #[serde(rename = "NLS")]
    Nls,
    /// Nonlinear non-stationary: `a1 = 3.0` then `3.4`.
    #[serde(rename = "NLNS")]
    Nlns,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Ls, Preset::Lns, Preset::Nls, Preset::Nlns];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Ls => "LS",
            Preset::Lns => "LNS",
            Preset::Nls => "NLS",
            Preset::Nlns => "NLNS",
        }
    }

    pub fn is_linear(self) -> bool {
        matches!(self, Preset::Ls | Preset::Lns)
    }

    pub fn is_stationary(self) -> bool {
        matches!(self, Preset::Ls | Preset::Nls)
    }

    /// Generates the preset. The nonlinear presets are noise-free, so their
    /// output does not depend on `seed`.
    pub fn generate(self, len: usize, seed: u64) -> Result<TimeSeries> {
        preset(self, len, seed)
    }
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid("preset", format!("unknown preset `{s}` (LS, LNS, NLS, NLNS)")))
    }
}

pub fn preset(name: Preset, len: usize, seed: u64) -> Result<TimeSeries> {
    if len < 256 {
        return Err(Error::TooShort { len, min: 256 });
    }
    match name {
        Preset::Ls => gen_ar2(&Ar2Params::new(len, 0.0, seed)),
        Preset::Lns => gen_ar2(&Ar2Params::new(len, 6.0, seed)),
        Preset::Nls => gen_nl(&NlParams { seed, ..NlParams::stationary(len) }),
        Preset::Nlns => gen_nl(&NlParams { seed, ..NlParams::switching(len) }),
    }
}
