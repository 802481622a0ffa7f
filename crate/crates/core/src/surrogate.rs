//! Constrained-realization surrogate generators.
//!
//! | method  | preserves                                   |
//! |---------|---------------------------------------------|
//! | RS      | amplitude distribution                       |
//! | RP      | periodogram                                  |
//! | AAFT    | amplitude distribution, periodogram (approx) |
//! | IAAFT   | amplitude distribution, periodogram (closer) |
//! | SSS     | amplitude distribution, slow trend           |
//! | BPR     | periodogram, phases of bins `0..=fc`         |
//! | AA-BPR  | amplitude distribution, periodogram (approx), low-band phases |
//!
//! The iterative methods alternate a spectrum-enforcement step with a
//! rank-reorder step and always finish on the rank-reorder step, so the
//! output is an exact permutation of the data.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use realfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::series::TimeSeries;
use crate::spectral::{self, periodogram_error, Plan};

/// Default iteration cap for IAAFT and AA-BPR.
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

/// Number of redraws attempted when an AA-BPR run converges back onto the
/// data ordering itself.
pub const MAX_REDRAWS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Rs,
    Rp,
    Aaft,
    Iaaft,
    Sss,
    Bpr,
    AaBpr,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Rs,
        Method::Rp,
        Method::Aaft,
        Method::Iaaft,
        Method::Sss,
        Method::Bpr,
        Method::AaBpr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rs => "rs",
            Method::Rp => "rp",
            Method::Aaft => "aaft",
            Method::Iaaft => "iaaft",
            Method::Sss => "sss",
            Method::Bpr => "bpr",
            Method::AaBpr => "aa_bpr",
        }
    }

    /// True when every surrogate is a permutation of the data.
    pub fn preserves_values(self) -> bool {
        !matches!(self, Method::Rp | Method::Bpr)
    }

    pub fn uses_cutoff(self) -> bool {
        matches!(self, Method::Bpr | Method::AaBpr)
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, Method::Iaaft | Method::AaBpr)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| invalid("method", format!("unknown surrogate method `{s}`")))
    }
}

/// Method selector plus parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateSpec {
    pub method: Method,
    /// Cutoff bin (BPR and AA-BPR only).
    pub fc: usize,
    /// Index-jitter amplitude (SSS only).
    pub sss_amplitude: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl SurrogateSpec {
    pub fn new(method: Method, seed: u64) -> Self {
        Self {
            method,
            fc: 0,
            sss_amplitude: 1.0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed,
        }
    }

    pub fn aa_bpr(fc: usize, seed: u64) -> Self {
        Self::new(Method::AaBpr, seed).with_fc(fc)
    }

    pub fn with_fc(mut self, fc: usize) -> Self {
        self.fc = fc;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_sss_amplitude(mut self, a: f64) -> Self {
        self.sss_amplitude = a;
        self
    }

    /// Checks parameters against a series of length `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.method.uses_cutoff() && self.fc > n / 2 {
            return Err(Error::BadCutoff {
                fc: self.fc,
                max: n / 2,
            });
        }
        if self.method == Method::Sss && !(self.sss_amplitude > 0.0 && self.sss_amplitude.is_finite()) {
            return Err(invalid("sss_amplitude", "must be positive and finite"));
        }
        if self.method.is_iterative() && self.max_iterations == 0 {
            return Err(invalid("max_iterations", "must be at least 1"));
        }
        Ok(())
    }

    /// Generates one surrogate of `x`.
    pub fn generate(&self, x: &TimeSeries) -> Result<Surrogate> {
        self.validate(x.len())?;
        let (series, refinement) = match self.method {
            Method::Rs => (rs(x, self.seed), None),
            Method::Rp => (rp(x, self.seed)?, None),
            Method::Aaft => (aaft(x, self.seed)?, None),
            Method::Sss => (sss(x, self.sss_amplitude, self.seed)?, None),
            Method::Bpr => (bpr(x, self.fc, self.seed)?, None),
            Method::Iaaft => {
                let r = iaaft(x, self.seed, self.max_iterations)?;
                (r.series, Some(r.info))
            }
            Method::AaBpr => {
                let r = aa_bpr(x, self.fc, self.seed, self.max_iterations)?;
                (r.series, Some(r.info))
            }
        };
        Ok(Surrogate { series, refinement })
    }

    /// Generates `m` surrogates; member `k` uses seed `split(self.seed, k)`.
    ///
    /// Members are computed in parallel; the output order is fixed.
    pub fn ensemble(&self, x: &TimeSeries, m: usize) -> Result<Vec<Surrogate>> {
        self.validate(x.len())?;
        (0..m)
            .into_par_iter()
            .map(|k| {
                self.clone()
                    .with_seed(rng::split(self.seed, k as u64))
                    .generate(x)
            })
            .collect()
    }
}

/// Diagnostics from an iterative refinement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementInfo {
    /// Iterations of the accepted draw.
    pub iterations: usize,
    /// The rank order reached a fixed point before the cap.
    pub converged: bool,
    /// Relative periodogram error of the output, see [`periodogram_error`].
    pub spectrum_error: f64,
    /// Extra draws made because a run collapsed onto the data ordering.
    pub redraws: usize,
    /// The output is the data itself.
    pub matches_data: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    pub series: TimeSeries,
    pub info: RefinementInfo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Surrogate {
    pub series: TimeSeries,
    pub refinement: Option<RefinementInfo>,
}

/// Indices of `v` in ascending value order; ties keep index order.
pub(crate) fn argsort(v: &[f64]) -> Vec<usize> {
    let mut order = Vec::with_capacity(v.len());
    let mut keyed = Vec::with_capacity(v.len());
    argsort_into(v, &mut keyed, &mut order);
    order
}

fn argsort_into(v: &[f64], keyed: &mut Vec<(f64, u32)>, order: &mut Vec<usize>) {
    keyed.clear();
    keyed.extend(v.iter().enumerate().map(|(i, &x)| (x, i as u32)));
    keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    order.clear();
    order.extend(keyed.iter().map(|&(_, i)| i as usize));
}

fn sorted_values(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_unstable_by(|a, b| a.total_cmp(b));
    s
}

/// Places `sorted[j]` at position `order[j]`.
fn reorder_into(order: &[usize], sorted: &[f64], out: &mut [f64]) {
    for (&pos, &v) in order.iter().zip(sorted) {
        out[pos] = v;
    }
}

/// Random shuffle.
pub fn rs(x: &TimeSeries, seed: u64) -> TimeSeries {
    let mut v = x.as_slice().to_vec();
    v.shuffle(&mut rng::rng(seed));
    TimeSeries::from_vec_unchecked(v)
}

/// Random-phase surrogate: all interior phases replaced.
pub fn rp(x: &TimeSeries, seed: u64) -> Result<TimeSeries> {
    bpr(x, 0, seed)
}

/// Band-phase-randomized surrogate: phases above bin `fc` replaced.
pub fn bpr(x: &TimeSeries, fc: usize, seed: u64) -> Result<TimeSeries> {
    let spec = spectral::forward(x)?;
    spectral::inverse(&spec.randomize_phases_band(fc, seed)?)
}

/// Amplitude-adjusted Fourier transform surrogate.
pub fn aaft(x: &TimeSeries, seed: u64) -> Result<TimeSeries> {
    let n = x.len();
    let mut r = rng::stream(seed, 0);
    let mut gauss: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
    gauss.sort_unstable_by(|a, b| a.total_cmp(b));
    let mut g = vec![0.0; n];
    reorder_into(&argsort(x.as_slice()), &gauss, &mut g);
    let p = rp(&TimeSeries::from_vec_unchecked(g), rng::split(seed, 1))?;
    let mut out = vec![0.0; n];
    reorder_into(&argsort(p.as_slice()), &sorted_values(x.as_slice()), &mut out);
    Ok(TimeSeries::from_vec_unchecked(out))
}

/// Small-shuffle surrogate: `s_t = x_{r_t}` where `r` ranks `t + A g_t`.
pub fn sss(x: &TimeSeries, amplitude: f64, seed: u64) -> Result<TimeSeries> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(invalid("sss_amplitude", "must be positive and finite"));
    }
    let mut r = rng::rng(seed);
    let jittered: Vec<f64> = (0..x.len())
        .map(|t| {
            let g: f64 = StandardNormal.sample(&mut r);
            t as f64 + amplitude * g
        })
        .collect();
    let v = x.as_slice();
    Ok(TimeSeries::from_vec_unchecked(
        argsort(&jittered).into_iter().map(|i| v[i]).collect(),
    ))
}

/// Iterative AAFT: the full-band case of [`aa_bpr`].
pub fn iaaft(x: &TimeSeries, seed: u64, max_iterations: usize) -> Result<Refined> {
    amplitude_adjusted(x, 0, seed, max_iterations)
}

/// Amplitude-adjusted band-phase-randomized surrogate.
///
/// Each spectrum step imposes the data's magnitudes on every bin and the
/// data's complex coefficient on bins `0..=fc`; each rank step reorders the
/// data values to follow the result. The iteration stops once the rank order
/// repeats or after `max_iterations`.
///
/// When there are phases left to randomize and a run ends on the data
/// ordering itself, the surrogate is redrawn from a derived seed (up to
/// [`MAX_REDRAWS`] times).
pub fn aa_bpr(x: &TimeSeries, fc: usize, seed: u64, max_iterations: usize) -> Result<Refined> {
    amplitude_adjusted(x, fc, seed, max_iterations)
}

fn amplitude_adjusted(x: &TimeSeries, fc: usize, seed: u64, max_iterations: usize) -> Result<Refined> {
    let n = x.len();
    if fc > n / 2 {
        return Err(Error::BadCutoff { fc, max: n / 2 });
    }
    if max_iterations == 0 {
        return Err(invalid("max_iterations", "must be at least 1"));
    }
    let mut state = AaState::new(x, fc);
    // Interior bins are 1..N/2 for even N, 1..=N/2 for odd N.
    let last_interior = if n % 2 == 0 { n / 2 - 1 } else { n / 2 };
    let randomizable = fc < last_interior;
    let mut attempt = 0;
    loop {
        let draw_seed = if attempt == 0 {
            seed
        } else {
            rng::split(seed, attempt as u64)
        };
        let (iterations, converged) = state.run(draw_seed, max_iterations);
        let matches_data = state.surrogate == x.as_slice();
        if !matches_data || !randomizable || attempt == MAX_REDRAWS {
            let spectrum_error = periodogram_error(&state.target_power(), &state.power_of_surrogate());
            return Ok(Refined {
                series: TimeSeries::from_vec_unchecked(state.surrogate),
                info: RefinementInfo {
                    iterations,
                    converged,
                    spectrum_error,
                    redraws: attempt,
                    matches_data,
                },
            });
        }
        attempt += 1;
    }
}

struct AaState<'a> {
    data: &'a [f64],
    fc: usize,
    plan: Plan,
    target: Vec<Complex64>,
    magnitudes: Vec<f64>,
    sorted: Vec<f64>,
    surrogate: Vec<f64>,
    spec: Vec<Complex64>,
    real: Vec<f64>,
    scratch: Vec<f64>,
    keyed: Vec<(f64, u32)>,
    order: Vec<usize>,
    previous: Vec<usize>,
}

impl<'a> AaState<'a> {
    fn new(x: &'a TimeSeries, fc: usize) -> Self {
        let data = x.as_slice();
        let n = data.len();
        let plan = Plan::for_len(n);
        let target = spectral::rfft(data);
        Self {
            data,
            fc,
            magnitudes: target.iter().map(|c| c.norm()).collect(),
            target,
            sorted: sorted_values(data),
            surrogate: vec![0.0; n],
            spec: vec![Complex64::new(0.0, 0.0); plan.bins()],
            real: vec![0.0; n],
            scratch: Vec::with_capacity(n),
            keyed: Vec::with_capacity(n),
            order: Vec::with_capacity(n),
            previous: Vec::with_capacity(n),
            plan,
        }
    }

    fn run(&mut self, seed: u64, max_iterations: usize) -> (usize, bool) {
        self.surrogate.copy_from_slice(self.data);
        self.surrogate.shuffle(&mut rng::rng(seed));
        self.previous.clear();
        for it in 1..=max_iterations {
            self.plan
                .forward_into(&self.surrogate, &mut self.scratch, &mut self.spec);
            for (k, c) in self.spec.iter_mut().enumerate() {
                if k <= self.fc {
                    *c = self.target[k];
                } else {
                    let norm = c.norm();
                    *c = if norm > 0.0 {
                        *c * (self.magnitudes[k] / norm)
                    } else {
                        Complex64::new(self.magnitudes[k], 0.0)
                    };
                }
            }
            self.plan.inverse_into(&mut self.spec, &mut self.real);
            argsort_into(&self.real, &mut self.keyed, &mut self.order);
            reorder_into(&self.order, &self.sorted, &mut self.surrogate);
            if self.order == self.previous {
                return (it, true);
            }
            std::mem::swap(&mut self.order, &mut self.previous);
        }
        (max_iterations, false)
    }

    fn target_power(&self) -> Vec<f64> {
        self.magnitudes.iter().map(|m| m * m).collect()
    }

    fn power_of_surrogate(&self) -> Vec<f64> {
        spectral::rfft(&self.surrogate)
            .iter()
            .map(|c| c.norm_sqr())
            .collect()
    }
}
