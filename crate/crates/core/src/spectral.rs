//! One-sided Fourier decomposition of real series and band-limited phase
//! randomization.
//!
//! Bins run over `n = 0..=N/2`. The DC bin, and for even `N` the Nyquist bin,
//! are real: their phase is 0 or pi. Negative-frequency bins are implied by
//! conjugate symmetry and never stored.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use realfft::num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::series::TimeSeries;

/// Tolerance used when checking that DC/Nyquist phases are 0 or pi.
const REAL_BIN_TOL: f64 = 1e-9;

/// Cached forward/inverse real FFT plans for one length.
pub(crate) struct Plan {
    n: usize,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
    fft_scratch: Vec<Complex64>,
}

type Plans = (Arc<dyn RealToComplex<f64>>, Arc<dyn ComplexToReal<f64>>);

thread_local! {
    static PLANS: RefCell<(RealFftPlanner<f64>, HashMap<usize, Plans>)> =
        RefCell::new((RealFftPlanner::new(), HashMap::new()));
}

impl Plan {
    pub(crate) fn for_len(n: usize) -> Plan {
        let (r2c, c2r) = PLANS.with(|p| {
            let (planner, cache) = &mut *p.borrow_mut();
            cache
                .entry(n)
                .or_insert_with(|| (planner.plan_fft_forward(n), planner.plan_fft_inverse(n)))
                .clone()
        });
        let len = r2c.get_scratch_len().max(c2r.get_scratch_len());
        Plan {
            n,
            r2c,
            c2r,
            fft_scratch: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub(crate) fn bins(&self) -> usize {
        self.n / 2 + 1
    }

    /// Unnormalized forward transform into `out` (length `N/2 + 1`).
    pub(crate) fn forward_into(&mut self, x: &[f64], scratch: &mut Vec<f64>, out: &mut [Complex64]) {
        scratch.clear();
        scratch.extend_from_slice(x);
        self.r2c
            .process_with_scratch(scratch, out, &mut self.fft_scratch)
            .expect("buffer lengths match the plan");
        out[0].im = 0.0;
        if self.n % 2 == 0 {
            out[self.n / 2].im = 0.0;
        }
    }

    /// Inverse transform scaled by `1/N`. `spec` is consumed as scratch.
    pub(crate) fn inverse_into(&mut self, spec: &mut [Complex64], out: &mut [f64]) {
        spec[0].im = 0.0;
        if self.n % 2 == 0 {
            spec[self.n / 2].im = 0.0;
        }
        self.c2r
            .process_with_scratch(spec, out, &mut self.fft_scratch)
            .expect("buffer lengths match the plan");
        let scale = 1.0 / self.n as f64;
        out.iter_mut().for_each(|v| *v *= scale);
    }
}

/// Full complex one-sided transform of `x`.
pub(crate) fn rfft(x: &[f64]) -> Vec<Complex64> {
    let mut plan = Plan::for_len(x.len());
    let mut out = vec![Complex64::new(0.0, 0.0); plan.bins()];
    plan.forward_into(x, &mut Vec::with_capacity(x.len()), &mut out);
    out
}

/// One-sided periodogram `|X(n)|^2`.
pub fn periodogram(x: &TimeSeries) -> Vec<f64> {
    rfft(x.as_slice()).iter().map(|c| c.norm_sqr()).collect()
}

/// Relative L2 distance between two periodograms, `||P' - P|| / ||P||`,
/// ignoring the DC bin.
pub fn periodogram_error(reference: &[f64], other: &[f64]) -> f64 {
    let (num, den) = reference
        .iter()
        .zip(other)
        .skip(1)
        .fold((0.0, 0.0), |(n, d), (a, b)| (n + (a - b) * (a - b), d + a * a));
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

/// Magnitude/phase decomposition of a real series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    magnitudes: Vec<f64>,
    phases: Vec<f64>,
    len: usize,
}

fn wrap_real_phase(c: Complex64) -> f64 {
    if c.re < 0.0 {
        PI
    } else {
        0.0
    }
}

/// Maps an angle into `(-pi, pi]`.
fn principal(phase: f64) -> f64 {
    if phase <= -PI {
        phase + 2.0 * PI
    } else {
        phase
    }
}

impl Spectrum {
    /// Builds a spectrum from explicit parts, checking the real-bin constraint.
    pub fn from_parts(magnitudes: Vec<f64>, phases: Vec<f64>, len: usize) -> Result<Self> {
        let bins = len / 2 + 1;
        if len < 2 || magnitudes.len() != bins || phases.len() != bins {
            return Err(Error::LengthMismatch {
                left: bins,
                right: magnitudes.len().min(phases.len()),
            });
        }
        if let Some(index) = magnitudes
            .iter()
            .chain(phases.iter())
            .position(|v| !v.is_finite())
        {
            return Err(Error::NonFinite { index });
        }
        if magnitudes.iter().any(|&m| m < 0.0) {
            return Err(crate::error::invalid("magnitudes", "must be non-negative"));
        }
        let s = Self {
            magnitudes,
            phases,
            len,
        };
        s.check_real_bins()?;
        Ok(s)
    }

    fn check_real_bins(&self) -> Result<()> {
        let mut real_bins = vec![0];
        if self.len % 2 == 0 {
            real_bins.push(self.len / 2);
        }
        for bin in real_bins {
            let p = self.phases[bin];
            let near_zero = p.abs() <= REAL_BIN_TOL;
            let near_pi = (p.abs() - PI).abs() <= REAL_BIN_TOL;
            if !(near_zero || near_pi) {
                return Err(Error::SymmetryViolation { bin, phase: p });
            }
        }
        Ok(())
    }

    /// `S(n)` for `n = 0..=N/2`.
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// `phi(n)` in `(-pi, pi]` for `n = 0..=N/2`.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Length of the series this spectrum came from.
    pub fn original_len(&self) -> usize {
        self.len
    }

    pub fn is_even(&self) -> bool {
        self.len % 2 == 0
    }

    /// Largest valid cutoff bin, `N/2`.
    pub fn max_cutoff(&self) -> usize {
        self.len / 2
    }

    /// Bins whose phase may be randomized: interior bins, excluding DC and Nyquist.
    fn interior(&self) -> std::ops::Range<usize> {
        let end = if self.is_even() {
            self.len / 2
        } else {
            self.len / 2 + 1
        };
        1..end
    }

    /// Replaces the phase of every interior bin above `fc` with an independent
    /// draw from `U(-pi, pi]`. Bins `0..=fc`, the DC bin and the Nyquist bin
    /// keep their phases; magnitudes are copied unchanged.
    pub fn randomize_phases_band(&self, fc: usize, seed: u64) -> Result<Spectrum> {
        if fc > self.max_cutoff() {
            return Err(Error::BadCutoff {
                fc,
                max: self.max_cutoff(),
            });
        }
        let mut r = rng::rng(seed);
        let mut phases = self.phases.clone();
        for n in self.interior().filter(|&n| n > fc) {
            let u: f64 = r.random();
            phases[n] = PI - 2.0 * PI * u;
        }
        Ok(Spectrum {
            magnitudes: self.magnitudes.clone(),
            phases,
            len: self.len,
        })
    }

    /// Complex one-sided coefficients `S(n) e^{i phi(n)}`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        self.magnitudes
            .iter()
            .zip(&self.phases)
            .map(|(&m, &p)| Complex64::from_polar(m, p))
            .collect()
    }
}

/// Forward transform of a series.
pub fn forward(x: &TimeSeries) -> Result<Spectrum> {
    let coeffs = rfft(x.as_slice());
    let n = x.len();
    let last = n / 2;
    let phases = coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if k == 0 || (n % 2 == 0 && k == last) {
                wrap_real_phase(*c)
            } else {
                principal(c.arg())
            }
        })
        .collect();
    Ok(Spectrum {
        magnitudes: coeffs.iter().map(|c| c.norm()).collect(),
        phases,
        len: n,
    })
}

/// Inverse transform back to a real series.
pub fn inverse(spec: &Spectrum) -> Result<TimeSeries> {
    spec.check_real_bins()?;
    let mut plan = Plan::for_len(spec.len);
    let mut coeffs = spec.coefficients();
    let mut out = vec![0.0; spec.len];
    plan.inverse_into(&mut coeffs, &mut out);
    TimeSeries::new(out)
}

/// Free-function form of [`Spectrum::randomize_phases_band`].
pub fn randomize_phases_band(spec: &Spectrum, fc: usize, seed: u64) -> Result<Spectrum> {
    spec.randomize_phases_band(fc, seed)
}
