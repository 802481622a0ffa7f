//! The time-series value type and the preprocessing applied before testing.
//!
//! All variances use the unbiased estimator (divisor `N - 1`).

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;

/// A uniformly sampled, real-valued scalar series with at least two finite samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    /// Validates and wraps `samples`.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooShort {
                len: samples.len(),
                min: 2,
            });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(samples))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; a series holds at least two samples.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn mean(&self) -> f64 {
        mean(&self.0)
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        variance(&self.0)
    }

    /// Samples `start..=end` as a new series.
    pub fn segment(&self, start: usize, end: usize) -> Result<Self> {
        if start >= end || end >= self.len() {
            return Err(invalid(
                "segment",
                format!("{start}..={end} not inside 0..{}", self.len()),
            ));
        }
        Self::new(self.0[start..=end].to_vec())
    }

    /// Samples in reverse order.
    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub(crate) fn from_vec_unchecked(samples: Vec<f64>) -> Self {
        debug_assert!(samples.len() >= 2);
        Self(samples)
    }
}

impl<'de> Deserialize<'de> for TimeSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        TimeSeries::new(v).map_err(serde::de::Error::custom)
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

pub(crate) fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (x.len() - 1) as f64
}

/// Rescales to zero mean and unit (unbiased) variance.
pub fn normalize(x: &TimeSeries) -> Result<TimeSeries> {
    let m = x.mean();
    let var = x.variance();
    if var <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    let sd = var.sqrt();
    Ok(TimeSeries(x.0.iter().map(|v| (v - m) / sd).collect()))
}

/// Value-plus-slope mismatch between the two ends of `x[i..=j]`.
pub fn endpoint_mismatch(x: &[f64], i: usize, j: usize) -> f64 {
    let jump = x[i] - x[j];
    let slope = (x[i + 1] - x[i]) - (x[j] - x[j - 1]);
    jump * jump + slope * slope
}

/// Finds the contiguous segment of at least `ceil(min_keep_fraction * N)`
/// samples whose ends match best in value and slope.
///
/// Ties in cost prefer longer segments, then earlier starts.
pub fn trim_endpoint_mismatch(x: &TimeSeries, min_keep_fraction: f64) -> Result<TimeSeries> {
    let (i, j) = endpoint_mismatch_bounds(x, min_keep_fraction)?;
    x.segment(i, j)
}

/// Inclusive bounds `(i, j)` selected by [`trim_endpoint_mismatch`].
pub fn endpoint_mismatch_bounds(x: &TimeSeries, min_keep_fraction: f64) -> Result<(usize, usize)> {
    if !(min_keep_fraction > 0.0 && min_keep_fraction <= 1.0) {
        return Err(invalid("min_keep_fraction", "must lie in (0, 1]"));
    }
    let n = x.len();
    let keep = (min_keep_fraction * n as f64 - 1e-9).ceil().max(1.0) as usize;
    if keep < 16 || (n as f64) * min_keep_fraction < 16.0 {
        return Err(Error::TooShort { len: n, min: 16 });
    }
    let v = x.as_slice();
    let mut best = (f64::INFINITY, 0usize, n - 1);
    for i in 0..=(n - keep) {
        for j in (i + keep - 1)..n {
            let c = endpoint_mismatch(v, i, j);
            let (bc, bi, bj) = best;
            let better = c < bc || (c == bc && (j - i > bj - bi || (j - i == bj - bi && i < bi)));
            if better {
                best = (c, i, j);
            }
        }
    }
    Ok((best.1, best.2))
}

/// Default minimum kept fraction for end-point trimming.
pub const DEFAULT_MIN_KEEP_FRACTION: f64 = 0.9;

/// Normalizes, then trims to the best end-point match.
pub fn preprocess(x: &TimeSeries, min_keep_fraction: f64) -> Result<TimeSeries> {
    trim_endpoint_mismatch(&normalize(x)?, min_keep_fraction)
}

/// Per-window sample means and variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMoments {
    pub window_length: usize,
    pub overlap_fraction: f64,
    pub step: usize,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

impl LocalMoments {
    pub fn window_count(&self) -> usize {
        self.means.len()
    }
}

pub(crate) fn window_step(window_length: usize, overlap_fraction: f64) -> usize {
    ((window_length as f64 * (1.0 - overlap_fraction)) + 1e-9).floor().max(1.0) as usize
}

/// Sliding-window moments anchored at index 0; a trailing partial window is dropped.
pub fn local_moments(
    x: &TimeSeries,
    window_length: usize,
    overlap_fraction: f64,
) -> Result<LocalMoments> {
    let n = x.len();
    if window_length < 2 || window_length > n {
        return Err(Error::BadWindow(format!(
            "window length {window_length} must lie in 2..={n}"
        )));
    }
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::BadWindow(format!(
            "overlap {overlap_fraction} must lie in [0, 1)"
        )));
    }
    let step = window_step(window_length, overlap_fraction);
    let count = (n - window_length) / step + 1;
    let (means, variances) = (0..count)
        .map(|w| {
            let seg = &x.as_slice()[w * step..w * step + window_length];
            (mean(seg), variance(seg).max(0.0))
        })
        .unzip();
    Ok(LocalMoments {
        window_length,
        overlap_fraction,
        step,
        means,
        variances,
    })
}

/// Adds Gaussian white noise at the requested signal-to-noise ratio.
///
/// The noise variance is `var(x) / 10^(snr_db / 10)`. `snr_db = +inf` returns
/// `x` unchanged.
pub fn add_noise_snr(x: &TimeSeries, snr_db: f64, seed: u64) -> Result<TimeSeries> {
    if snr_db.is_nan() {
        return Err(invalid("snr_db", "must not be NaN"));
    }
    let var = x.variance();
    if var <= 0.0 {
        return Err(Error::ConstantSeries);
    }
    if snr_db == f64::INFINITY {
        return Ok(x.clone());
    }
    let sd = (var / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut r = rng::rng(seed);
    let noisy = x
        .0
        .iter()
        .map(|v| {
            let g: f64 = StandardNormal.sample(&mut r);
            v + sd * g
        })
        .collect::<Vec<_>>();
    TimeSeries::new(noisy)
}
