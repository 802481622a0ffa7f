//! Discriminating statistics: lagged autocorrelation, average mutual
//! information and the normalized rms difference of local moments.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::series::{local_moments, mean, TimeSeries};
use crate::surrogate::argsort;

/// Biased autocorrelation estimate `r(lag)`; `r(0) = 1`.
pub fn autocorrelation(x: &TimeSeries, lag: usize) -> Result<f64> {
    let n = x.len();
    if lag >= n {
        return Err(Error::BadLag { lag, len: n });
    }
    let v = x.as_slice();
    let m = mean(v);
    let denom: f64 = v.iter().map(|a| (a - m) * (a - m)).sum();
    if denom == 0.0 {
        return Err(Error::ConstantSeries);
    }
    let num: f64 = v
        .iter()
        .zip(&v[lag..])
        .map(|(a, b)| (a - m) * (b - m))
        .sum();
    Ok(num / denom)
}

/// How sample values are assigned to histogram bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Binning {
    /// Bins hold equal counts: bin of rank `r` is `r * bins / len`, ties by index.
    /// The estimate depends only on the rank sequence.
    #[default]
    Equiprobable,
    /// Bins of equal width over `[min, max]` of each coordinate.
    EqualWidth,
}

/// Default bin count `max(4, floor(N^(1/3)))`.
pub fn default_bins(n: usize) -> usize {
    // Guard against cbrt rounding just below an integer.
    ((n as f64).cbrt() + 1e-9).floor().max(4.0) as usize
}

fn labels(v: &[f64], bins: usize, binning: Binning) -> Vec<usize> {
    let n = v.len();
    match binning {
        Binning::Equiprobable => {
            let mut out = vec![0; n];
            for (rank, idx) in argsort(v).into_iter().enumerate() {
                out[idx] = rank * bins / n;
            }
            out
        }
        Binning::EqualWidth => {
            let (lo, hi) = v
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
            let width = hi - lo;
            v.iter()
                .map(|&x| {
                    if width == 0.0 {
                        0
                    } else {
                        (((x - lo) / width * bins as f64) as usize).min(bins - 1)
                    }
                })
                .collect()
        }
    }
}

/// Plug-in mutual information (nats) between paired samples `a` and `b`.
pub fn mutual_information(a: &[f64], b: &[f64], bins: usize, binning: Binning) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if bins < 2 {
        return Err(Error::BadBins(bins));
    }
    if a.is_empty() {
        return Err(Error::TooShort { len: 0, min: 1 });
    }
    let la = labels(a, bins, binning);
    let lb = labels(b, bins, binning);
    let mut joint = vec![0usize; bins * bins];
    let mut row = vec![0usize; bins];
    let mut col = vec![0usize; bins];
    for (&i, &j) in la.iter().zip(&lb) {
        joint[i * bins + j] += 1;
        row[i] += 1;
        col[j] += 1;
    }
    let n = a.len() as f64;
    let mut mi = 0.0;
    for i in 0..bins {
        for j in 0..bins {
            let c = joint[i * bins + j];
            if c > 0 {
                let c = c as f64;
                mi += c / n * (c * n / (row[i] as f64 * col[j] as f64)).ln();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Average mutual information `I(lag)` of `(x_t, x_{t+lag})` with equiprobable bins.
pub fn ami(x: &TimeSeries, lag: usize, bins: usize) -> Result<f64> {
    ami_with(x, lag, bins, Binning::Equiprobable)
}

pub fn ami_with(x: &TimeSeries, lag: usize, bins: usize, binning: Binning) -> Result<f64> {
    let n = x.len();
    if lag == 0 || lag >= n {
        return Err(Error::BadLag { lag, len: n });
    }
    if bins < 2 {
        return Err(Error::BadBins(bins));
    }
    let v = x.as_slice();
    mutual_information(&v[..n - lag], &v[lag..], bins, binning)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    Mean,
    Variance,
}

/// Rms over windows of `m_x(w) - m_s(w)`, divided by the rms of
/// `m_x(w) - M_x` where `M_x` is the global moment of `x`.
pub fn nrms_local_diff(
    x: &TimeSeries,
    s: &TimeSeries,
    window: usize,
    overlap: f64,
    moment: Moment,
) -> Result<f64> {
    if x.len() != s.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: s.len(),
        });
    }
    let lx = local_moments(x, window, overlap)?;
    let ls = local_moments(s, window, overlap)?;
    let (mx, ms, global) = match moment {
        Moment::Mean => (lx.means, ls.means, x.mean()),
        Moment::Variance => (lx.variances, ls.variances, x.variance()),
    };
    let num: f64 = mx.iter().zip(&ms).map(|(a, b)| (a - b) * (a - b)).sum();
    let den: f64 = mx.iter().map(|a| (a - global) * (a - global)).sum();
    Ok(if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        (num / den).sqrt()
    })
}

/// A statistic evaluated by the surrogate test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Statistic {
    /// `AC(lag)`.
    Autocorrelation { lag: usize },
    /// `I(lag)`; `bins: None` means [`default_bins`].
    MutualInformation {
        lag: usize,
        bins: Option<usize>,
        binning: Binning,
    },
}

impl Statistic {
    pub fn ac(lag: usize) -> Self {
        Statistic::Autocorrelation { lag }
    }

    /// Equiprobable-bin AMI with the default bin count.
    pub fn ami(lag: usize) -> Self {
        Statistic::MutualInformation {
            lag,
            bins: None,
            binning: Binning::Equiprobable,
        }
    }

    pub fn lag(&self) -> usize {
        match *self {
            Statistic::Autocorrelation { lag } | Statistic::MutualInformation { lag, .. } => lag,
        }
    }

    /// Short label used in tables: `AC` or `AMI`.
    pub fn label(&self) -> &'static str {
        match self {
            Statistic::Autocorrelation { .. } => "AC",
            Statistic::MutualInformation { .. } => "AMI",
        }
    }

    pub fn evaluate(&self, x: &TimeSeries) -> Result<f64> {
        match *self {
            Statistic::Autocorrelation { lag } => autocorrelation(x, lag),
            Statistic::MutualInformation { lag, bins, binning } => {
                let bins = bins.unwrap_or_else(|| default_bins(x.len()));
                ami_with(x, lag, bins, binning)
            }
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    /// Parses `ac`, `ami`, `ami-width`, optionally followed by `:lag`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, lag) = match s.split_once(':') {
            Some((n, l)) => (
                n,
                l.parse::<usize>()
                    .map_err(|_| invalid("statistic", format!("bad lag in `{s}`")))?,
            ),
            None => (s, 1),
        };
        match name.to_ascii_lowercase().as_str() {
            "ac" => Ok(Statistic::ac(lag)),
            "ami" => Ok(Statistic::ami(lag)),
            "ami-width" | "ami_width" => Ok(Statistic::MutualInformation {
                lag,
                bins: None,
                binning: Binning::EqualWidth,
            }),
            _ => Err(invalid("statistic", format!("unknown statistic `{s}`"))),
        }
    }
}

/// Named statistic value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub statistic: Statistic,
    pub value: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use approx::assert_abs_diff_eq;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(n: usize, seed: u64) -> TimeSeries {
        let mut r = rng::rng(seed);
        TimeSeries::new((0..n).map(|_| StandardNormal.sample(&mut r)).collect()).unwrap()
    }

    #[test]
    fn ac_zero_lag_and_errors() {
        let x = noise(50, 1);
        assert_abs_diff_eq!(autocorrelation(&x, 0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(matches!(autocorrelation(&x, 50), Err(Error::BadLag { .. })));
        let c = TimeSeries::new(vec![2.0; 8]).unwrap();
        assert!(matches!(autocorrelation(&c, 1), Err(Error::ConstantSeries)));
    }

    #[test]
    fn ac_periodic() {
        let (n, p) = (4000usize, 20usize);
        let x = TimeSeries::new(
            (0..n)
                .map(|t| (2.0 * std::f64::consts::PI * t as f64 / p as f64).cos())
                .collect(),
        )
        .unwrap();
        let r = autocorrelation(&x, p).unwrap();
        assert!((r - 1.0).abs() <= 2.0 * p as f64 / n as f64);
    }

    #[test]
    fn identity_coupling_gives_log_bins() {
        let v: Vec<f64> = noise(1200, 2).into_inner();
        let mi = mutual_information(&v, &v, 12, Binning::Equiprobable).unwrap();
        assert_abs_diff_eq!(mi, 12f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn ami_errors() {
        let x = noise(20, 3);
        assert!(matches!(ami(&x, 0, 4), Err(Error::BadLag { .. })));
        assert!(matches!(ami(&x, 20, 4), Err(Error::BadLag { .. })));
        assert!(matches!(ami(&x, 1, 1), Err(Error::BadBins(1))));
    }

    #[test]
    fn ami_monotone_invariance() {
        let x = noise(2000, 4);
        let y = TimeSeries::new(x.as_slice().iter().map(|v| v * v * v).collect()).unwrap();
        let a = ami(&x, 1, 12).unwrap();
        let b = ami(&y, 1, 12).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn default_bin_count() {
        assert_eq!(default_bins(10), 4);
        assert_eq!(default_bins(1000), 10);
        assert_eq!(default_bins(1940), 12);
        assert_eq!(default_bins(2048), 12);
    }

    #[test]
    fn nrms_zero_for_self() {
        let x = noise(512, 5);
        for m in [Moment::Mean, Moment::Variance] {
            assert_eq!(nrms_local_diff(&x, &x, 64, 0.5, m).unwrap(), 0.0);
        }
        let short = noise(100, 5);
        assert!(matches!(
            nrms_local_diff(&x, &short, 64, 0.5, Moment::Mean),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn statistic_parse() {
        assert_eq!("ac".parse::<Statistic>().unwrap(), Statistic::ac(1));
        assert_eq!("AMI:3".parse::<Statistic>().unwrap(), Statistic::ami(3));
        assert!("dim".parse::<Statistic>().is_err());
    }
}
