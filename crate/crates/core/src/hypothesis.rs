//! Rank-based surrogate tests, cutoff selection, the cutoff sweep and its
//! classification, and Monte Carlo error-rate estimation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::series::TimeSeries;
use crate::spectral;
use crate::stats::{autocorrelation, nrms_local_diff, Moment, Statistic};
use crate::surrogate::{Method, Surrogate, SurrogateSpec};

/// Smallest ensemble accepted by [`rank_test`] (alpha = 0.05 one-sided).
pub const MIN_SURROGATES: usize = 19;

/// Ensemble size giving alpha = 0.01.
pub const DEFAULT_SURROGATES: usize = 99;

/// Slack added on both sides of the surrogate `AC(1)` 5th-95th percentile
/// band when deciding whether linear correlations are preserved.
pub const DEFAULT_LINEARITY_TOLERANCE: f64 = 0.005;

/// Percentile with linear interpolation between order statistics.
pub fn percentile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(|a, b| a.total_cmp(b));
    percentile_sorted(&v, p)
}

fn percentile_sorted(v: &[f64], p: f64) -> f64 {
    if v.len() == 1 {
        return v[0];
    }
    let h = (v.len() - 1) as f64 * p / 100.0;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// 5th, 50th and 95th percentiles of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub p5: f64,
    pub p50: f64,
    pub p95: f64,
}

impl Band {
    pub fn of(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_unstable_by(|a, b| a.total_cmp(b));
        Self {
            p5: percentile_sorted(&v, 5.0),
            p50: percentile_sorted(&v, 50.0),
            p95: percentile_sorted(&v, 95.0),
        }
    }

    pub fn contains(&self, value: f64, slack: f64) -> bool {
        value >= self.p5 - slack && value <= self.p95 + slack
    }
}

/// One-sided (greater) rank comparison of a data value against an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOutcome {
    /// `1 + #{surrogates strictly below the data}`, in `1..=M+1`.
    pub rank: usize,
    pub reject: bool,
}

pub fn rank_outcome(data: f64, surrogates: &[f64]) -> RankOutcome {
    let below = surrogates.iter().filter(|&&s| s < data).count();
    RankOutcome {
        rank: below + 1,
        reject: below == surrogates.len(),
    }
}

/// Outcome of a single surrogate test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub statistic: Statistic,
    pub data_value: f64,
    pub surrogate_values: Vec<f64>,
    pub rank_of_data: usize,
    pub alpha: f64,
    pub reject: bool,
    /// `AC(1)` of the data lies inside the surrogate 5th-95th percentile band
    /// (widened by the linearity tolerance).
    pub linearity_preserved: bool,
    pub data_ac1: f64,
    pub surrogate_ac1: Band,
}

impl TestVerdict {
    pub fn surrogates(&self) -> usize {
        self.surrogate_values.len()
    }

    pub fn band(&self) -> Band {
        Band::of(&self.surrogate_values)
    }
}

/// Settings for [`rank_test`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub surrogate: SurrogateSpec,
    pub surrogates: usize,
    pub statistic: Statistic,
    pub linearity_tolerance: f64,
}

impl TestConfig {
    /// AA-BPR at cutoff `fc`, 99 surrogates, `I(1)`.
    pub fn new(fc: usize, seed: u64) -> Self {
        Self {
            surrogate: SurrogateSpec::aa_bpr(fc, seed),
            surrogates: DEFAULT_SURROGATES,
            statistic: Statistic::ami(1),
            linearity_tolerance: DEFAULT_LINEARITY_TOLERANCE,
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.surrogate.method = method;
        self
    }

    pub fn with_surrogates(mut self, m: usize) -> Self {
        self.surrogates = m;
        self
    }

    pub fn with_statistic(mut self, s: Statistic) -> Self {
        self.statistic = s;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.surrogate.seed = seed;
        self
    }

    pub fn alpha(&self) -> f64 {
        1.0 / (self.surrogates + 1) as f64
    }
}

fn check_ensemble(m: usize) -> Result<()> {
    if m < MIN_SURROGATES {
        return Err(invalid(
            "surrogates",
            format!("need at least {MIN_SURROGATES}, got {m}"),
        ));
    }
    Ok(())
}

fn build_ensemble(x: &TimeSeries, spec: &SurrogateSpec, m: usize) -> Result<Vec<Surrogate>> {
    spec.ensemble(x, m)
        .map_err(|e| Error::DegenerateEnsemble(e.to_string()))
}

fn evaluate_all(stat: &Statistic, ensemble: &[Surrogate]) -> Result<Vec<f64>> {
    ensemble
        .par_iter()
        .map(|s| stat.evaluate(&s.series))
        .collect()
}

fn verdict_from(
    x: &TimeSeries,
    statistic: Statistic,
    ensemble: &[Surrogate],
    surrogate_ac1: &[f64],
    tolerance: f64,
) -> Result<TestVerdict> {
    let data_value = statistic.evaluate(x)?;
    let surrogate_values = evaluate_all(&statistic, ensemble)?;
    let outcome = rank_outcome(data_value, &surrogate_values);
    let data_ac1 = autocorrelation(x, 1)?;
    let ac_band = Band::of(surrogate_ac1);
    Ok(TestVerdict {
        statistic,
        data_value,
        rank_of_data: outcome.rank,
        alpha: 1.0 / (surrogate_values.len() + 1) as f64,
        reject: outcome.reject,
        linearity_preserved: ac_band.contains(data_ac1, tolerance),
        data_ac1,
        surrogate_ac1: ac_band,
        surrogate_values,
    })
}

/// Generates `config.surrogates` surrogates and rejects when the data
/// statistic exceeds every surrogate value.
pub fn rank_test(x: &TimeSeries, config: &TestConfig) -> Result<TestVerdict> {
    check_ensemble(config.surrogates)?;
    config.surrogate.validate(x.len())?;
    let ensemble = build_ensemble(x, &config.surrogate, config.surrogates)?;
    let ac1 = evaluate_all(&Statistic::ac(1), &ensemble)?;
    verdict_from(x, config.statistic, &ensemble, &ac1, config.linearity_tolerance)
}

/// How to choose the lower end of the cutoff range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FcMinMethod {
    /// First bin above the magnitude peak where the smoothed magnitude has
    /// decayed below a fraction of the peak.
    SpectralPeak,
    /// Lowest grid cutoff at which BPR surrogates reproduce the local mean.
    LocalMean,
}

impl std::str::FromStr for FcMinMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "spectral_peak" | "peak" => Ok(FcMinMethod::SpectralPeak),
            "local_mean" | "mean" => Ok(FcMinMethod::LocalMean),
            _ => Err(invalid("fc_min_method", format!("unknown method `{s}`"))),
        }
    }
}

/// Calibration constants for [`select_fc_min`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcMinConfig {
    pub method: FcMinMethod,
    /// Moving-average width applied to the magnitude spectrum.
    pub smoothing_width: usize,
    /// Decay fraction of the peak that ends the peak region.
    pub peak_decay: f64,
    /// The peak must exceed this multiple of the median smoothed magnitude.
    pub peak_prominence: f64,
    /// Spacing of the local-mean cutoff grid; the grid is `step, 2 step, ..`.
    pub grid_step: usize,
    /// Median nrms of local means that counts as preserved.
    pub nrms_threshold: f64,
    pub surrogates: usize,
    pub window: usize,
    pub overlap: f64,
    pub seed: u64,
}

impl FcMinConfig {
    pub fn new(method: FcMinMethod) -> Self {
        Self {
            method,
            smoothing_width: 5,
            peak_decay: 0.1,
            peak_prominence: 5.0,
            grid_step: 50,
            nrms_threshold: 0.1,
            surrogates: 9,
            window: 64,
            overlap: 0.5,
            seed: 0,
        }
    }
}

/// Centered moving average, truncated at the ends.
pub fn smooth(values: &[f64], width: usize) -> Vec<f64> {
    let half = width / 2;
    (0..values.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(values.len() - 1);
            values[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// Cutoff from the magnitude peak; errors with [`Error::NoPeak`] when the
/// spectrum has no pronounced peak or it never decays.
pub fn fc_min_spectral_peak(x: &TimeSeries, config: &FcMinConfig) -> Result<usize> {
    let spec = spectral::forward(x)?;
    let mags = &spec.magnitudes()[1..];
    let smoothed = smooth(mags, config.smoothing_width.max(1));
    let (peak_idx, peak) = smoothed
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |b, (i, v)| if v > b.1 { (i, v) } else { b });
    let median = percentile(&smoothed, 50.0);
    if !(peak > config.peak_prominence * median) {
        return Err(Error::NoPeak);
    }
    smoothed
        .iter()
        .enumerate()
        .skip(peak_idx + 1)
        .find(|(_, &v)| v < config.peak_decay * peak)
        .map(|(i, _)| i + 1)
        .ok_or(Error::NoPeak)
}

/// Median nrms difference of local means between `x` and BPR surrogates at `fc`.
pub fn local_mean_mismatch(x: &TimeSeries, fc: usize, config: &FcMinConfig) -> Result<f64> {
    let spec = SurrogateSpec::new(Method::Bpr, rng::split(config.seed, fc as u64)).with_fc(fc);
    let values = spec
        .ensemble(x, config.surrogates)?
        .iter()
        .map(|s| nrms_local_diff(x, &s.series, config.window, config.overlap, Moment::Mean))
        .collect::<Result<Vec<_>>>()?;
    Ok(percentile(&values, 50.0))
}

/// Cutoff from the local-mean criterion. Returns the top of the grid when no
/// grid point passes.
pub fn fc_min_local_mean(x: &TimeSeries, config: &FcMinConfig) -> Result<usize> {
    let max = x.len() / 2;
    if config.grid_step == 0 {
        return Err(invalid("grid_step", "must be positive"));
    }
    let grid: Vec<usize> = (1..).map(|k| k * config.grid_step).take_while(|&f| f <= max).collect();
    for &fc in &grid {
        if local_mean_mismatch(x, fc, config)? < config.nrms_threshold {
            return Ok(fc);
        }
    }
    Ok(grid.last().copied().unwrap_or(max))
}

/// Lower end of the cutoff range. The spectral-peak method falls back to the
/// local-mean method when there is no pronounced peak.
pub fn select_fc_min(x: &TimeSeries, config: &FcMinConfig) -> Result<usize> {
    if x.len() < 128 {
        return Err(Error::TooShort {
            len: x.len(),
            min: 128,
        });
    }
    match config.method {
        FcMinMethod::LocalMean => fc_min_local_mean(x, config),
        FcMinMethod::SpectralPeak => match fc_min_spectral_peak(x, config) {
            Err(Error::NoPeak) => fc_min_local_mean(x, config),
            other => other,
        },
    }
}

/// Settings for [`sweep`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub fc_min: usize,
    pub fc_max: usize,
    pub grid_size: usize,
    pub surrogates: usize,
    /// The discriminating statistic; `AC(1)` is always recorded alongside.
    pub statistic: Statistic,
    pub method: Method,
    pub max_iterations: usize,
    pub linearity_tolerance: f64,
    pub seed: u64,
}

impl SweepConfig {
    /// Ten AA-BPR cutoffs in `[fc_min, N/2 - 10]`, 99 surrogates, `I(1)`.
    pub fn new(len: usize, fc_min: usize, seed: u64) -> Self {
        Self {
            fc_min,
            fc_max: default_fc_max(len),
            grid_size: 10,
            surrogates: DEFAULT_SURROGATES,
            statistic: Statistic::ami(1),
            method: Method::AaBpr,
            max_iterations: crate::surrogate::DEFAULT_MAX_ITERATIONS,
            linearity_tolerance: DEFAULT_LINEARITY_TOLERANCE,
            seed,
        }
    }

    pub fn validate(&self, len: usize) -> Result<()> {
        if self.fc_min >= self.fc_max || self.fc_max > len / 2 {
            return Err(invalid(
                "fc range",
                format!(
                    "need 0 <= fc_min < fc_max <= {}, got [{}, {}]",
                    len / 2,
                    self.fc_min,
                    self.fc_max
                ),
            ));
        }
        if self.grid_size < 2 {
            return Err(invalid("grid_size", "must be at least 2"));
        }
        if !self.method.uses_cutoff() {
            return Err(invalid("method", "sweep needs bpr or aa_bpr"));
        }
        check_ensemble(self.surrogates)
    }

    /// Evenly spaced integer cutoffs from `fc_min` to `fc_max` inclusive.
    pub fn grid(&self) -> Vec<usize> {
        let span = (self.fc_max - self.fc_min) as f64;
        let mut g: Vec<usize> = (0..self.grid_size)
            .map(|k| {
                (self.fc_min as f64 + span * k as f64 / (self.grid_size - 1) as f64).round() as usize
            })
            .collect();
        g.dedup();
        g
    }
}

/// `N/2 - 10`, or `N/2` for very short series.
pub fn default_fc_max(len: usize) -> usize {
    let half = len / 2;
    if half > 20 {
        half - 10
    } else {
        half
    }
}

/// Summary of one statistic at one cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatSummary {
    pub data_value: f64,
    pub band: Band,
    pub rank_of_data: usize,
    pub reject: bool,
}

impl StatSummary {
    fn from_values(data: f64, values: &[f64]) -> Self {
        let o = rank_outcome(data, values);
        Self {
            data_value: data,
            band: Band::of(values),
            rank_of_data: o.rank,
            reject: o.reject,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub fc: usize,
    pub ac1: StatSummary,
    pub statistic: StatSummary,
    pub linearity_preserved: bool,
    /// Surrogates that reproduced the data exactly.
    pub identical_surrogates: usize,
}

impl SweepPoint {
    /// Verdict used for classification; `None` when linear correlations are
    /// not preserved and the point is skipped.
    pub fn verdict(&self) -> Option<bool> {
        self.linearity_preserved.then_some(self.statistic.reject)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub len: usize,
    pub fc_min: usize,
    pub fc_max: usize,
    pub fc_grid: Vec<usize>,
    pub statistic: Statistic,
    pub method: Method,
    pub surrogates: usize,
    pub alpha: f64,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Verdicts (`true` = reject) at linearity-preserving points, in cutoff order.
    pub fn valid_verdicts(&self) -> Vec<bool> {
        self.points.iter().filter_map(SweepPoint::verdict).collect()
    }

    /// First linearity-preserving cutoff from which every later valid point accepts,
    /// given an earlier rejection.
    pub fn accept_onset(&self) -> Option<usize> {
        let valid: Vec<(usize, bool)> = self
            .points
            .iter()
            .filter_map(|p| p.verdict().map(|v| (p.fc, v)))
            .collect();
        let k = valid.iter().position(|&(_, r)| !r)?;
        if k == 0 || valid[k..].iter().any(|&(_, r)| r) {
            return None;
        }
        Some(valid[k].0)
    }
}

/// Runs the cutoff sweep: at each grid cutoff an ensemble is drawn with seed
/// `split(seed, grid_index)`, and `AC(1)` and the configured statistic are
/// ranked against it.
pub fn sweep(x: &TimeSeries, config: &SweepConfig) -> Result<SweepResult> {
    config.validate(x.len())?;
    let grid = config.grid();
    let data_ac1 = autocorrelation(x, 1)?;
    let data_stat = config.statistic.evaluate(x)?;
    let points = grid
        .iter()
        .enumerate()
        .map(|(gi, &fc)| {
            let spec = SurrogateSpec {
                method: config.method,
                fc,
                sss_amplitude: 1.0,
                max_iterations: config.max_iterations,
                seed: rng::split(config.seed, gi as u64),
            };
            let ensemble = build_ensemble(x, &spec, config.surrogates)?;
            let ac = evaluate_all(&Statistic::ac(1), &ensemble)?;
            let st = evaluate_all(&config.statistic, &ensemble)?;
            let ac1 = StatSummary::from_values(data_ac1, &ac);
            Ok(SweepPoint {
                fc,
                linearity_preserved: ac1.band.contains(data_ac1, config.linearity_tolerance),
                ac1,
                statistic: StatSummary::from_values(data_stat, &st),
                identical_surrogates: ensemble.iter().filter(|s| s.series == *x).count(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        len: x.len(),
        fc_min: config.fc_min,
        fc_max: config.fc_max,
        fc_grid: grid,
        statistic: config.statistic,
        method: config.method,
        surrogates: config.surrogates,
        alpha: 1.0 / (config.surrogates + 1) as f64,
        seed: config.seed,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    LinearStationary,
    LinearNonStationary,
    Nonlinear,
    Inconclusive,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Classification::LinearStationary => "linear-stationary",
            Classification::LinearNonStationary => "linear-non-stationary",
            Classification::Nonlinear => "nonlinear",
            Classification::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Classifies a verdict sequence (`true` = reject) ordered by increasing cutoff.
pub fn classify_verdicts(verdicts: &[bool]) -> Classification {
    if verdicts.len() < 2 {
        return Classification::Inconclusive;
    }
    if verdicts.iter().all(|&r| !r) {
        return Classification::LinearStationary;
    }
    if verdicts.iter().all(|&r| r) {
        return Classification::Nonlinear;
    }
    let switch = verdicts.iter().position(|&r| !r).unwrap();
    if switch > 0 && verdicts[switch..].iter().all(|&r| !r) {
        Classification::LinearNonStationary
    } else {
        Classification::Inconclusive
    }
}

/// Classifies a sweep from its linearity-preserving points.
pub fn classify(sweep: &SweepResult) -> Classification {
    classify_verdicts(&sweep.valid_verdicts())
}

/// A reproducible source of test series.
pub trait SeriesSource: Sync {
    fn draw(&self, seed: u64) -> Result<TimeSeries>;
}

impl<F> SeriesSource for F
where
    F: Fn(u64) -> Result<TimeSeries> + Sync,
{
    fn draw(&self, seed: u64) -> Result<TimeSeries> {
        self(seed)
    }
}

/// A preset realization run through the standard preprocessing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresetSource {
    pub preset: crate::models::Preset,
    pub len: usize,
    /// Additive white noise level, if any.
    pub snr_db: Option<f64>,
    /// Minimum kept fraction for end-point trimming; `None` skips
    /// normalization and trimming.
    pub trim_keep_fraction: Option<f64>,
}

impl PresetSource {
    pub fn new(preset: crate::models::Preset) -> Self {
        Self {
            preset,
            len: crate::models::DEFAULT_LEN,
            snr_db: None,
            trim_keep_fraction: Some(crate::series::DEFAULT_MIN_KEEP_FRACTION),
        }
    }
}

impl SeriesSource for PresetSource {
    fn draw(&self, seed: u64) -> Result<TimeSeries> {
        let mut x = self.preset.generate(self.len, rng::split(seed, 0))?;
        if let Some(snr) = self.snr_db {
            x = crate::series::add_noise_snr(&x, snr, rng::split(seed, 1))?;
        }
        match self.trim_keep_fraction {
            Some(f) => crate::series::preprocess(&x, f),
            None => Ok(x),
        }
    }
}

/// Empirical error rates of a test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    /// Rejection rate under a true null (Type I).
    pub alpha_hat: Option<f64>,
    /// Non-rejection rate under a false null (Type II).
    pub beta_hat: Option<f64>,
    pub trials: usize,
    pub null_rejections: usize,
    pub alternative_rejections: usize,
}

fn rejection_count(
    source: &dyn SeriesSource,
    test: &TestConfig,
    trials: usize,
    seed: u64,
) -> Result<usize> {
    let mut count = 0;
    for k in 0..trials as u64 {
        let x = source.draw(rng::split(rng::split(seed, 0), k))?;
        let mut cfg = test.clone();
        cfg.surrogate.seed = rng::split(rng::split(seed, 1), k);
        if cfg.surrogate.method.uses_cutoff() {
            cfg.surrogate.fc = cfg.surrogate.fc.min(x.len() / 2);
        }
        if rank_test(&x, &cfg)?.reject {
            count += 1;
        }
    }
    Ok(count)
}

/// Repeats generate-then-test over independent realizations.
///
/// `null` draws series for which the null hypothesis holds, `alternative`
/// series for which it does not; either may be omitted. Each side uses
/// seed streams derived from `seed`.
pub fn estimate_power(
    null: Option<&dyn SeriesSource>,
    alternative: Option<&dyn SeriesSource>,
    test: &TestConfig,
    trials: usize,
    seed: u64,
) -> Result<ErrorRates> {
    if trials < 20 {
        return Err(invalid("trials", format!("need at least 20, got {trials}")));
    }
    if null.is_none() && alternative.is_none() {
        return Err(invalid("sources", "need a null or an alternative source"));
    }
    let null_rejections = match null {
        Some(src) => rejection_count(src, test, trials, rng::split(seed, 0))?,
        None => 0,
    };
    let alternative_rejections = match alternative {
        Some(src) => rejection_count(src, test, trials, rng::split(seed, 1))?,
        None => 0,
    };
    let t = trials as f64;
    Ok(ErrorRates {
        alpha_hat: null.map(|_| null_rejections as f64 / t),
        beta_hat: alternative.map(|_| 1.0 - alternative_rejections as f64 / t),
        trials,
        null_rejections,
        alternative_rejections,
    })
}
