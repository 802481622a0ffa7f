//! Checks shared by the property suites and the acceptance runner. Each
//! returns `Err` with a description of the first violation.

#![allow(dead_code)]

use bandphase::series::{self, local_moments, TimeSeries};
use bandphase::spectral;
use bandphase::stats::{self, Binning};
use bandphase::surrogate::{self, Method, SurrogateSpec};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Check = Result<(), String>;

pub fn gaussian(n: usize, seed: u64) -> TimeSeries {
    let mut r = bandphase::rng::rng(seed);
    TimeSeries::new((0..n).map(|_| StandardNormal.sample(&mut r)).collect()).unwrap()
}

/// Gaussian noise with a few repeated values, so ties are exercised.
pub fn gaussian_with_ties(n: usize, seed: u64) -> TimeSeries {
    let mut r = bandphase::rng::rng(seed);
    let v: Vec<f64> = (0..n)
        .map(|_| {
            let g: f64 = StandardNormal.sample(&mut r);
            if r.random_bool(0.1) {
                (g * 2.0).round() / 2.0
            } else {
                g
            }
        })
        .collect();
    TimeSeries::new(v).unwrap()
}

fn sorted(v: &[f64]) -> Vec<u64> {
    let mut s: Vec<f64> = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.into_iter().map(f64::to_bits).collect()
}

/// Exhaustive minimizer of the end-point cost, written independently of the
/// library search: enumerate all admissible pairs and pick the lexicographic
/// minimum of (cost, -length, start).
pub fn trim_oracle(x: &[f64], min_keep_fraction: f64) -> (usize, usize) {
    let n = x.len();
    let keep = (min_keep_fraction * n as f64 - 1e-9).ceil() as usize;
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if j - i + 1 >= keep {
                let a = x[i] - x[j];
                let b = (x[i + 1] - x[i]) - (x[j] - x[j - 1]);
                pairs.push((a * a + b * b, i, j));
            }
        }
    }
    pairs
        .into_iter()
        .min_by(|p, q| {
            p.0.total_cmp(&q.0)
                .then((q.2 - q.1).cmp(&(p.2 - p.1)))
                .then(p.1.cmp(&q.1))
        })
        .map(|(_, i, j)| (i, j))
        .unwrap()
}

pub fn check_trim_oracle(x: &TimeSeries, f: f64) -> Check {
    let got = series::endpoint_mismatch_bounds(x, f).map_err(|e| e.to_string())?;
    let want = trim_oracle(x.as_slice(), f);
    if got != want {
        return Err(format!("N={} f={f}: library {got:?}, oracle {want:?}", x.len()));
    }
    let t = series::trim_endpoint_mismatch(x, f).map_err(|e| e.to_string())?;
    if t.as_slice() != &x.as_slice()[want.0..=want.1] {
        return Err("trimmed segment does not match its bounds".into());
    }
    Ok(())
}

pub fn check_normalize_idempotent(x: &TimeSeries) -> Check {
    let a = series::normalize(x).map_err(|e| e.to_string())?;
    let b = series::normalize(&a).map_err(|e| e.to_string())?;
    let worst = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    if worst > 1e-12 {
        return Err(format!("normalize not idempotent: {worst:e}"));
    }
    Ok(())
}

pub fn check_full_window_permutation(x: &TimeSeries, seed: u64) -> Check {
    let p = surrogate::rs(x, seed);
    let a = local_moments(x, x.len(), 0.0).map_err(|e| e.to_string())?;
    let b = local_moments(&p, p.len(), 0.0).map_err(|e| e.to_string())?;
    let scale = x.variance().max(1.0);
    if (a.means[0] - b.means[0]).abs() > 1e-12 * scale
        || (a.variances[0] - b.variances[0]).abs() > 1e-10 * scale
    {
        return Err("global moments changed under permutation".into());
    }
    Ok(())
}

pub fn check_value_preserving(x: &TimeSeries, method: Method, fc: usize, seed: u64) -> Check {
    let s = SurrogateSpec::new(method, seed)
        .with_fc(fc)
        .generate(x)
        .map_err(|e| e.to_string())?;
    if sorted(s.series.as_slice()) != sorted(x.as_slice()) {
        return Err(format!("{method}: sorted values differ"));
    }
    Ok(())
}

pub fn check_spectrum_preserving(x: &TimeSeries, method: Method, fc: usize, seed: u64) -> Check {
    let s = SurrogateSpec::new(method, seed)
        .with_fc(fc)
        .generate(x)
        .map_err(|e| e.to_string())?;
    let px = spectral::periodogram(x);
    let ps = spectral::periodogram(&s.series);
    let peak = px.iter().cloned().fold(0.0, f64::max);
    for (k, (a, b)) in px.iter().zip(&ps).enumerate() {
        if (a - b).abs() > 1e-8 * a.max(1e-6 * peak) {
            return Err(format!("{method} fc={fc}: bin {k} power {a} vs {b}"));
        }
    }
    Ok(())
}

fn wrap(d: f64) -> f64 {
    let t = d.rem_euclid(2.0 * std::f64::consts::PI);
    t.min(2.0 * std::f64::consts::PI - t)
}

pub fn check_low_band_phases(x: &TimeSeries, fc: usize, seed: u64) -> Check {
    let s = surrogate::bpr(x, fc, seed).map_err(|e| e.to_string())?;
    let a = spectral::forward(x).map_err(|e| e.to_string())?;
    let b = spectral::forward(&s).map_err(|e| e.to_string())?;
    let peak = a.magnitudes().iter().cloned().fold(0.0, f64::max);
    for k in 0..=fc.min(x.len() / 2) {
        // Phase is meaningless for a bin with no power.
        if a.magnitudes()[k] < 1e-6 * peak {
            continue;
        }
        let d = wrap(a.phases()[k] - b.phases()[k]);
        if d > 1e-9 {
            return Err(format!("fc={fc}: phase of bin {k} moved by {d:e}"));
        }
    }
    Ok(())
}

pub fn check_ac_affine(x: &TimeSeries, scale: f64, shift: f64, lag: usize) -> Check {
    let y = TimeSeries::new(x.as_slice().iter().map(|v| scale * v + shift).collect()).unwrap();
    let a = stats::autocorrelation(x, lag).map_err(|e| e.to_string())?;
    let b = stats::autocorrelation(&y, lag).map_err(|e| e.to_string())?;
    if (a - b).abs() > 1e-12 {
        return Err(format!("AC({lag}) changed by {:e} under affine map", (a - b).abs()));
    }
    Ok(())
}

/// Time reversal transposes the joint histogram. With tied values the
/// index tie-break flips, so callers pass tie-free series.
pub fn check_ami_reversal(x: &TimeSeries, lag: usize, bins: usize) -> Check {
    for binning in [Binning::Equiprobable, Binning::EqualWidth] {
        let a = stats::ami_with(x, lag, bins, binning).map_err(|e| e.to_string())?;
        let b = stats::ami_with(&x.reversed(), lag, bins, binning).map_err(|e| e.to_string())?;
        if a < 0.0 || (a - b).abs() > 1e-12 {
            return Err(format!("{binning:?}: I({lag}) = {a}, reversed {b}"));
        }
    }
    Ok(())
}

/// Strictly increasing maps used for the invariance checks.
pub fn monotone_maps() -> Vec<(&'static str, fn(f64) -> f64)> {
    vec![
        ("cube", |v| v * v * v),
        ("exp", f64::exp),
        ("affine", |v| 3.0 * v - 7.0),
        ("atan", f64::atan),
    ]
}

pub fn check_ami_monotone(x: &TimeSeries, lag: usize, bins: usize) -> Check {
    let base = stats::ami(x, lag, bins).map_err(|e| e.to_string())?;
    for (name, f) in monotone_maps() {
        let y = TimeSeries::new(x.as_slice().iter().map(|&v| f(v)).collect())
            .map_err(|e| e.to_string())?;
        let v = stats::ami(&y, lag, bins).map_err(|e| e.to_string())?;
        if v.to_bits() != base.to_bits() {
            return Err(format!("{name}: I({lag}) {base} became {v}"));
        }
    }
    Ok(())
}

pub fn check_rank_monotone(data: f64, surrogates: &[f64]) -> Check {
    use bandphase::hypothesis::rank_outcome;
    let base = rank_outcome(data, surrogates);
    for (name, f) in monotone_maps() {
        let t: Vec<f64> = surrogates.iter().map(|&v| f(v)).collect();
        let o = rank_outcome(f(data), &t);
        // Skip maps that collapse distinct values in floating point.
        let distinct = |v: &[f64]| {
            let mut s = v.to_vec();
            s.sort_by(f64::total_cmp);
            s.dedup();
            s.len()
        };
        let mut all = surrogates.to_vec();
        all.push(data);
        let mut mapped = t.clone();
        mapped.push(f(data));
        if distinct(&all) != distinct(&mapped) || mapped.iter().any(|v| !v.is_finite()) {
            continue;
        }
        if o != base {
            return Err(format!("{name}: {base:?} became {o:?}"));
        }
    }
    Ok(())
}
