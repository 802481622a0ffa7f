mod common;

use bandphase::series::{self, add_noise_snr, local_moments, normalize, TimeSeries};
use bandphase::Error;
use common::{gaussian, gaussian_with_ties};
use proptest::prelude::*;

fn finite_series(min: usize, max: usize) -> impl Strategy<Value = TimeSeries> {
    prop::collection::vec(-1e3f64..1e3, min..max)
        .prop_filter_map("needs spread", |v| {
            let x = TimeSeries::new(v).ok()?;
            (x.variance() > 1e-6).then_some(x)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent(x in finite_series(2, 300)) {
        common::check_normalize_idempotent(&x).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn normalize_affine_invariance(x in finite_series(2, 200), a in -50.0f64..50.0, b in -100.0f64..100.0) {
        prop_assume!(a.abs() > 1e-3);
        let y = TimeSeries::new(x.as_slice().iter().map(|v| a * v + b).collect()).unwrap();
        let nx = normalize(&x).unwrap();
        let ny = normalize(&y).unwrap();
        let s = a.signum();
        for (p, q) in nx.as_slice().iter().zip(ny.as_slice()) {
            prop_assert!((s * p - q).abs() < 1e-8);
        }
    }

    #[test]
    fn trim_matches_exhaustive_search(len in 18usize..=512, seed in any::<u64>(), f in 0.5f64..=1.0) {
        let x = gaussian_with_ties(len, seed);
        prop_assume!(len as f64 * f >= 16.0);
        common::check_trim_oracle(&x, f).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn full_window_moments_ignore_order(x in finite_series(2, 200), seed in any::<u64>()) {
        common::check_full_window_permutation(&x, seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn window_count_formula(len in 8usize..400, w in 2usize..64, ov in 0.0f64..0.95) {
        prop_assume!(w <= len);
        let m = local_moments(&gaussian(len, 1), w, ov).unwrap();
        let step = ((w as f64 * (1.0 - ov)) + 1e-9).floor().max(1.0) as usize;
        prop_assert_eq!(m.step, step);
        prop_assert_eq!(m.window_count(), (len - w) / step + 1);
        prop_assert!(m.variances.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn normalize_two_points() {
    let x = normalize(&TimeSeries::new(vec![1.0, 3.0]).unwrap()).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((x.as_slice()[0] + h).abs() < 1e-15);
    assert!((x.as_slice()[1] - h).abs() < 1e-15);
}

#[test]
fn normalize_rejects_constant_and_nonfinite() {
    let c = TimeSeries::new(vec![4.0; 10]).unwrap();
    assert!(matches!(normalize(&c), Err(Error::ConstantSeries)));
    assert!(matches!(
        TimeSeries::new(vec![1.0, f64::INFINITY]),
        Err(Error::NonFinite { index: 1 })
    ));
}

#[test]
fn trim_keeps_whole_periodic_series() {
    // Eight periods of 50 samples plus the closing sample, so x[0] = x[N-1].
    let n = 401;
    let x = TimeSeries::new(
        (0..n)
            .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 50.0).sin())
            .collect(),
    )
    .unwrap();
    assert_eq!(series::endpoint_mismatch_bounds(&x, 0.9).unwrap(), (0, n - 1));
    assert_eq!(series::trim_endpoint_mismatch(&x, 0.9).unwrap(), x);
}

#[test]
fn trim_ramp() {
    let x = TimeSeries::new((0..100).map(f64::from).collect()).unwrap();
    let want = common::trim_oracle(x.as_slice(), 0.9);
    assert_eq!(series::endpoint_mismatch_bounds(&x, 0.9).unwrap(), want);
    assert_eq!(want, (0, 89));
}

#[test]
fn trim_rejects_short_requests() {
    let x = gaussian(20, 0);
    assert!(matches!(
        series::trim_endpoint_mismatch(&x, 0.5),
        Err(Error::TooShort { .. })
    ));
    assert!(series::trim_endpoint_mismatch(&x, 0.0).is_err());
    assert!(series::trim_endpoint_mismatch(&x, 1.5).is_err());
}

#[test]
fn constant_series_moments() {
    let m = local_moments(&TimeSeries::new(vec![2.5; 50]).unwrap(), 10, 0.5).unwrap();
    assert!(m.means.iter().all(|&v| v == 2.5));
    assert!(m.variances.iter().all(|&v| v == 0.0));
}

#[test]
fn bad_windows() {
    let x = gaussian(30, 0);
    assert!(matches!(local_moments(&x, 1, 0.0), Err(Error::BadWindow(_))));
    assert!(matches!(local_moments(&x, 31, 0.0), Err(Error::BadWindow(_))));
    assert!(matches!(local_moments(&x, 5, 1.0), Err(Error::BadWindow(_))));
}

#[test]
fn noise_snr_over_seeds() {
    let x = gaussian(4096, 99);
    let mut total = 0.0;
    for seed in 0..100 {
        let y = add_noise_snr(&x, 5.0, seed).unwrap();
        let w = TimeSeries::new(
            y.as_slice().iter().zip(x.as_slice()).map(|(a, b)| a - b).collect(),
        )
        .unwrap();
        total += 10.0 * (x.variance() / w.variance()).log10();
    }
    let mean_db = total / 100.0;
    assert!((mean_db - 5.0).abs() < 0.5, "mean SNR {mean_db} dB");
}

#[test]
fn noise_is_seeded_and_optional() {
    let x = gaussian(256, 3);
    assert_eq!(add_noise_snr(&x, 5.0, 8).unwrap(), add_noise_snr(&x, 5.0, 8).unwrap());
    assert_ne!(add_noise_snr(&x, 5.0, 8).unwrap(), add_noise_snr(&x, 5.0, 9).unwrap());
    assert_eq!(add_noise_snr(&x, f64::INFINITY, 8).unwrap(), x);
    let c = TimeSeries::new(vec![1.0; 16]).unwrap();
    assert!(matches!(add_noise_snr(&c, 5.0, 0), Err(Error::ConstantSeries)));
}
