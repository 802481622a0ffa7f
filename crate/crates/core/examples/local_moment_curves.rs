//! Prints, as CSV, the local mean and variance mismatch between a series and
//! its BPR surrogates as the cutoff grows. Each value is the median over nine
//! surrogates.
//!
//! `cargo run --release --example local_moment_curves [preset] > curves.csv`

use bandphase::models::Preset;
use bandphase::rng::split;
use bandphase::series;
use bandphase::stats::{nrms_local_diff, Moment};
use bandphase::surrogate::bpr;

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn main() -> bandphase::Result<()> {
    let preset: Preset = std::env::args().nth(1).as_deref().unwrap_or("LS").parse()?;
    let x = series::preprocess(&preset.generate(2048, 0)?, 0.9)?;
    println!("fc,mean,variance");
    for fc in (0..=x.len() / 2).step_by(20) {
        let mut means = Vec::new();
        let mut vars = Vec::new();
        for k in 0..9 {
            let s = bpr(&x, fc, split(fc as u64, k))?;
            means.push(nrms_local_diff(&x, &s, 64, 0.5, Moment::Mean)?);
            vars.push(nrms_local_diff(&x, &s, 64, 0.5, Moment::Variance)?);
        }
        println!("{fc},{:.4},{:.4}", median(means), median(vars));
    }
    Ok(())
}
