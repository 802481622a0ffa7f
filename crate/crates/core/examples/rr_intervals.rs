//! Reads an RR-interval file (one value per line, `#` comments allowed),
//! preprocesses it and runs the cutoff sweep.
//!
//! `cargo run --release --example rr_intervals [file]`
//!
//! Without a file a synthetic tachogram is used: a respiratory oscillation
//! whose rate drifts, plus a slow baroreflex wave and beat-to-beat noise.

use std::f64::consts::PI;

use bandphase::hypothesis::{classify, select_fc_min, sweep, FcMinConfig, FcMinMethod, SweepConfig};
use bandphase::io::{parse_series, read_series};
use bandphase::rng;
use bandphase::series;
use rand_distr::{Distribution, Normal};

fn synthetic_tachogram() -> String {
    let mut r = rng::rng(3);
    let noise = Normal::new(0.0, 0.01).unwrap();
    let mut text = String::from("# synthetic RR intervals, seconds\n");
    let mut phase = 0.0;
    for n in 0..1800 {
        let rate = 0.25 + 0.04 * (2.0 * PI * n as f64 / 900.0).sin();
        phase += 2.0 * PI * rate * 0.8;
        let rr = 0.8 + 0.03 * phase.sin()
            + 0.02 * (2.0 * PI * n as f64 / 12.0).sin()
            + noise.sample(&mut r);
        text.push_str(&format!("{rr:.4}\n"));
    }
    text
}

fn main() -> bandphase::Result<()> {
    let raw = match std::env::args().nth(1) {
        Some(path) => read_series(path)?,
        None => parse_series(&synthetic_tachogram())?,
    };
    let x = series::preprocess(&raw, series::DEFAULT_MIN_KEEP_FRACTION)?;
    println!("{} beats read, {} kept after trimming", raw.len(), x.len());
    let fc_min = select_fc_min(&x, &FcMinConfig::new(FcMinMethod::LocalMean))?;
    let mut cfg = SweepConfig::new(x.len(), fc_min, 5);
    cfg.surrogates = 39;
    let result = sweep(&x, &cfg)?;
    let pattern: String = result
        .points
        .iter()
        .map(|p| match p.verdict() {
            Some(true) => 'R',
            Some(false) => 'A',
            None => '-',
        })
        .collect();
    println!("cutoffs {:?}", result.fc_grid);
    println!("verdicts {pattern} -> {}", classify(&result));
    Ok(())
}
