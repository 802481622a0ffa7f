//! Generates the four benchmark series, preprocesses them and prints a few
//! summary statistics.
//!
//! `cargo run --release --example presets [seed]`

use bandphase::models::{Preset, DEFAULT_LEN};
use bandphase::series::{self, DEFAULT_MIN_KEEP_FRACTION};
use bandphase::stats::{autocorrelation, Statistic};
use bandphase::spectral;

fn main() -> bandphase::Result<()> {
    let seed = std::env::args().nth(1).map_or(0, |s| s.parse().expect("seed"));
    println!("preset  kept   AC(1)   I(1)   peak bin");
    for p in Preset::ALL {
        let raw = p.generate(DEFAULT_LEN, seed)?;
        let x = series::preprocess(&raw, DEFAULT_MIN_KEEP_FRACTION)?;
        let power = spectral::periodogram(&x);
        let peak = (1..power.len())
            .max_by(|&a, &b| power[a].total_cmp(&power[b]))
            .unwrap();
        println!(
            "{:<6} {:>5} {:>7.3} {:>6.3} {:>10}",
            p.name(),
            x.len(),
            autocorrelation(&x, 1)?,
            Statistic::ami(1).evaluate(&x)?,
            peak
        );
    }
    Ok(())
}
