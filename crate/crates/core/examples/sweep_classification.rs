//! Full cutoff sweep: selects the lowest cutoff, tests at ten cutoffs up to
//! N/2 - 10 and classifies the verdict pattern.
//!
//! `cargo run --release --example sweep_classification [preset] [surrogates] [seed]`

use bandphase::hypothesis::{classify, select_fc_min, sweep, FcMinConfig, FcMinMethod, SweepConfig};
use bandphase::models::Preset;
use bandphase::series;

fn main() -> bandphase::Result<()> {
    let mut args = std::env::args().skip(1);
    let preset: Preset = args.next().as_deref().unwrap_or("NLS").parse()?;
    let surrogates = args.next().map_or(39, |s| s.parse().expect("surrogates"));
    let seed = args.next().map_or(1, |s| s.parse().expect("seed"));

    let x = series::preprocess(&preset.generate(2048, seed)?, 0.9)?;
    let fc_min = select_fc_min(&x, &FcMinConfig { seed, ..FcMinConfig::new(FcMinMethod::LocalMean) })?;
    let mut cfg = SweepConfig::new(x.len(), fc_min, seed);
    cfg.surrogates = surrogates;
    let result = sweep(&x, &cfg)?;

    println!("{preset}: N = {}, fc in [{}, {}], M = {surrogates}", x.len(), cfg.fc_min, cfg.fc_max);
    println!("   fc   I(1) data   p5      p50     p95    rank  AC(1) kept  verdict");
    for p in &result.points {
        let s = &p.statistic;
        let verdict = match p.verdict() {
            Some(true) => "reject",
            Some(false) => "accept",
            None => "skipped",
        };
        println!(
            "{:>5} {:>10.4} {:>7.4} {:>7.4} {:>7.4} {:>6} {:>11} {:>8}",
            p.fc, s.data_value, s.band.p5, s.band.p50, s.band.p95, s.rank_of_data,
            p.linearity_preserved, verdict
        );
    }
    println!("classification: {}", classify(&result));
    Ok(())
}
