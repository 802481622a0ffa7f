//! Chooses the lower end of the cutoff range with both selection rules.
//!
//! `cargo run --release --example fc_min_selection [realizations]`

use bandphase::hypothesis::{select_fc_min, FcMinConfig, FcMinMethod};
use bandphase::models::Preset;
use bandphase::series;

fn main() -> bandphase::Result<()> {
    let realizations: u64 = std::env::args().nth(1).map_or(3, |s| s.parse().expect("count"));
    for p in Preset::ALL {
        let mut local = Vec::new();
        let mut peak = Vec::new();
        for seed in 0..realizations {
            let x = series::preprocess(&p.generate(2048, seed)?, 0.9)?;
            local.push(select_fc_min(&x, &FcMinConfig::new(FcMinMethod::LocalMean))?);
            peak.push(select_fc_min(&x, &FcMinConfig::new(FcMinMethod::SpectralPeak))?);
        }
        println!("{:<5} local mean {local:?}  spectral peak {peak:?}", p.name());
    }
    Ok(())
}
