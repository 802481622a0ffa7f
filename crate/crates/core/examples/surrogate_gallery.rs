//! Runs every surrogate generator on one linear and one nonlinear series and
//! reports what each one preserves.
//!
//! `cargo run --release --example surrogate_gallery [fc]`

use bandphase::models::Preset;
use bandphase::series;
use bandphase::spectral::{periodogram, periodogram_error};
use bandphase::stats::{autocorrelation, nrms_local_diff, Moment, Statistic};
use bandphase::surrogate::{Method, SurrogateSpec};
use bandphase::TimeSeries;

fn sorted(x: &TimeSeries) -> Vec<f64> {
    let mut v = x.as_slice().to_vec();
    v.sort_by(f64::total_cmp);
    v
}

fn main() -> bandphase::Result<()> {
    let fc = std::env::args().nth(1).map_or(280, |s| s.parse().expect("fc"));
    for p in [Preset::Ls, Preset::Nls] {
        let x = series::preprocess(&p.generate(2048, 1)?, 0.9)?;
        let px = periodogram(&x);
        println!(
            "{p}: N = {}, AC(1) = {:.3}, I(1) = {:.3}, fc = {fc}",
            x.len(),
            autocorrelation(&x, 1)?,
            Statistic::ami(1).evaluate(&x)?
        );
        println!("  method  same values  spectrum err   AC(1)   I(1)  local mean  iterations");
        for m in Method::ALL {
            let s = SurrogateSpec::new(m, 11).with_fc(fc).generate(&x)?;
            let iterations = s
                .refinement
                .as_ref()
                .map_or("-".to_string(), |r| r.iterations.to_string());
            println!(
                "  {:<7} {:>11} {:>13.2e} {:>7.3} {:>6.3} {:>11.3} {:>11}",
                m.to_string(),
                sorted(&s.series) == sorted(&x),
                periodogram_error(&px, &periodogram(&s.series)),
                autocorrelation(&s.series, 1)?,
                Statistic::ami(1).evaluate(&s.series)?,
                nrms_local_diff(&x, &s.series, 64, 0.5, Moment::Mean)?,
                iterations
            );
        }
    }
    Ok(())
}
