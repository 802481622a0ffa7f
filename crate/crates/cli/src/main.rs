//! `bandphase` command-line tool.
//!
//! Exit status: 0 on success, 1 when arguments or inputs fail validation,
//! 2 when a run fails after validation.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bandphase::hypothesis::{
    self, estimate_power, rank_test, select_fc_min, PresetSource, SeriesSource, SweepConfig,
    TestConfig,
};
use bandphase::io::{self as bio, RunMetadata};
use bandphase::series::{self, TimeSeries};
use bandphase::stats::{self, Statistic};
use bandphase::surrogate::{Method, SurrogateSpec, DEFAULT_MAX_ITERATIONS};
use bandphase::{Error, FcMinConfig, FcMinMethod, Preset};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

const DEFAULT_SEED: u64 = 0;

#[derive(Parser)]
#[command(name = "bandphase", version, about = "Surrogate-data tests for nonlinearity")]
struct Cli {
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, env = "BANDPHASE_OUT_DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark series.
    Gen(GenArgs),
    /// Generate one surrogate of a series.
    Surrogate(SurrogateArgs),
    /// Evaluate statistics of a series.
    Stats(StatsArgs),
    /// Run a single surrogate rank test.
    Test(TestArgs),
    /// Sweep the cutoff and classify the series.
    Sweep(SweepArgs),
    /// Estimate type I and type II error rates by Monte Carlo.
    Power(PowerArgs),
}

#[derive(Args)]
struct Common {
    /// Master seed; 0 when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    preset: Preset,
    #[arg(long, default_value_t = bandphase::models::DEFAULT_LEN)]
    n: usize,
    /// Add white noise at this signal-to-noise ratio (dB).
    #[arg(long)]
    snr_db: Option<f64>,
    /// Normalize and trim the end-point mismatch.
    #[arg(long)]
    preprocess: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Input {
    /// Series file: plain text or single-column CSV.
    #[arg(short, long)]
    input: PathBuf,
    /// Normalize and trim the end-point mismatch before use.
    #[arg(long)]
    preprocess: bool,
}

#[derive(Args)]
struct SurrogateArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value = "aa_bpr")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    fc: usize,
    #[arg(long, default_value_t = 1.0)]
    sss_amplitude: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: Input,
    /// Statistics such as `ac:1`, `ami:2`, `ami-width:1`.
    #[arg(long = "statistic", default_values = ["ac:1", "ami:1"])]
    statistics: Vec<Statistic>,
    /// Also report local moments over windows of this length.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    overlap: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value = "aa_bpr")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    fc: usize,
    #[arg(long, default_value_t = hypothesis::DEFAULT_SURROGATES)]
    m: usize,
    #[arg(long, default_value = "ami:1")]
    statistic: Statistic,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: Input,
    /// Lowest cutoff; selected from the data when omitted.
    #[arg(long)]
    fc_min: Option<usize>,
    /// Method used to select the lowest cutoff.
    #[arg(long, default_value = "local_mean")]
    fc_min_method: FcMinMethod,
    /// Highest cutoff; N/2 - 10 when omitted.
    #[arg(long)]
    fc_max: Option<usize>,
    #[arg(long, default_value_t = 10)]
    grid: usize,
    #[arg(long, default_value_t = hypothesis::DEFAULT_SURROGATES)]
    m: usize,
    #[arg(long, default_value = "ami:1")]
    statistic: Statistic,
    #[arg(long, default_value = "aa_bpr")]
    method: Method,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERATIONS)]
    max_iterations: usize,
    /// Output format; inferred from the output extension when omitted.
    #[arg(long)]
    format: Option<Format>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PowerArgs {
    /// Preset for which the null hypothesis holds.
    #[arg(long)]
    null: Option<Preset>,
    /// Preset for which the null hypothesis is false.
    #[arg(long)]
    alternative: Option<Preset>,
    #[arg(long, default_value_t = bandphase::models::DEFAULT_LEN)]
    n: usize,
    #[arg(long)]
    snr_db: Option<f64>,
    #[arg(long, default_value = "iaaft")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    fc: usize,
    #[arg(long, default_value_t = hypothesis::DEFAULT_SURROGATES)]
    m: usize,
    #[arg(long, default_value = "ami:1")]
    statistic: Statistic,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[command(flatten)]
    common: Common,
}

enum Failure {
    Validation(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Divergence { .. } | Error::DegenerateEnsemble(_) => {
                Failure::Runtime(e.to_string())
            }
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn seed(common: &Common) -> u64 {
    common.seed.unwrap_or_else(|| {
        eprintln!("bandphase: no --seed given, using {DEFAULT_SEED}");
        DEFAULT_SEED
    })
}

fn load(input: &Input) -> std::result::Result<TimeSeries, Failure> {
    let x = bio::read_series(&input.input).map_err(|e| match e {
        Error::Io(io) => Failure::Validation(format!("cannot read {}: {io}", input.input.display())),
        other => Failure::Validation(format!("{}: {other}", input.input.display())),
    })?;
    Ok(if input.preprocess {
        series::preprocess(&x, series::DEFAULT_MIN_KEEP_FRACTION)?
    } else {
        x
    })
}

/// Where output goes: an atomically replaced file or stdout.
struct Sink {
    path: Option<PathBuf>,
}

impl Sink {
    fn new(out_dir: Option<&Path>, output: Option<&Path>) -> Self {
        let path = output.map(|p| match out_dir {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.to_path_buf(),
        });
        Sink { path }
    }

    fn extension(&self) -> Option<&str> {
        self.path.as_deref()?.extension()?.to_str()
    }

    /// Writes through a temporary file in the target directory, then renames.
    fn write(&self, body: impl FnOnce(&mut dyn Write) -> bandphase::Result<()>) -> Outcome {
        match &self.path {
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                body(&mut lock)?;
                lock.flush().map_err(Error::from)?;
                Ok(())
            }
            Some(path) => {
                let dir = match path.parent() {
                    Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
                    _ => PathBuf::from("."),
                };
                std::fs::create_dir_all(&dir).map_err(Error::from)?;
                let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(Error::from)?;
                body(tmp.as_file_mut())?;
                tmp.as_file_mut().flush().map_err(Error::from)?;
                tmp.persist(path)
                    .map_err(|e| Failure::Runtime(format!("{}: {}", path.display(), e.error)))?;
                Ok(())
            }
        }
    }

    /// JSON documents carry their metadata inline; other outputs get a
    /// `<file>.meta.json` sidecar, or the record on stderr for stdout output.
    fn sidecar(&self, meta: &RunMetadata) -> Outcome {
        match &self.path {
            None => {
                let line = serde_json::to_string(meta).map_err(Error::from)?;
                eprintln!("{line}");
                Ok(())
            }
            Some(path) => {
                let mut name = path.as_os_str().to_owned();
                name.push(".meta.json");
                Sink { path: Some(PathBuf::from(name)) }.write(|w| {
                    serde_json::to_writer_pretty(&mut *w, meta)?;
                    writeln!(w)?;
                    Ok(())
                })
            }
        }
    }
}

fn gen(a: GenArgs, out_dir: Option<&Path>) -> Outcome {
    let seed = seed(&a.common);
    if let Some(s) = a.snr_db {
        if s.is_nan() {
            return Err(Failure::Validation("--snr-db must be a number".into()));
        }
    }
    let mut x = a.preset.generate(a.n, seed)?;
    if let Some(snr) = a.snr_db {
        x = series::add_noise_snr(&x, snr, bandphase::rng::split(seed, 1))?;
    }
    if a.preprocess {
        x = series::preprocess(&x, series::DEFAULT_MIN_KEEP_FRACTION)?;
    }
    let sink = Sink::new(out_dir, a.common.output.as_deref());
    sink.write(|w| bio::write_series(w, &x))?;
    let params = json!({ "preset": a.preset, "n": a.n, "snr_db": a.snr_db, "preprocess": a.preprocess, "len": x.len() });
    sink.sidecar(&RunMetadata::new("gen", seed, params))
}

fn surrogate(a: SurrogateArgs, out_dir: Option<&Path>) -> Outcome {
    let seed = seed(&a.common);
    let x = load(&a.input)?;
    let spec = SurrogateSpec {
        method: a.method,
        fc: a.fc,
        sss_amplitude: a.sss_amplitude,
        max_iterations: a.max_iterations,
        seed,
    };
    spec.validate(x.len())?;
    let s = spec.generate(&x)?;
    let sink = Sink::new(out_dir, a.common.output.as_deref());
    sink.write(|w| bio::write_series(w, &s.series))?;
    let params = json!({
        "input": a.input.input, "preprocess": a.input.preprocess, "spec": spec,
        "refinement": s.refinement,
    });
    sink.sidecar(&RunMetadata::new("surrogate", seed, params))
}

fn stats_cmd(a: StatsArgs, out_dir: Option<&Path>) -> Outcome {
    let x = load(&a.input)?;
    let values = a
        .statistics
        .iter()
        .map(|s| Ok(stats::StatisticValue { statistic: *s, value: s.evaluate(&x)? }))
        .collect::<bandphase::Result<Vec<_>>>()?;
    let moments = a.window.map(|w| series::local_moments(&x, w, a.overlap)).transpose()?;
    let result = json!({ "len": x.len(), "mean": x.mean(), "variance": x.variance(), "statistics": values, "local_moments": moments });
    let params = json!({ "input": a.input.input, "preprocess": a.input.preprocess, "window": a.window, "overlap": a.overlap });
    let meta = RunMetadata::new("stats", a.common.seed.unwrap_or(DEFAULT_SEED), params);
    Sink::new(out_dir, a.common.output.as_deref()).write(|w| bio::write_json(w, &meta, &result))
}

fn test_cmd(a: TestArgs, out_dir: Option<&Path>) -> Outcome {
    let seed = seed(&a.common);
    let x = load(&a.input)?;
    let mut cfg = TestConfig::new(a.fc, seed)
        .with_method(a.method)
        .with_surrogates(a.m)
        .with_statistic(a.statistic);
    cfg.surrogate.max_iterations = a.max_iterations;
    let verdict = rank_test(&x, &cfg)?;
    let params = json!({ "input": a.input.input, "preprocess": a.input.preprocess, "config": cfg });
    let meta = RunMetadata::new("test", seed, params);
    Sink::new(out_dir, a.common.output.as_deref()).write(|w| bio::write_json(w, &meta, &verdict))
}

fn sweep_cmd(a: SweepArgs, out_dir: Option<&Path>) -> Outcome {
    let seed = seed(&a.common);
    let x = load(&a.input)?;
    let sink = Sink::new(out_dir, a.common.output.as_deref());
    let format = match (a.format, sink.extension()) {
        (Some(f), _) => f,
        (None, Some(ext)) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
        _ => Format::Json,
    };
    let fc_min = match a.fc_min {
        Some(f) => f,
        None => {
            let cfg = FcMinConfig { seed, ..FcMinConfig::new(a.fc_min_method) };
            let f = select_fc_min(&x, &cfg)?;
            eprintln!("bandphase: selected fc_min = {f}");
            f
        }
    };
    let mut cfg = SweepConfig::new(x.len(), fc_min, seed);
    if let Some(f) = a.fc_max {
        cfg.fc_max = f;
    }
    cfg.grid_size = a.grid;
    cfg.surrogates = a.m;
    cfg.statistic = a.statistic;
    cfg.method = a.method;
    cfg.max_iterations = a.max_iterations;
    cfg.validate(x.len())?;
    let result = hypothesis::sweep(&x, &cfg)?;
    let class = hypothesis::classify(&result);
    eprintln!("bandphase: classification {class}");
    let params = json!({ "input": a.input.input, "preprocess": a.input.preprocess, "config": cfg, "classification": class });
    let meta = RunMetadata::new("sweep", seed, params);
    match format {
        Format::Csv => {
            sink.write(|w| bio::write_sweep_csv(w, &result))?;
            sink.sidecar(&meta)
        }
        Format::Json => {
            let doc = json!({ "classification": class, "sweep": result });
            sink.write(|w| bio::write_json(w, &meta, &doc))
        }
    }
}

fn power_cmd(a: PowerArgs, out_dir: Option<&Path>) -> Outcome {
    let seed = seed(&a.common);
    if a.null.is_none() && a.alternative.is_none() {
        return Err(Failure::Validation("give --null, --alternative or both".into()));
    }
    let source = |p: Preset| PresetSource { len: a.n, snr_db: a.snr_db, ..PresetSource::new(p) };
    let null = a.null.map(source);
    let alternative = a.alternative.map(source);
    let cfg = TestConfig::new(a.fc, seed)
        .with_method(a.method)
        .with_surrogates(a.m)
        .with_statistic(a.statistic);
    let rates = estimate_power(
        null.as_ref().map(|s| s as &dyn SeriesSource),
        alternative.as_ref().map(|s| s as &dyn SeriesSource),
        &cfg,
        a.trials,
        seed,
    )?;
    let params = json!({ "null": a.null, "alternative": a.alternative, "n": a.n, "snr_db": a.snr_db, "trials": a.trials, "config": cfg });
    let meta = RunMetadata::new("power", seed, params);
    Sink::new(out_dir, a.common.output.as_deref()).write(|w| bio::write_json(w, &meta, &rates))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let out_dir = cli.out_dir.as_deref();
    let outcome = match cli.command {
        Command::Gen(a) => gen(a, out_dir),
        Command::Surrogate(a) => surrogate(a, out_dir),
        Command::Stats(a) => stats_cmd(a, out_dir),
        Command::Test(a) => test_cmd(a, out_dir),
        Command::Sweep(a) => sweep_cmd(a, out_dir),
        Command::Power(a) => power_cmd(a, out_dir),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("bandphase: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("bandphase: {m}");
            ExitCode::from(2)
        }
    }
}
