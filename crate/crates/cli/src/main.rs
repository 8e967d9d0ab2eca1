use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use congruence_core::{
    arc_length_resample, congruence_upper, dtw_distance, generate_walk, load_dataset,
    save_dataset, Approximation, Dataset64, Format, OptimizerConfig, TimeSeries64, WalkParams,
};

use congruence_cli::bench::{
    self, dataset_pairs, generate_pairs, run_sanity, run_speedup, run_tightness, sanity_recovery,
    write_report, write_sanity, GeneratorSpec, ReportKind, SanitySpec, Summary,
};

#[derive(Parser)]
#[command(name = "congruence", version)]
#[command(about = "Congruence distance and self-similarity lower bounds for multi-dimensional time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between the first series of two files
    Dist(DistArgs),
    /// Generate smoothed random-walk series
    Gen(GenArgs),
    /// Resample every series to equal arc-length steps
    Dewarp(DewarpArgs),
    /// Optimizer runs on congruent pairs, whose true distance is zero
    Sanity(SanityArgs),
    /// Approximation / optimizer ratios per pair
    BenchTightness(BenchArgs),
    /// Optimizer / approximation time ratios per pair
    BenchSpeedup(SpeedupArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    CsvSingle,
    JsonlCollection,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::CsvSingle => Format::CsvSingle,
            FormatArg::JsonlCollection => Format::JsonlCollection,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Measure {
    Dtw,
    Delta,
    FastDelta,
    Greedy,
    FastGreedy,
    /// Optimizer upper bound on the congruence distance
    Congruence,
    /// dtw, delta, fast-delta, greedy and fast-greedy
    All,
}

#[derive(Args, Debug, Clone)]
struct OptimizerArgs {
    /// Starting rotations per optimizer call
    #[arg(long, default_value_t = 8)]
    multistart: usize,
    /// Simplex iterations per start
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
}

impl OptimizerArgs {
    fn config(&self, seed: u64) -> Result<OptimizerConfig> {
        let cfg = OptimizerConfig {
            max_iterations: self.max_iter,
            multistart_count: self.multistart,
            seed,
            ..Default::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct DistArgs {
    left: PathBuf,
    right: PathBuf,
    #[arg(short, long, value_enum, default_value = "delta")]
    measure: Measure,
    /// Input format; guessed from the extension when omitted
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Arc-length resample both series first (to --n points, default the longer length)
    #[arg(long)]
    dewarp: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    opt: OptimizerArgs,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Number of series
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 1.0)]
    step_scale: f64,
    #[arg(long, default_value_t = 3)]
    smoothing: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct DewarpArgs {
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Points per output series; defaults to each input's length
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct SanityArgs {
    /// Dimensions to test
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
    k: Vec<usize>,
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Trials per dimension
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    opt: OptimizerArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Dataset whose consecutive entries form the pairs; generated walks otherwise
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [16usize, 32, 64])]
    n: Vec<usize>,
    /// Pairs per (k, n) cell, or the maximum number of dataset pairs
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Arc-length resample before comparing (dataset series to the first --n value)
    #[arg(long)]
    dewarp: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    opt: OptimizerArgs,
}

#[derive(Args)]
struct SpeedupArgs {
    #[command(flatten)]
    bench: BenchArgs,
    /// Repetitions per timing; the fastest is kept
    #[arg(long, default_value_t = 3)]
    reps: usize,
}

fn resolve_format(explicit: Option<FormatArg>, path: &Path) -> Result<Format> {
    match explicit {
        Some(f) => Ok(f.into()),
        None => Format::from_path(path).ok_or_else(|| {
            anyhow!("cannot tell the format of {}; pass --format", path.display())
        }),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn first_series(path: &Path, format: Option<FormatArg>) -> Result<TimeSeries64> {
    let ds: Dataset64 = load_dataset(path, resolve_format(format, path)?)?;
    ds.into_entries()
        .into_iter()
        .next()
        .map(|e| e.series)
        .ok_or_else(|| anyhow!("{} holds no series", path.display()))
}

fn cmd_dist(args: DistArgs) -> Result<ExitCode> {
    let mut s = first_series(&args.left, args.format)?;
    let mut t = first_series(&args.right, args.format)?;
    if args.dewarp {
        let m = args.n.unwrap_or(s.len().max(t.len()));
        s = arc_length_resample(&s, m)?;
        t = arc_length_resample(&t, m)?;
    }
    let mut out = io::stdout().lock();
    match args.measure {
        Measure::All => {
            writeln!(out, "dtw {:.9}", dtw_distance(&s, &t)?)?;
            for a in Approximation::ALL {
                writeln!(out, "{} {:.9}", a.name(), a.evaluate(&s, &t)?)?;
            }
        }
        Measure::Dtw => writeln!(out, "{:.9}", dtw_distance(&s, &t)?)?,
        Measure::Congruence => {
            let r = congruence_upper(&s, &t, &args.opt.config(args.seed)?)?;
            writeln!(out, "{:.9}", r.value)?;
        }
        m => {
            let a = match m {
                Measure::Delta => Approximation::Delta,
                Measure::FastDelta => Approximation::FastDelta,
                Measure::Greedy => Approximation::Greedy,
                _ => Approximation::FastGreedy,
            };
            writeln!(out, "{:.9}", a.evaluate(&s, &t)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode> {
    let format = resolve_format(args.format, &args.output)?;
    let mut ds = Dataset64::new();
    for i in 0..args.count {
        let series = generate_walk(&WalkParams {
            dim: args.k,
            len: args.n,
            step_scale: args.step_scale,
            smoothing_window: args.smoothing,
            seed: args.seed.wrapping_add(i as u64),
        })?;
        let id = match format {
            Format::CsvSingle => args.output.file_stem().map_or("walk".into(), |s| s.to_string_lossy().into_owned()),
            Format::JsonlCollection => format!("walk-{i}"),
        };
        ds.push_series(id, None, series)?;
    }
    save_dataset(&ds, &args.output, format)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_dewarp(args: DewarpArgs) -> Result<ExitCode> {
    let in_format = resolve_format(args.format, &args.input)?;
    let out_format = Format::from_path(&args.output).unwrap_or(in_format);
    let ds: Dataset64 = load_dataset(&args.input, in_format)?;
    let mut out = Dataset64::new();
    for e in ds.into_entries() {
        let m = args.n.unwrap_or(e.series.len());
        let series = arc_length_resample(&e.series, m).with_context(|| format!("series `{}`", e.id))?;
        out.push_series(e.id, e.label, series)?;
    }
    save_dataset(&out, &args.output, out_format)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sanity(args: SanityArgs) -> Result<ExitCode> {
    let cfg = args.opt.config(args.seed)?;
    let spec = SanitySpec {
        dims: args.k,
        len: args.n,
        trials: args.trials,
        seed: args.seed,
        ..Default::default()
    };
    let rows = run_sanity(&spec, &cfg)?;
    write_sanity(open_output(args.output.as_deref())?, &rows)?;
    let mut err = io::stderr().lock();
    for (k, kept, frac) in sanity_recovery(&rows) {
        writeln!(err, "k={k}: {kept} runs kept, {:.1}% recovered (value <= {})", frac * 100.0, bench::RECOVERED)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn bench_pairs(args: &BenchArgs) -> Result<Vec<bench::Pair>> {
    match &args.input {
        Some(path) => {
            let ds: Dataset64 = load_dataset(path, resolve_format(args.format, path)?)?;
            let resample_to = args.dewarp.then(|| args.n[0]);
            dataset_pairs(&ds, args.trials, resample_to)
        }
        None => generate_pairs(
            &GeneratorSpec {
                dims: args.k.clone(),
                lengths: args.n.clone(),
                pairs_per_cell: args.trials,
                seed: args.seed,
                ..Default::default()
            },
            args.dewarp,
        ),
    }
}

fn finish_bench(kind: ReportKind, records: &[bench::BenchRecord], output: Option<&Path>) -> Result<ExitCode> {
    write_report(open_output(output)?, kind, records)?;
    let summary = Summary::of(records);
    summary.log(io::stderr().lock())?;
    if summary.violations > 0 {
        eprintln!("error: {} pair(s) violate the lower-bound invariant", summary.violations);
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench_tightness(args: BenchArgs) -> Result<ExitCode> {
    let cfg = args.opt.config(args.seed)?;
    let records = run_tightness(&bench_pairs(&args)?, &cfg)?;
    finish_bench(ReportKind::Tightness, &records, args.output.as_deref())
}

fn cmd_bench_speedup(args: SpeedupArgs) -> Result<ExitCode> {
    let cfg = args.bench.opt.config(args.bench.seed)?;
    if args.reps == 0 {
        bail!("--reps must be at least 1");
    }
    let records = run_speedup(&bench_pairs(&args.bench)?, &cfg, args.reps)?;
    finish_bench(ReportKind::Speedup, &records, args.bench.output.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Dist(a) => cmd_dist(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Dewarp(a) => cmd_dewarp(a),
        Command::Sanity(a) => cmd_sanity(a),
        Command::BenchTightness(a) => cmd_bench_tightness(a),
        Command::BenchSpeedup(a) => cmd_bench_speedup(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
