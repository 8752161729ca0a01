//! `fasteer` command-line tool.
//!
//! ```text
//! fasteer gen --n-intra 1000 --n-inter 1000 --seed 1 > s.csv
//! fasteer eer --in s.csv --method polyto --steps 3 --precision 0.01
//! fasteer roc --in s.csv --steps 100
//! fasteer ci --in s.csv --k 100 --alpha 0.10 --strategy parallel --seed 9
//! fasteer worker --listen 0.0.0.0:7878
//! fasteer fuse --spec spec.json --in multi.csv --out scores.csv
//! fasteer optimize --family ga3 --in multi.csv --pop 100 --gen 50 --seed 1 --out report.json
//! fasteer bench --in s.csv --grid default
//! ```
//!
//! Exit codes: 0 success, 2 usage, 3 data, 4 computation, 5 network.

mod error;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fasteer::bench::{bench_eer_methods, default_grid, render_table, write_csv, MIN_REPETITIONS};
use fasteer::bootstrap::worker::Worker;
use fasteer::scores::{
    generate_multi_synthetic, generate_synthetic, read_multi, read_simple, write_multi, write_simple, ClassParams,
    SyntheticSpec,
};
use fasteer::{
    bootstrap_ci, fuse, optimize, roc_curve, BootstrapConfig, DistributedConfig, EerMethod, FusionFamily,
    FusionSpec64, GaConfig, MultiScoreSet64, PolytomousConfig, RocPoint64, ScoreSet64, Strategy,
};
use serde_json::json;

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "fasteer", version, about = "EER, confidence intervals and score fusion for verification systems")]
struct Cli {
    /// Print one JSON document on stdout instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Scores are similarities (higher means genuine); they are negated on load.
    #[arg(long, global = true)]
    similarity: bool,
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded synthetic score file.
    Gen(GenArgs),
    /// Compute the equal error rate.
    Eer(EerArgs),
    /// Export ROC points as CSV `threshold,far,frr`.
    Roc(RocArgs),
    /// Bootstrap confidence interval of the EER.
    Ci(CiArgs),
    /// Serve bootstrap work orders over TCP.
    Worker(WorkerArgs),
    /// Fuse a multi-system score file with a fusion spec.
    Fuse(FuseArgs),
    /// Tune a fusion function with the genetic algorithm.
    Optimize(OptimizeArgs),
    /// Compare EER methods on one score file.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Input {
    /// Score CSV; stdin when absent or `-`.
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct MethodArgs {
    /// `polyto`, `classic`, `whole`, or a label such as `classic_1000` or `polyto_5_0.01`.
    #[arg(long, default_value = "polyto")]
    method: String,
    /// Thresholds per iteration (polyto, default 3) or grid size (classic, default 1000).
    #[arg(long)]
    steps: Option<usize>,
    /// Target |FAR - FRR| of the polytomous search.
    #[arg(long, default_value_t = 0.01)]
    precision: f64,
    #[arg(long, default_value_t = 100)]
    max_iterations: usize,
}

impl MethodArgs {
    fn method(&self) -> Result<EerMethod, CliError> {
        let m = match self.method.as_str() {
            "polyto" | "polytomous" => EerMethod::Polytomous(PolytomousConfig {
                steps: self.steps.unwrap_or(3),
                precision: self.precision,
                max_iterations: self.max_iterations,
            }),
            "classic" => EerMethod::Classic { steps: self.steps.unwrap_or(1000) },
            label => label.parse().map_err(CliError::Usage)?,
        };
        m.validate().map_err(CliError::Usage)?;
        Ok(m)
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 1000)]
    n_intra: usize,
    #[arg(long, default_value_t = 1000)]
    n_inter: usize,
    #[arg(long, default_value_t = 0.3)]
    intra_mean: f64,
    #[arg(long, default_value_t = 0.1)]
    intra_std: f64,
    #[arg(long, default_value_t = 0.6)]
    inter_mean: f64,
    #[arg(long, default_value_t = 0.1)]
    inter_std: f64,
    /// Systems per tuple; above 1 writes the multi format, system `j` having
    /// its impostor mean pulled `j` times closer to the genuine one.
    #[arg(long, default_value_t = 1)]
    systems: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EerArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    method: MethodArgs,
}

#[derive(Args)]
struct RocArgs {
    #[command(flatten)]
    input: Input,
    /// Grid size; every distinct score when absent.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyKind {
    Single,
    Parallel,
    Distributed,
}

#[derive(Args)]
struct CiArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    method: MethodArgs,
    /// Bootstrap replicates.
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, default_value_t = 0.10)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "single")]
    strategy: StrategyKind,
    /// Pool size for `parallel`; all processing units when absent.
    #[arg(long)]
    threads: Option<usize>,
    /// Comma-separated `host:port` list for `distributed`.
    #[arg(long, env = "FASTEER_WORKERS", value_delimiter = ',')]
    workers: Vec<String>,
    /// Explicit subwork sizes, summing to K.
    #[arg(long, value_delimiter = ',')]
    subworks: Option<Vec<usize>>,
    /// Per-worker static weights used to size subworks.
    #[arg(long, value_delimiter = ',', conflicts_with = "subworks")]
    weights: Option<Vec<f64>>,
    /// Seconds to wait for each worker connection.
    #[arg(long, default_value_t = 5.0)]
    connect_timeout: f64,
}

#[derive(Args)]
struct WorkerArgs {
    #[arg(long, default_value = "127.0.0.1:7878")]
    listen: String,
    /// Local pool size per work order.
    #[arg(long)]
    threads: Option<usize>,
    /// Exit after one coordinator session.
    #[arg(long)]
    once: bool,
}

#[derive(Args)]
struct FuseArgs {
    /// Fusion spec JSON, e.g. `{"family":"ga1","weights":[0.5,2.0]}`.
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    #[command(flatten)]
    input: Input,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[arg(long, default_value = "ga3")]
    family: FusionFamily,
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 50)]
    gen: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    fitness_steps: usize,
    #[arg(long, default_value_t = 0.01)]
    fitness_precision: f64,
    /// Overrides the polytomous fitness, e.g. `classic_100`.
    #[arg(long)]
    fitness_method: Option<String>,
    /// Evaluation pool size; all processing units when absent.
    #[arg(long)]
    threads: Option<usize>,
    /// Report JSON destination.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: Input,
    /// `default`, or comma-separated labels such as `classic_100,polyto_3_0.01`.
    #[arg(long, default_value = "default")]
    grid: String,
    #[arg(long, default_value_t = MIN_REPETITIONS)]
    repetitions: usize,
    /// CSV destination.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn read_input(input: &Input) -> Result<String, CliError> {
    let mut text = String::new();
    match input.input.as_deref() {
        None => io::stdin().read_to_string(&mut text)?,
        Some(p) if p == Path::new("-") => io::stdin().read_to_string(&mut text)?,
        Some(p) => File::open(p)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
    };
    Ok(text)
}

fn load_simple(input: &Input, similarity: bool) -> Result<ScoreSet64, CliError> {
    let set = read_simple(read_input(input)?.as_bytes())?;
    Ok(if similarity { set.negated() } else { set })
}

fn load_multi(input: &Input, similarity: bool) -> Result<MultiScoreSet64, CliError> {
    let set = read_multi(read_input(input)?.as_bytes())?;
    Ok(if similarity { set.negated() } else { set })
}

/// Opens `path`, or stdout when `None`.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(value: &serde_json::Value) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Threshold back on the caller's scale.
fn user_threshold(t: f64, similarity: bool) -> f64 {
    if similarity {
        -t
    } else {
        t
    }
}

fn cmd_gen(a: &GenArgs, json_out: bool) -> Result<(), CliError> {
    let intra = ClassParams::new(a.intra_mean, a.intra_std);
    let inter = ClassParams::new(a.inter_mean, a.inter_std);
    if a.systems == 0 {
        return Err(CliError::Usage("--systems must be >= 1".into()));
    }
    let mut out = sink(a.out.as_deref())?;
    if a.systems == 1 {
        let set: ScoreSet64 = generate_synthetic(&SyntheticSpec::new(a.n_intra, a.n_inter, intra, inter), a.seed)?;
        if json_out && a.out.is_none() {
            drop(out);
            return print_json(&json!({ "intra": set.intra(), "inter": set.inter() }));
        }
        write_simple(&set, &mut out)?;
    } else {
        let systems: Vec<(ClassParams, ClassParams)> = (0..a.systems)
            .map(|j| {
                let gap = (a.inter_mean - a.intra_mean) / (j + 1) as f64;
                (intra, ClassParams::new(a.intra_mean + gap, a.inter_std))
            })
            .collect();
        let set: MultiScoreSet64 = generate_multi_synthetic(a.n_intra, a.n_inter, &systems, a.seed)?;
        if json_out && a.out.is_none() {
            drop(out);
            return print_json(&json!({ "intra": set.intra(), "inter": set.inter() }));
        }
        write_multi(&set, &mut out)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_eer(a: &EerArgs, cli: &Cli) -> Result<(), CliError> {
    let method = a.method.method()?;
    let set = load_simple(&a.input, cli.similarity)?;
    let r = method.compute(&set)?;
    let threshold = user_threshold(r.threshold, cli.similarity);
    if cli.json {
        return print_json(&json!({
            "method": method,
            "label": method.label(),
            "eer": r.eer,
            "threshold": threshold,
            "far": r.far,
            "frr": r.frr,
            "achieved_error": r.achieved_error,
            "comparisons": r.comparisons,
        }));
    }
    println!("method       {}", method.label());
    println!("eer          {:?}", r.eer);
    println!("threshold    {threshold:?}");
    println!("far          {:?}", r.far);
    println!("frr          {:?}", r.frr);
    println!("error        {:?}", r.achieved_error);
    println!("comparisons  {}", r.comparisons);
    Ok(())
}

fn cmd_roc(a: &RocArgs, cli: &Cli) -> Result<(), CliError> {
    let set = load_simple(&a.input, cli.similarity)?;
    let mut points: Vec<RocPoint64> = match a.steps {
        Some(n) => roc_curve(&set, n)?,
        None => fasteer::rates::unique_sorted(&set)
            .into_iter()
            .map(|t| fasteer::rates::rates_at(&set, t))
            .collect(),
    };
    for p in &mut points {
        p.threshold = user_threshold(p.threshold, cli.similarity);
    }
    points.sort_by(|x, y| x.threshold.total_cmp(&y.threshold));
    if cli.json && a.out.is_none() {
        return print_json(&serde_json::to_value(&points)?);
    }
    let mut out = sink(a.out.as_deref())?;
    writeln!(out, "threshold,far,frr")?;
    for p in &points {
        writeln!(out, "{:?},{:?},{:?}", p.threshold, p.far, p.frr)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_ci(a: &CiArgs, cli: &Cli) -> Result<(), CliError> {
    let method = a.method.method()?;
    let strategy = match a.strategy {
        StrategyKind::Single => Strategy::Single,
        StrategyKind::Parallel => Strategy::Parallel { threads: a.threads },
        StrategyKind::Distributed => {
            if a.workers.is_empty() {
                return Err(CliError::Usage("distributed strategy needs --workers or FASTEER_WORKERS".into()));
            }
            if !(a.connect_timeout > 0.0 && a.connect_timeout.is_finite()) {
                return Err(CliError::Usage("--connect-timeout must be positive".into()));
            }
            Strategy::Distributed(DistributedConfig {
                subworks: a.subworks.clone(),
                weights: a.weights.clone(),
                connect_timeout: Some(Duration::from_secs_f64(a.connect_timeout)),
                ..DistributedConfig::new(a.workers.clone())
            })
        }
    };
    let cfg = BootstrapConfig::new(a.k, a.alpha, method, a.seed).with_strategy(strategy);
    cfg.validate()?;
    let set = load_simple(&a.input, cli.similarity)?;
    let ci = bootstrap_ci(&set, &cfg)?;
    if cli.json {
        return print_json(&json!({
            "method": method,
            "k": a.k,
            "k_effective": ci.k_effective(),
            "alpha": ci.alpha,
            "point_estimate": ci.point_estimate,
            "lower": ci.lower,
            "upper": ci.upper,
            "master_seed": a.seed,
            "replicate_eers": ci.replicate_eers,
            "failures": ci.failures,
        }));
    }
    println!("method          {}", method.label());
    println!("eer             {:?}", ci.point_estimate);
    println!("lower           {:?}", ci.lower);
    println!("upper           {:?}", ci.upper);
    println!("confidence      {}%", 100.0 * (1.0 - ci.alpha));
    println!("replicates      {} of {}", ci.k_effective(), a.k);
    for f in &ci.failures {
        eprintln!("replicate {} failed: {}", f.index, f.cause);
    }
    Ok(())
}

fn cmd_worker(a: &WorkerArgs) -> Result<(), CliError> {
    let worker = Worker::<f64>::bind(&a.listen)
        .map_err(|e| CliError::Network(format!("cannot listen on {}: {e}", a.listen)))?
        .with_threads(a.threads);
    let addr = worker.local_addr().map_err(|e| CliError::Network(e.to_string()))?;
    eprintln!("listening on {addr}");
    if a.once {
        let summary = worker.serve_once()?;
        eprintln!("session done: {} work orders, {} replicates", summary.work_orders, summary.replicates);
        Ok(())
    } else {
        worker.serve().map_err(|e| CliError::Network(e.to_string()))
    }
}

fn cmd_fuse(a: &FuseArgs, cli: &Cli) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&a.spec).map_err(|e| CliError::Data(format!("{}: {e}", a.spec.display())))?;
    let spec: FusionSpec64 = serde_json::from_str(&text)?;
    let tuples = load_multi(&a.input, cli.similarity)?;
    let fused = fuse(&tuples, &spec)?;
    if cli.json && a.out.is_none() {
        return print_json(&json!({ "intra": fused.intra(), "inter": fused.inter() }));
    }
    let mut out = sink(a.out.as_deref())?;
    write_simple(&fused, &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_optimize(a: &OptimizeArgs, cli: &Cli) -> Result<(), CliError> {
    let fitness = match &a.fitness_method {
        Some(label) => label.parse().map_err(CliError::Usage)?,
        None => EerMethod::Polytomous(PolytomousConfig::new(a.fitness_steps, a.fitness_precision)),
    };
    fitness.validate().map_err(CliError::Usage)?;
    let cfg = GaConfig {
        population: a.pop,
        generations: a.gen,
        seed: a.seed,
        fitness,
        threads: a.threads,
        ..GaConfig::default()
    };
    cfg.validate()?;
    let tuples = load_multi(&a.input, cli.similarity)?;
    let report = optimize(&tuples, a.family, &cfg)?;
    if let Some(p) = &a.out {
        let mut out = sink(Some(p))?;
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
        out.flush()?;
    }
    if cli.json {
        return print_json(&serde_json::to_value(&report)?);
    }
    println!("family          {}", report.family);
    println!("train eer       {:?}", report.train_eer);
    println!("validation eer  {:?}", report.validation_eer);
    for (name, eer) in &report.validation_baselines {
        println!("  {name:<13} {eer:?}");
    }
    if !report.best_spec.weights.is_empty() {
        println!("weights         {:?}", report.best_spec.weights);
    }
    if !report.best_spec.exponents.is_empty() {
        println!("exponents       {:?}", report.best_spec.exponents);
    }
    println!("evaluations     {} ({} failed)", report.fitness_evaluations, report.fitness_failures);
    println!("wall time       {:.1} ms", report.wall_time_ms);
    Ok(())
}

fn cmd_bench(a: &BenchArgs, cli: &Cli) -> Result<(), CliError> {
    let grid: Vec<EerMethod> = if a.grid == "default" {
        default_grid()
    } else {
        a.grid.split(',').map(|l| l.trim().parse().map_err(CliError::Usage)).collect::<Result<_, _>>()?
    };
    if a.repetitions == 0 {
        return Err(CliError::Usage("--repetitions must be >= 1".into()));
    }
    if a.repetitions < MIN_REPETITIONS {
        log::warn!("fewer than {MIN_REPETITIONS} repetitions; timings will be noisy");
    }
    let set = load_simple(&a.input, cli.similarity)?;
    let rows = bench_eer_methods(&set, &grid, a.repetitions);
    if let Some(p) = &a.out {
        let mut out = sink(Some(p))?;
        write_csv(&rows, &mut out)?;
        out.flush()?;
    }
    if cli.json {
        return print_json(&serde_json::to_value(&rows)?);
    }
    if a.out.is_none() {
        write_csv(&rows, io::stdout().lock())?;
        println!();
    }
    print!("{}", render_table(&rows));
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, cli.json),
        Command::Eer(a) => cmd_eer(a, cli),
        Command::Roc(a) => cmd_roc(a, cli),
        Command::Ci(a) => cmd_ci(a, cli),
        Command::Worker(a) => cmd_worker(a),
        Command::Fuse(a) => cmd_fuse(a, cli),
        Command::Optimize(a) => cmd_optimize(a, cli),
        Command::Bench(a) => cmd_bench(a, cli),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fasteer: {e}");
            ExitCode::from(e.code())
        }
    }
}
