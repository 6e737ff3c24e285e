//! `pspec`: generate matrices, train and calibrate the sensitivity model,
//! compute pseudospectra and run benchmarks.
//!
//! Every command writes a `<output>.config.json` sidecar holding its fully
//! resolved arguments.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pseudospectra::linalg::{full_pseudospectrum, sensitive_zone, ComplexGrid};
use pseudospectra::matrix_gen::{generate_corpus, GenSpec, GeneratedMatrix};
use pseudospectra::neural::{history_csv, load_model, save_model, train, TrainConfig};
use pseudospectra::pipeline::{self, BenchmarkOptions};
use pseudospectra::{io, Exec};

mod corpus;

#[derive(Parser, Debug)]
#[command(name = "pspec", version, about = "Neural-guided pseudospectra of banded matrices")]
struct Cli {
    /// Worker threads for grid evaluation (1 = serial).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Force serial execution (overrides --threads).
    #[arg(long, global = true)]
    single_thread: bool,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw random banded matrices and write them with a manifest.
    Generate(GenerateArgs),
    /// Label a matrix corpus, train the network and save the model.
    Train(TrainArgs),
    /// Choose the decision threshold on validation matrices.
    Calibrate(CalibrateArgs),
    /// Compute the minimum singular value field of one matrix.
    Compute(ComputeArgs),
    /// Compare the hybrid solver with the full grid on test matrices.
    Benchmark(BenchmarkArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct GridArgs {
    /// Grid as x_min,x_max,y_min,y_max,nx,ny.
    #[arg(long, default_value = "-4,4,-4,4,100,100", value_parser = parse_grid, allow_hyphen_values = true)]
    grid: ComplexGrid,
    /// Sensitivity threshold on sigma_min.
    #[arg(long, default_value_t = 0.01)]
    eps: f64,
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    count: u64,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    bandwidths: Vec<usize>,
    #[arg(long, default_value_t = 1e8)]
    cond_cap: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_rejects: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
struct TrainArgs {
    /// Directory written by `generate`.
    #[arg(long)]
    matrices: PathBuf,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, default_value_t = 1e-3)]
    learning_rate: f64,
    #[arg(long, default_value_t = 512)]
    batch_size: usize,
    #[arg(long, default_value_t = 25)]
    max_epochs: usize,
    /// Early-stopping patience in epochs [default: min(5, max-epochs)].
    #[arg(long)]
    patience: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    validation_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct CalibrateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Validation matrices (a `generate` directory).
    #[arg(long)]
    matrices: PathBuf,
    /// Calibrated model to write (defaults to overwriting --model).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-threshold report (defaults to calibration.csv beside the model).
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Full,
    Hybrid,
}

#[derive(Args, Debug, Serialize)]
struct ComputeArgs {
    /// Matrix Market (.mtx) or dense CSV (.csv) file.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Full)]
    mode: Mode,
    /// Calibrated model (required for hybrid mode).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Field CSV to write (`x,y,log10_smin`).
    #[arg(long)]
    out: PathBuf,
    /// Sensitive-zone mask CSV (`x,y,flag`); defaults to `<out stem>.mask.csv`.
    #[arg(long)]
    mask: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Baseline {
    Random,
}

#[derive(Args, Debug, Serialize)]
struct BenchmarkArgs {
    #[arg(long)]
    model: PathBuf,
    /// Test matrices (a `generate` directory); if absent, `--count` matrices
    /// are drawn from `--seed`.
    #[arg(long)]
    matrices: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..), default_value_t = 50)]
    count: u64,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    baseline: Option<Baseline>,
    /// Output directory for records.jsonl, aggregate.csv, strata.csv and comparison.csv.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
}

fn parse_grid(s: &str) -> Result<ComplexGrid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err("expected x_min,x_max,y_min,y_max,nx,ny".into());
    }
    let f = |k: usize| parts[k].parse::<f64>().map_err(|e| format!("{}: {e}", parts[k]));
    let u = |k: usize| parts[k].parse::<usize>().map_err(|e| format!("{}: {e}", parts[k]));
    ComplexGrid::new(f(0)?, f(1)?, f(2)?, f(3)?, u(4)?, u(5)?).map_err(|e| e.to_string())
}

/// Failures that should exit with the usage status rather than a runtime error.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Calibration ran but no threshold met the recall targets.
#[derive(Debug)]
struct CalibrationFailed;

impl std::fmt::Display for CalibrationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("no candidate threshold met the validation recall targets")
    }
}

impl std::error::Error for CalibrationFailed {}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn sidecar_path(output: &Path) -> PathBuf {
    if output.extension().is_none() && !output.is_file() {
        return output.join("config.json");
    }
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".config.json");
    output.with_file_name(name)
}

#[derive(Serialize)]
struct Sidecar<'a, T: Serialize> {
    command: &'static str,
    threads: usize,
    args: &'a T,
}

fn write_sidecar<T: Serialize>(output: &Path, command: &'static str, exec: &Exec, args: &T) -> Result<()> {
    let doc = Sidecar { command, threads: exec.threads(), args };
    write(&sidecar_path(output), serde_json::to_string_pretty(&doc)? + "\n")
}

fn load_corpus(dir: &Path) -> Result<Vec<GeneratedMatrix>> {
    if !dir.join("manifest.csv").is_file() {
        bail!(UsageError(format!("{} is not a matrix directory (no manifest.csv)", dir.display())));
    }
    corpus::read_corpus(dir)
}

fn cmd_generate(a: &GenerateArgs, exec: &Exec) -> Result<()> {
    let spec = GenSpec {
        n: a.n,
        bandwidths: a.bandwidths.clone(),
        cond_cap: a.cond_cap,
        seed: a.seed,
        max_rejects: a.max_rejects,
    };
    spec.validate().map_err(|e| UsageError(e.to_string()))?;
    let corpus = generate_corpus(&spec, a.count as usize, exec)?;
    corpus::write_corpus(&a.out, &corpus)?;
    write_sidecar(&a.out, "generate", exec, a)?;
    println!("wrote {} matrices to {}", corpus.len(), a.out.display());
    Ok(())
}

fn cmd_train(a: &TrainArgs, exec: &Exec) -> Result<()> {
    let config = TrainConfig {
        learning_rate: a.learning_rate,
        batch_size: a.batch_size,
        max_epochs: a.max_epochs,
        patience: a.patience.unwrap_or(5.min(a.max_epochs)),
        validation_fraction: a.validation_fraction,
        seed: a.seed,
    };
    config.validate().map_err(|e| UsageError(e.to_string()))?;
    let corpus = load_corpus(&a.matrices)?;
    let dataset = pipeline::build_dataset(&corpus, &a.grid.grid, a.grid.eps, a.seed, exec)?;
    println!("{} labeled samples ({} sensitive)", dataset.len(), dataset.samples.positives());
    let outcome = train(&dataset.samples, &config)?;
    save_model(&outcome.bundle, &a.out)?;
    write(&a.out.with_file_name("loss_history.csv"), history_csv(&outcome.history))?;
    let resolved = TrainArgs { patience: Some(config.patience), ..a.clone() };
    write_sidecar(&a.out, "train", exec, &resolved)?;
    println!(
        "trained {} epochs (best {} with validation loss {:.5}); model written to {}",
        outcome.bundle.meta.epochs_run,
        outcome.bundle.meta.best_epoch,
        outcome.bundle.meta.best_val_loss,
        a.out.display()
    );
    Ok(())
}

fn cmd_calibrate(a: &CalibrateArgs, exec: &Exec) -> Result<()> {
    let mut bundle = load_model(&a.model)?;
    let corpus = load_corpus(&a.matrices)?;
    let report = pipeline::calibrate_threshold(&bundle, &corpus, &a.grid.grid, a.grid.eps, exec)?;
    let report_path = a.report.clone().unwrap_or_else(|| a.model.with_file_name("calibration.csv"));
    write(&report_path, report.to_csv())?;
    let out = a.out.clone().unwrap_or_else(|| a.model.clone());
    write_sidecar(&report_path, "calibrate", exec, a)?;
    match report.selected() {
        Some(row) => {
            report.apply(&mut bundle)?;
            save_model(&bundle, &out)?;
            println!(
                "tau* = {:.2} (median recall {:.3}, 10th percentile {:.3}); model written to {}",
                row.tau,
                row.median_recall,
                row.p10_recall,
                out.display()
            );
            Ok(())
        }
        None => Err(CalibrationFailed.into()),
    }
}

#[derive(Serialize)]
struct ComputeSummary {
    mode: Mode,
    n: usize,
    grid_points: usize,
    evaluated_points: usize,
    grid_fraction: f64,
    sensitive_points: usize,
    t_nn: f64,
    t_svd: f64,
    t_total: f64,
}

fn cmd_compute(a: &ComputeArgs, exec: &Exec) -> Result<()> {
    let matrix = io::read_matrix(&a.matrix)?;
    let grid = a.grid.grid;
    let (field, sensitive, t_nn, t_svd) = match a.mode {
        Mode::Full => {
            let start = Instant::now();
            let field = full_pseudospectrum(&matrix, &grid, exec)?;
            let t = start.elapsed().as_secs_f64();
            let mask = sensitive_zone(&field, a.grid.eps);
            (field, mask, 0.0, t)
        }
        Mode::Hybrid => {
            let path = a.model.as_ref().ok_or_else(|| UsageError("--mode hybrid requires --model".into()))?;
            let bundle = load_model(path)?;
            if !bundle.is_calibrated() {
                return Err(UsageError(format!(
                    "model {} has no calibrated threshold; run `pspec calibrate` first",
                    path.display()
                ))
                .into());
            }
            let h = pipeline::hybrid_pseudospectrum(&bundle, &matrix, &grid, a.grid.eps, exec)?;
            (h.field, h.sensitive, h.t_nn, h.t_restricted)
        }
    };
    write(&a.out, io::field_to_csv(&field))?;
    let mask_path = a.mask.clone().unwrap_or_else(|| a.out.with_extension("mask.csv"));
    write(&mask_path, io::mask_to_csv(&sensitive, &grid))?;
    let summary = ComputeSummary {
        mode: a.mode,
        n: matrix.n(),
        grid_points: grid.len(),
        evaluated_points: field.evaluated_count(),
        grid_fraction: field.evaluated_count() as f64 / grid.len() as f64,
        sensitive_points: sensitive.count(),
        t_nn,
        t_svd,
        t_total: t_nn + t_svd,
    };
    let text = serde_json::to_string_pretty(&summary)? + "\n";
    write(&a.out.with_extension("timing.json"), &text)?;
    write_sidecar(&a.out, "compute", exec, a)?;
    print!("{text}");
    Ok(())
}

fn cmd_benchmark(a: &BenchmarkArgs, exec: &Exec) -> Result<()> {
    let bundle = load_model(&a.model)?;
    if !bundle.is_calibrated() {
        bail!(UsageError(format!("model {} has no calibrated threshold", a.model.display())));
    }
    let corpus: Vec<GeneratedMatrix> = match &a.matrices {
        Some(dir) => load_corpus(dir)?,
        None => {
            let spec = GenSpec { n: a.n, seed: a.seed, ..GenSpec::default() };
            generate_corpus(&spec, a.count as usize, exec)?
        }
    };
    let options = BenchmarkOptions { random_baseline: a.baseline.is_some(), seed: a.seed };
    let records = pipeline::benchmark(&bundle, &corpus, &a.grid.grid, a.grid.eps, &options, exec)?;
    write(&a.out.join("records.jsonl"), pipeline::records_jsonl(&records))?;
    write(&a.out.join("aggregate.csv"), pipeline::aggregate_csv(&records))?;
    write(&a.out.join("strata.csv"), pipeline::strata_csv(&records))?;
    if a.baseline.is_some() {
        write(&a.out.join("comparison.csv"), pipeline::comparison_csv(&records))?;
    }
    write_sidecar(&a.out, "benchmark", exec, a)?;
    let slow = records.iter().filter(|r| r.speedup_actual < 1.0).count();
    if slow > 0 {
        eprintln!("warning: hybrid solver was slower than the full grid on {slow} matrices");
    }
    print!("{}", pipeline::aggregate_csv(&records));
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let exec = if cli.single_thread { Exec::serial() } else { Exec::with_threads(cli.threads) };
    match &cli.command {
        Command::Generate(a) => cmd_generate(a, &exec),
        Command::Train(a) => cmd_train(a, &exec),
        Command::Calibrate(a) => cmd_calibrate(a, &exec),
        Command::Compute(a) => cmd_compute(a, &exec),
        Command::Benchmark(a) => cmd_benchmark(a, &exec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::new().parse_filters(level).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
