use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use attrib_cli::experiment::{
    run_gaussian, run_kernel, synthetic_common_factor, text_histogram, write_records, ExperimentConfig,
    ExperimentOutput, KernelConfig, DEFAULT_BUDGET, DEFAULT_RUNS,
};
use attrib_cli::explain::{
    cmd_explain, load_background, parse_indices, parse_reals, ExplainRequest, ModeKind, ValueKind,
};
use attrib_cli::verify::{cmd_verify, Suite};
use attrib_cli::{CliError, CliResult};
use attrib_core::valuefn::{DEFAULT_BANDWIDTH, DEFAULT_NEIGHBOR_COUNT, DEFAULT_SAMPLE_COUNT};
use clap::error::ErrorKind as ClapErrorKind;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "attrib",
    version,
    about = "Shapley and integrated-gradient feature attribution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Attribute one instance.
    Explain(ExplainArgs),
    /// Linear ground-truth experiments.
    #[command(subcommand)]
    Experiment(Experiment),
    /// Run a property suite; exit 4 on failure.
    Verify {
        #[arg(long, value_enum, default_value = "axioms")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct ExplainArgs {
    /// File holding an expression in x1..xn or a JSON linear model.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    arity: Option<usize>,
    /// Comma-separated feature values.
    #[arg(long, allow_hyphen_values = true)]
    instance: String,
    #[arg(long = "value-fn", value_enum)]
    value_fn: ValueKind,
    /// Background sample CSV.
    #[arg(long)]
    background: Option<PathBuf>,
    /// Gaussian JSON `{"mean": [..], "cov": [[..], ..]}`.
    #[arg(long)]
    gaussian: Option<PathBuf>,
    /// Discrete distribution JSON `[{"point": [..], "prob": p}, ..]`.
    #[arg(long)]
    discrete: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeKind,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
    samples: usize,
    /// Kernel bandwidth sigma^2.
    #[arg(long, default_value_t = DEFAULT_BANDWIDTH)]
    bandwidth: f64,
    #[arg(long, default_value_t = DEFAULT_NEIGHBOR_COUNT)]
    neighbors: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Experiment {
    /// Random linear models on rank-1 Gaussians.
    Gaussian(GaussianArgs),
    /// Marginal vs kernel-conditional values on a dataset.
    Kernel(KernelArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    /// Error-record CSV; the summary goes next to it as `<stem>.summary.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Text histogram bins per method on stderr (0 disables).
    #[arg(long, default_value_t = 20)]
    bins: usize,
}

#[derive(Args)]
struct GaussianArgs {
    #[arg(long, default_value_t = 3)]
    dims: usize,
    /// 1-based features with zero true coefficient.
    #[arg(long = "zero-coefs", default_value = "1")]
    zero_coefs: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLE_COUNT)]
    samples: usize,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(
        long = "value-fn",
        value_enum,
        value_delimiter = ',',
        default_value = "marginal,cond-gauss"
    )]
    value_fn: Vec<ValueKind>,
    /// Draw the instance uniformly on [-2, 2]^n.
    #[arg(long)]
    uniform_instance: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct KernelArgs {
    /// Dataset CSV; a synthetic common-factor dataset is used when absent.
    #[arg(long)]
    background: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    synthetic_rows: usize,
    #[arg(long, default_value_t = DEFAULT_BANDWIDTH)]
    bandwidth: f64,
    #[arg(long, default_value_t = DEFAULT_NEIGHBOR_COUNT)]
    neighbors: usize,
    #[command(flatten)]
    common: Common,
}

fn print_json<T: serde::Serialize>(value: &T) -> CliResult<()> {
    let s = serde_json::to_string_pretty(value).map_err(attrib_core::Error::from)?;
    println!("{s}");
    Ok(())
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.json"))
}

fn emit(output: &ExperimentOutput, common: &Common) -> CliResult<()> {
    match &common.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::io(path, e))?;
            write_records(&output.records, BufWriter::new(f))?;
            let sp = summary_path(path);
            let json = serde_json::to_string_pretty(&output.summary).map_err(attrib_core::Error::from)?;
            std::fs::write(&sp, json + "\n").map_err(|e| CliError::io(&sp, e))?;
            print_json(&output.summary)?;
        }
        None => {
            write_records(&output.records, io::stdout().lock())?;
            let json = serde_json::to_string_pretty(&output.summary).map_err(attrib_core::Error::from)?;
            eprintln!("{json}");
        }
    }
    if common.bins > 0 {
        let mut err = io::stderr().lock();
        for m in &output.summary.methods {
            let errors: Vec<f64> = output
                .records
                .iter()
                .filter(|r| r.method == m.method)
                .map(|r| r.error)
                .collect();
            let _ = writeln!(err, "errors: {}", m.method);
            let _ = write!(err, "{}", text_histogram(&errors, common.bins, 40));
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Explain(a) => {
            let req = ExplainRequest {
                model: a.model,
                arity: a.arity,
                instance: parse_reals(&a.instance)?,
                value_fn: a.value_fn,
                background: a.background,
                gaussian: a.gaussian,
                discrete: a.discrete,
                mode: a.mode,
                budget: a.budget,
                samples: a.samples,
                bandwidth: a.bandwidth,
                neighbors: a.neighbors,
                seed: a.seed,
            };
            print_json(&cmd_explain(&req)?)
        }
        Command::Experiment(Experiment::Gaussian(a)) => {
            let cfg = ExperimentConfig {
                dims: a.dims,
                zero_coefficient_indices: parse_indices(&a.zero_coefs, a.dims)?,
                runs: a.common.runs,
                sample_count: a.samples,
                coalition_budget: a.budget,
                value_kinds: a.value_fn,
                seed: a.common.seed,
                uniform_instance: a.uniform_instance,
                workers: a.common.workers,
            };
            let out = run_gaussian(&cfg)?;
            emit(&out, &a.common)
        }
        Command::Experiment(Experiment::Kernel(a)) => {
            let mut cfg = KernelConfig::new(a.common.runs, a.common.seed);
            cfg.bandwidth = a.bandwidth;
            cfg.neighbor_count = a.neighbors;
            cfg.workers = a.common.workers;
            let (data, note) = match &a.background {
                Some(p) => (load_background(p)?, None),
                None => (
                    synthetic_common_factor(a.synthetic_rows, a.common.seed)?,
                    Some(format!("synthetic common-factor dataset, {} rows", a.synthetic_rows)),
                ),
            };
            let mut out = run_kernel(&cfg, &data)?;
            out.summary.notes.extend(note);
            emit(&out, &a.common)
        }
        Command::Verify { suite, seed } => {
            let report = cmd_verify(suite, seed)?;
            print_json(&report)?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                Err(CliError::Verification(format!("failed: {}", failed.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("attrib: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
