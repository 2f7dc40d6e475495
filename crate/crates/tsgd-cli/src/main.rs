//! `tsgd` — replay streaming forecasting experiments from JSON configs.
//!
//! Exit codes: 0 success, 1 config error, 2 data error, 3 I/O error.
//! A diverging run is not an error; it exits 0 with flagged rows.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tsgd_core::error::Error;
use tsgd_core::harness::{
    compare_methods, emit_report, emit_stability_report, metrics_to_csv, metrics_to_json,
    run_experiment, stability_to_csv, CompareConfig, ExperimentConfig, ReportFormat,
};

#[derive(Parser)]
#[command(name = "tsgd", version, about = "Online time-smoothed gradient descent experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON config.
    Run(CommonArgs),
    /// Run a method x learning-rate x seed stability grid.
    Compare(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's seed (for `compare`: replaces the seed list).
    #[arg(long)]
    seed: Option<u64>,
    /// Write the report here instead of the config's output path / stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> ReportFormat {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run_cmd(args),
        Command::Compare(args) => compare_cmd(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Dimension { .. } => 1,
        Error::Io { .. } => 3,
        _ => 2,
    }
}

fn load_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let content = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    serde_json::from_str(&content)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn run_cmd(args: CommonArgs) -> Result<(), Error> {
    let mut config: ExperimentConfig = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let report = run_experiment(&config)?;
    eprintln!(
        "run complete: {} updates, final ql_grand {}",
        report.rows.len(),
        report.final_ql_grand()
    );
    let out = args.out.or_else(|| config.output.clone());
    match out {
        Some(path) => emit_report(&report, &path, args.format.into()),
        None => {
            let content = match args.format {
                FormatArg::Csv => metrics_to_csv(&report),
                FormatArg::Json => metrics_to_json(&report)?,
            };
            print!("{content}");
            Ok(())
        }
    }
}

fn compare_cmd(args: CommonArgs) -> Result<(), Error> {
    let mut config: CompareConfig = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seeds = vec![seed];
    }
    let report = compare_methods(&config.base, &config.etas, &config.methods, &config.seeds)?;
    eprintln!("compare complete: {} runs", report.runs.len());
    let out = args.out.or_else(|| config.base.output.clone());
    match out {
        Some(path) => emit_stability_report(&report, &path, args.format.into()),
        None => {
            let content = match args.format {
                FormatArg::Csv => stability_to_csv(&report),
                FormatArg::Json => serde_json::to_string_pretty(&report)
                    .map_err(|e| Error::Config(format!("serialization failed: {e}")))?,
            };
            print!("{content}");
            Ok(())
        }
    }
}
