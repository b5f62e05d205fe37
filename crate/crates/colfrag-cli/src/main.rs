use std::path::PathBuf;

use anyhow::{ensure, Context};
use clap::{Parser, ValueEnum};

use colfrag_cli::config::{self, Mode, OutputFormat};
use colfrag_cli::{output, seed_check, single, study};

/// Finite-volume solver for collision-induced fragmentation population
/// balances: runs a configured case or a mesh-refinement study.
#[derive(Parser)]
#[command(name = "colfrag", version)]
struct Cli {
    /// TOML configuration describing the case; a [study] section selects a
    /// refinement study, otherwise a single run.
    #[arg(long)]
    config: PathBuf,

    /// Write results to this file instead of the config's output path (or
    /// stdout when neither is set).
    #[arg(long)]
    output: Option<PathBuf>,

    /// Output format; overrides the config.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,

    /// Cross-check the solver against the brute-force reference on a small
    /// instance before running.
    #[arg(long)]
    seed_check: bool,

    /// Worker threads for study levels (single runs are sequential).
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    ensure!(cli.threads >= 1, "--threads must be at least 1");

    let text = std::fs::read_to_string(&cli.config)
        .with_context(|| format!("cannot read config {}", cli.config.display()))?;
    let parsed = config::parse_config(&text)
        .with_context(|| format!("invalid config {}", cli.config.display()))?;

    if cli.seed_check {
        seed_check::verify(&parsed.file).context("seed check failed")?;
        eprintln!("seed check passed: solver matches the brute-force reference");
    }

    let format = match cli.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => parsed.file.output.format,
    };

    let rendered = match parsed.mode {
        Mode::Single => {
            let outcome = single::run_single(&parsed.file)?;
            match format {
                OutputFormat::Csv => output::single_csv(&outcome),
                OutputFormat::Json => output::single_json(&outcome),
            }
        }
        Mode::Study => {
            let outcome = study::run_study(&parsed.file, cli.threads)?;
            match format {
                OutputFormat::Csv => output::study_csv(&outcome),
                OutputFormat::Json => output::study_json(&outcome),
            }
        }
    };

    let destination = cli
        .output
        .or_else(|| parsed.file.output.path.as_ref().map(PathBuf::from));
    match destination {
        Some(path) => std::fs::write(&path, rendered)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(())
}
