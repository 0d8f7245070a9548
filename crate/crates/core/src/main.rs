use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hypertune::cli::{cmd_compare, cmd_tune, CliError, Overrides, RunManifest};
use hypertune::fmt::to_json_line;
use hypertune::search_space::{preset_space, PRESET_NAMES};

#[derive(Parser)]
#[command(name = "hypertune", version, about = "Hyperparameter search with random, grid, genetic and TPE samplers")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct RunArgs {
    /// TOML run manifest.
    #[arg(long)]
    manifest: PathBuf,
    /// Replace the manifest's trial budget.
    #[arg(long)]
    budget: Option<u64>,
    /// Replace the manifest's seed list (repeatable).
    #[arg(long = "seed")]
    seeds: Vec<u64>,
    /// Replace the manifest's output directory.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one study per seed with a single sampler.
    Tune(RunArgs),
    /// Run every sampler against every seed and tabulate the results.
    Compare(RunArgs),
    /// Print a preset search space as JSON, or list the presets.
    Space {
        /// Preset name; omit to list all presets.
        name: Option<String>,
    },
}

fn load(args: &RunArgs) -> Result<RunManifest, CliError> {
    let mut manifest = RunManifest::load(&args.manifest)?;
    manifest.apply(&Overrides {
        budget: args.budget,
        seeds: (!args.seeds.is_empty()).then(|| args.seeds.clone()),
        output: args.output.clone(),
    })?;
    Ok(manifest)
}

fn run(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Tune(args) => {
            let manifest = load(&args)?;
            let report = cmd_tune(&manifest)?;
            for row in &report.rows {
                match &row.best {
                    Some(b) => println!("seed {}: best {} at trial {} ({})", row.seed, b.score().unwrap_or(f64::NAN), b.ordinal, b.point),
                    None => println!("seed {}: no trial completed", row.seed),
                }
            }
            println!("wrote {}", manifest.output.display());
        }
        Cmd::Compare(args) => {
            let manifest = load(&args)?;
            let report = cmd_compare(&manifest)?;
            for s in &report.summaries {
                let median = s.median.map_or("-".to_owned(), |m| m.to_string());
                println!("{:<8} median {median} ({}/{} cells)", s.sampler, s.completed, s.cells);
            }
            println!("winner: {}", report.winner.as_deref().unwrap_or("none"));
            println!("wrote {}", manifest.output.display());
        }
        Cmd::Space { name: None } => {
            for n in PRESET_NAMES {
                println!("{n}");
            }
        }
        Cmd::Space { name: Some(n) } => {
            let space = preset_space(&n).map_err(|e| CliError::Manifest(e.to_string()))?;
            println!("{}", to_json_line(&space).map_err(|e| CliError::Manifest(e.to_string()))?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
