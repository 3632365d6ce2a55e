//! `qid`: run trade-off experiments from JSON configs.
//!
//! Exit status: 0 when every asserted check holds, 1 when one fails, 2 on a
//! bad config or unreadable input, 3 when a request exceeds capacity limits.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qid_core::experiment::{
    exit_code_for, load_lp_inputs, overlap_table_csv, run_experiment, to_report_json, ExperimentConfig,
};
use qid_core::tradeoff::landau_pollak_check;
use qid_core::Error;

#[derive(Parser)]
#[command(name = "qid", version, about = "Information-disturbance trade-off experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the attacks listed in a config at its message length.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the one in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every attack at every length in `n_values`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Landau-Pollak relation for a serialized projector family and state.
    CheckLp {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        state: PathBuf,
    },
    /// Table of `||X_x Z_z X_x||` for every message pair.
    Overlap {
        #[arg(long)]
        n: usize,
    },
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn experiment(config: &Path, out: Option<&Path>, sweep: bool) -> Result<i32, Error> {
    let cfg = ExperimentConfig::from_path(config)?;
    if sweep && cfg.n_values.is_empty() {
        return Err(Error::Config("sweep configs need `n_values`".into()));
    }
    let outcome = run_experiment(&cfg, out)?;
    for entry in &outcome.summary.runs {
        println!(
            "N={} attack={} {}",
            entry.n,
            entry.attack.slug(),
            if entry.all_hold { "ok" } else { "VIOLATION" }
        );
    }
    let lp = &outcome.summary.random_lp;
    println!("random Landau-Pollak: {} instances, {} violations", lp.instances, lp.violations);
    println!("wrote {} files", outcome.files.len());
    Ok(outcome.exit_code)
}

fn check_lp(family: &Path, state: &Path) -> Result<i32, Error> {
    let (projectors, rho) = load_lp_inputs(&read(family)?, &read(state)?)?;
    let out = landau_pollak_check(&projectors, &rho)?;
    print!("{}", to_report_json(&out)?);
    Ok(if out.holds { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Simulate { config, out } => experiment(&config, out.as_deref(), false),
        Command::Sweep { config, out } => experiment(&config, out.as_deref(), true),
        Command::CheckLp { family, state } => check_lp(&family, &state),
        Command::Overlap { n } => {
            print!("{}", overlap_table_csv(n)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    };
    ExitCode::from(code as u8)
}
