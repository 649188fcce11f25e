use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use strand_cli::commands::{self, CheckArgs};

/// Batch checker for string-diagram theories.
#[derive(Parser)]
#[command(name = "strand", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse theory files and check every lemma's proof script.
    ///
    /// Exits 0 when all lemmas check, 1 when any lemma (or model check)
    /// fails, 2 on parse or resolution errors.
    Check {
        /// Theory files (.thy).
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Run the randomized semantic oracle with this many trials per
        /// rule and lemma statement (informational).
        #[arg(long, value_name = "TRIALS")]
        oracle: Option<u32>,
        /// Seed for the randomized oracle.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the report as JSON on stdout.
        #[arg(long)]
        json: bool,
        /// Write GraphViz renderings of every rule and lemma side here.
        #[arg(long, value_name = "DIR")]
        dump_dot: Option<PathBuf>,
        /// Write JSON graph dumps of every rule and lemma side here.
        #[arg(long, value_name = "DIR")]
        dump_json: Option<PathBuf>,
        /// Check every rule and lemma statement against a generator
        /// tensor manifest (JSON); refuted rules fail the run.
        #[arg(long, value_name = "MODEL.json")]
        model: Option<PathBuf>,
        /// Absolute per-entry tolerance for --model comparisons.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// List the available occurrences for one rewrite step of a lemma.
    Matches {
        file: PathBuf,
        /// Lemma name.
        lemma: String,
        /// 1-based step number within the lemma's proof.
        step: usize,
    },
    /// Print the graphs of a rule (or, with --lemma, a lemma statement).
    Show {
        file: PathBuf,
        /// Rule name to display.
        rule: Option<String>,
        /// Lemma name to display instead of a rule.
        #[arg(long)]
        lemma: Option<String>,
        /// Emit JSON graph dumps instead of GraphViz.
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { files, oracle, seed, json, dump_dot, dump_json, model, tol } => {
            commands::run_check(&CheckArgs {
                files,
                oracle,
                seed,
                json,
                dump_dot,
                dump_json,
                model,
                tolerance: tol,
            })
        }
        Command::Matches { file, lemma, step } => commands::run_matches(&file, &lemma, step),
        Command::Show { file, rule, lemma, json } => {
            commands::run_show(&file, rule.as_deref(), lemma.as_deref(), json)
        }
    };
    ExitCode::from(code as u8)
}
