//! `tsk`: exact tight spans, subtree representations and diversities from the command line.
//!
//! Exit codes: 0 when the checked property holds, 1 on a violation (the report carries the
//! certificate), 2 on unreadable input or a failed precondition.

mod check;
mod diversity;
mod dominate;
mod fuzz;
mod input;
mod report;
mod subtree;
mod tightspan;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use input::{Input, InputDigest};
use report::{Outcome, RunReport, Verdict};

#[derive(Parser)]
#[command(name = "tsk", version, about = "Exact tight spans of finite distance spaces")]
struct Cli {
    /// Single-line JSON instead of pretty-printed output
    #[arg(long, global = true)]
    compact: bool,
    /// Add wall-clock time to the report (makes output run-dependent)
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the triangle, four-point or extended four-point condition, or the diversity axioms
    Check {
        path: PathBuf,
        #[arg(long, value_enum)]
        kind: check::Kind,
        /// Comma-separated labels to restrict to before checking
        #[arg(long)]
        restrict: Option<String>,
    },
    /// Tight-span queries on a distance table
    Tightspan {
        path: PathBuf,
        #[command(subcommand)]
        op: tightspan::Op,
    },
    /// Build and verify a subtree representation
    Subtree {
        path: PathBuf,
        /// Write the representation to this file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dominating metrics
    Dominate {
        path: PathBuf,
        #[command(subcommand)]
        op: dominate::Op,
    },
    /// Diversity constructions and tests
    Diversity {
        path: PathBuf,
        #[command(subcommand)]
        op: diversity::Op,
    },
    /// Run seeded property checks
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, value_enum)]
        mode: FuzzMode,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FuzzMode {
    Subtree,
    Metric,
    Diversity,
}

/// Inputs read during one run, in order.
#[derive(Default)]
pub struct Inputs(Vec<InputDigest>);

impl Inputs {
    pub fn read(&mut self, path: &std::path::Path) -> Result<Input> {
        let input = input::read(path)?;
        self.0.push(input.digest.clone());
        Ok(input)
    }
}

fn dispatch(command: &Command, inputs: &mut Inputs) -> Result<(String, Outcome)> {
    Ok(match command {
        Command::Check { path, kind, restrict } => {
            (format!("check {}", kind.name()), check::run(inputs, path, *kind, restrict.as_deref())?)
        }
        Command::Tightspan { path, op } => (format!("tightspan {}", op.name()), tightspan::run(inputs, path, op)?),
        Command::Subtree { path, out } => ("subtree".into(), subtree::run(inputs, path, out.as_deref())?),
        Command::Dominate { path, op } => (format!("dominate {}", op.name()), dominate::run(inputs, path, op)?),
        Command::Diversity { path, op } => (format!("diversity {}", op.name()), diversity::run(inputs, path, op)?),
        Command::Fuzz { seed, count, mode } => {
            (format!("fuzz {}", fuzz::mode_name(*mode)), fuzz::run(*seed, *count, *mode))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut inputs = Inputs::default();
    let (command, outcome) = match dispatch(&cli.command, &mut inputs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let report = RunReport {
        command,
        inputs: inputs.0,
        verdict: outcome.verdict,
        result: outcome.result,
        artifacts: outcome.artifacts,
        elapsed_ms: cli.timing.then(|| start.elapsed().as_millis() as u64),
    };
    let text = if cli.compact { serde_json::to_string(&report) } else { serde_json::to_string_pretty(&report) };
    println!("{}", text.expect("reports serialize"));
    match report.verdict {
        Verdict::Ok => ExitCode::SUCCESS,
        Verdict::Violation => ExitCode::from(1),
    }
}
