use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use facered::facial::Mode;
use facered_cli::commands::{self, GenKind, Outcome, ReduceOptions};

#[derive(Parser)]
#[command(name = "facered", version, about = "Facial reduction, singularity degree, and rigidity certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Laman,
    Chordal,
    Planar,
    Ladder,
}

#[derive(Subcommand)]
enum Command {
    /// Run facial reduction on a problem file and report the singularity degree.
    Reduce {
        problem: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Threshold for deciding that no exposing element remains.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        certificate_out: Option<PathBuf>,
    },
    /// Check a certificate against its problem.
    Validate { problem: PathBuf, certificate: PathBuf },
    /// Stress sequence and rigidity verdicts for a framework file.
    Rigidity {
        framework: PathBuf,
        #[arg(long)]
        svg_out: Option<PathBuf>,
    },
    /// Write a generated instance.
    Gen {
        #[arg(value_enum)]
        kind: KindArg,
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge density for chordal graphs.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Output path; stdout when absent.
        out: Option<PathBuf>,
    },
    /// Analyze every JSON file in a directory.
    Batch {
        dir: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome: Outcome = match cli.command {
        Command::Reduce { problem, mode, tol, certificate_out } => {
            let mode = mode.map(|m| match m {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Float => Mode::Float,
            });
            commands::reduce(&problem, &ReduceOptions { mode, tol, certificate_out })
        }
        Command::Validate { problem, certificate } => commands::validate(&problem, &certificate),
        Command::Rigidity { framework, svg_out } => commands::rigidity(&framework, svg_out.as_deref()),
        Command::Gen { kind, n, seed, density, out } => {
            let kind = match kind {
                KindArg::Laman => GenKind::Laman,
                KindArg::Chordal => GenKind::Chordal,
                KindArg::Planar => GenKind::Planar,
                KindArg::Ladder => GenKind::Ladder,
            };
            commands::gen(kind, n, seed, density, out.as_deref())
        }
        Command::Batch { dir, jobs } => commands::batch(&dir, jobs),
    };
    if outcome.text.starts_with("error:") {
        eprint!("{}", outcome.text);
    } else {
        print!("{}", outcome.text);
    }
    ExitCode::from(outcome.code as u8)
}
