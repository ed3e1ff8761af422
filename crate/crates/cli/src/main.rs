use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qcorr::{Dims, Subsystem};
use qcorr_cli::commands::{self, Outcome, SweepArgs, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "qcorr", version, about = "Correlation and information measures for bipartite quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    #[value(name = "1to2")]
    OneToTwo,
    #[value(name = "2to1")]
    TwoToOne,
}

#[derive(Subcommand)]
enum Command {
    /// Entropies, mutual information and purity of a state file.
    Report {
        state: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the information inequalities and identities on random states.
    Sweep {
        #[arg(long, default_value = "2x2", value_parser = parse_dims)]
        dims: Dims,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value = "violations")]
        out: PathBuf,
    },
    /// Quantum discord via the information-gain supremum.
    Discord {
        state: PathBuf,
        #[arg(long, value_enum, default_value = "1to2")]
        direction: Direction,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check whether two subsystem observables are twins in a state.
    Twins {
        state: PathBuf,
        observable_a: PathBuf,
        observable_b: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Schmidt decomposition of a pure state.
    Schmidt { state: PathBuf },
    /// Write the Schmidt-basis twin observables of a pure state.
    PureTwins {
        state: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected AxB, got {s:?}"))?;
    let d1 = a.trim().parse::<usize>().map_err(|e| format!("{a:?}: {e}"))?;
    let d2 = b.trim().parse::<usize>().map_err(|e| format!("{b:?}: {e}"))?;
    Dims::new(d1, d2).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_USAGE as u8 } else { 0 };
            return ExitCode::from(code);
        }
    };
    let outcome: Outcome = match cli.command {
        Command::Report { state, seed } => commands::report(&state, seed),
        Command::Sweep { dims, samples, seed, tol, out } => {
            commands::sweep(&SweepArgs { dims, samples, seed, tol, out })
        }
        Command::Discord { state, direction, restarts, seed } => {
            let side = match direction {
                Direction::OneToTwo => Subsystem::First,
                Direction::TwoToOne => Subsystem::Second,
            };
            commands::discord(&state, side, restarts, seed)
        }
        Command::Twins { state, observable_a, observable_b, tol } => {
            commands::twins(&state, &observable_a, &observable_b, tol)
        }
        Command::Schmidt { state } => commands::schmidt(&state),
        Command::PureTwins { state, out } => commands::pure_twins(&state, &out),
    };
    // a closed pipe is not worth a panic
    if !outcome.stdout.is_empty() {
        let _ = writeln!(std::io::stdout(), "{}", outcome.stdout);
    }
    if !outcome.stderr.is_empty() {
        let _ = writeln!(std::io::stderr(), "{}", outcome.stderr);
    }
    ExitCode::from(outcome.code as u8)
}
