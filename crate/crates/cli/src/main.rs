//! `gaudinlab`: command-line driver for the Gaudin model laboratory.
//!
//! Exit codes: 0 when every check passes, 1 on a failed check or a
//! numerical failure, 2 on invalid input.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaudinlab::monodromy::TRIVIALITY_TOLERANCE;
use gaudinlab::sov::SeparationGauge;
use gaudinlab::Error;

use crate::commands::Outcome;
use crate::report::{RunReport, Status, Timing};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Library(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Input(msg) => write!(f, "invalid input: {msg}"),
            Self::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Library(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Input(_) => 2,
            Self::Library(e) => match e {
                Error::InvalidProblem(_)
                | Error::CoincidingPoints { .. }
                | Error::UnsupportedWeight(_)
                | Error::UnsupportedAlgebra(_)
                | Error::UnsupportedColor(_)
                | Error::EmptySector(_)
                | Error::Collision(_)
                | Error::TruncationOverflow { .. } => 2,
                _ => 1,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "gaudinlab", version, about = "Numerical laboratory for the Gaudin model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Directory for report.json and CSV tables; the report goes to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact diagonalization oracle.
    Gaudin {
        #[command(subcommand)]
        cmd: GaudinCmd,
    },
    /// Bethe root solving, verification and completeness audits.
    Bethe {
        #[command(subcommand)]
        cmd: BetheCmd,
    },
    /// Obstruction polynomials and Riccati branches.
    Oper {
        #[command(subcommand)]
        cmd: OperCmd,
    },
    /// Loop matrices and triviality verdicts for Bethe opers.
    Monodromy {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        roots: PathBuf,
        #[arg(long, default_value_t = TRIVIALITY_TOLERANCE)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Separation of variables checks.
    Sov {
        #[command(subcommand)]
        cmd: SovCmd,
    },
    /// sl3 factorization and oracle comparison.
    Sl3 {
        #[command(subcommand)]
        cmd: Sl3Cmd,
    },
    /// TQ relation on a q-lattice.
    Tq {
        /// Numerator coefficients of Lambda, ascending: `[[re,im],...]` or `1,0.5`.
        #[arg(long, allow_hyphen_values = true)]
        lambda_num: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda_den: String,
        /// `RE,IM`.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        lattice: usize,
        /// Lattice base point `RE,IM`.
        #[arg(long, default_value = "0.7,0.4", allow_hyphen_values = true)]
        z0: String,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum GaudinCmd {
    Spectrum {
        #[arg(long)]
        problem: PathBuf,
        /// `2` for sl2 or `1,0` for sl3.
        #[arg(long)]
        sector: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum BetheCmd {
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Root colors for sl3, e.g. `1,2`.
        #[arg(long)]
        colors: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    Verify {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        roots: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    Audit {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum OperCmd {
    /// Prints the obstruction polynomial P_m.
    Pm {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        output: Output,
    },
    Riccati {
        /// JSON file `{"coeffs": [[re,im], ...]}` holding q_0, q_{-1}, ...
        #[arg(long)]
        q: PathBuf,
        #[arg(long, default_value_t = gaudinlab::oper::riccati::DEFAULT_DEPTH)]
        depth: usize,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GaugeArg {
    Finite,
    Verma,
}

#[derive(Subcommand)]
enum SovCmd {
    Check {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        roots: PathBuf,
        /// Verma truncation degree; defaults to the number of roots plus 2.
        #[arg(long)]
        cutoff: Option<usize>,
        #[arg(long, value_enum, default_value_t = GaugeArg::Finite)]
        gauge: GaugeArg,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum Sl3Cmd {
    Check {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        roots: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

fn dispatch(command: Command) -> (Result<Outcome, CliError>, Option<PathBuf>) {
    match command {
        Command::Gaudin { cmd: GaudinCmd::Spectrum { problem, sector, seed, output } } => {
            (commands::spectrum(&problem, &sector, seed), output.out)
        }
        Command::Bethe { cmd } => match cmd {
            BetheCmd::Solve { problem, m, starts, seed, colors, output } => {
                (commands::solve_roots(&problem, m, starts, seed, colors.as_deref()), output.out)
            }
            BetheCmd::Verify { problem, roots, output } => (commands::verify(&problem, &roots), output.out),
            BetheCmd::Audit { problem, seed, output } => (commands::audit(&problem, seed), output.out),
        },
        Command::Oper { cmd } => match cmd {
            OperCmd::Pm { m, output } => (Ok(commands::pm(m)), output.out),
            OperCmd::Riccati { q, depth, output } => (commands::riccati(&q, depth), output.out),
        },
        Command::Monodromy { problem, roots, tol, output } => (commands::monodromy(&problem, &roots, tol), output.out),
        Command::Sov { cmd: SovCmd::Check { problem, roots, cutoff, gauge, output } } => {
            let gauge = match gauge {
                GaugeArg::Finite => SeparationGauge::FiniteDimensional,
                GaugeArg::Verma => SeparationGauge::Verma,
            };
            (commands::sov(&problem, &roots, cutoff, gauge), output.out)
        }
        Command::Sl3 { cmd: Sl3Cmd::Check { problem, roots, seed, output } } => (commands::sl3(&problem, &roots, seed), output.out),
        Command::Tq { lambda_num, lambda_den, q, lattice, z0, output } => {
            let args = commands::TqArgs { num: &lambda_num, den: &lambda_den, q: &q, lattice, z0: &z0 };
            (commands::tq(&args), output.out)
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// The command line without `--out DIR`, so reports do not depend on where they are written.
fn command_echo(args: &[String]) -> String {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            out.push(a.as_str());
        }
    }
    out.join(" ")
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = Cli::parse_from(&args);
    let start = Instant::now();
    let (outcome, out_dir) = dispatch(cli.command);
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let command = command_echo(&args);
    let pass = outcome.checks.iter().all(|c| c.pass);
    let report = RunReport {
        tool: "gaudinlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        input_digest: report::digest(&command, &outcome.inputs),
        command,
        seed: outcome.seed,
        status: if pass { Status::Ok } else { Status::VerificationFailed },
        checks: outcome.checks,
        result: outcome.result,
        timing: Timing { wall_seconds: start.elapsed().as_secs_f64() },
    };
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("check failed: {} = {:?} (threshold {:e})", c.name, c.value, c.threshold);
    }
    match out_dir {
        Some(dir) => {
            if let Err(e) = report::write_outputs(&dir, &report, &outcome.tables) {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code());
            }
            if let Some(text) = &outcome.text {
                emit(text);
            }
        }
        None => match &outcome.text {
            Some(text) => emit(text),
            None => emit(&serde_json::to_string_pretty(&report).expect("reports serialize")),
        },
    }
    ExitCode::from(if pass { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_drops_the_output_directory() {
        let args: Vec<String> = ["gaudinlab", "bethe", "audit", "--out", "/tmp/x", "--seed", "3"].iter().map(|s| s.to_string()).collect();
        assert_eq!(command_echo(&args), "bethe audit --seed 3");
        let args: Vec<String> = ["gaudinlab", "tq", "--out=/tmp/y"].iter().map(|s| s.to_string()).collect();
        assert_eq!(command_echo(&args), "tq");
    }

    #[test]
    fn input_errors_exit_with_two() {
        assert_eq!(CliError::Input("x".into()).exit_code(), 2);
        assert_eq!(CliError::Library(Error::UnsupportedColor(3)).exit_code(), 2);
        assert_eq!(CliError::Library(Error::StepLimit(10)).exit_code(), 1);
        // Residues come from the roots, so an off-locus configuration fails verification.
        assert_eq!(CliError::Library(Error::ResidueSum(gaudinlab::C64::new(0.0, 1.0))).exit_code(), 1);
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
