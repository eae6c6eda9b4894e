use std::process::ExitCode;

use bangbang_cli::{execute, CommonArgs, Task};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bangbang", version, about = "Optimal prediction of the ultimate maximum: solvers, classifiers and Monte Carlo batteries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Skew class of a lattice walk, or the Lévy classes and truncation levels of a triplet
    Classify(CommonArgs),
    /// Exact optimal stopping on the lattice (value function and stop region)
    Solve(CommonArgs),
    /// Check that the rule designated by the skew class is optimal (lattice)
    Verify(CommonArgs),
    /// Value-function inequalities plus time-reversal checks
    Suite(CommonArgs),
    /// Simulate paths, check the characteristic function, optionally couple with the dual
    Simulate(CommonArgs),
    /// Score the designated trivial rule against adversarial rules on common paths
    Battery(CommonArgs),
    /// Time reversal: (M - X, X) against (M~, -X~)
    Reversal(CommonArgs),
}

impl Command {
    fn split(self) -> (Task, CommonArgs) {
        match self {
            Command::Classify(a) => (Task::Classify, a),
            Command::Solve(a) => (Task::Solve, a),
            Command::Verify(a) => (Task::Verify, a),
            Command::Suite(a) => (Task::Suite, a),
            Command::Simulate(a) => (Task::Simulate, a),
            Command::Battery(a) => (Task::Battery, a),
            Command::Reversal(a) => (Task::Reversal, a),
        }
    }
}

fn main() -> ExitCode {
    let (task, args) = Cli::parse().command.split();
    match execute(task, &args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
