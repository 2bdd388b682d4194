//! Command-line front end for the dispersive shock-wave toolkit.
//!
//! Every subcommand resolves its parameters from CLI flags first, then from an
//! optional flat JSON config file, then from built-in defaults, builds the
//! corresponding system out of `qhd-core`, and writes datasets/reports to the
//! output directory. Exit codes are part of the contract:
//!
//! * `0` — requested object produced (or classification printed),
//! * `2` — bad input: missing/invalid parameters, degenerate end states,
//! * `3` — the requested wave provably does not exist for these parameters,
//! * `4` — a numerical routine failed to converge.

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod dataset;
pub mod sweep;

pub use config::Config;
pub use sweep::{run_sweep, CaseRecord, SweepKind, SweepReport};

/// Terminal failure of a subcommand: a process exit code plus a message for
/// stderr. Code 2 is "your input", 3 is "no such wave", 4 is "the numerics".
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    /// Bad or missing input (exit 2).
    pub fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    /// Proven non-existence of the requested wave (exit 3).
    pub fn not_exists(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into() }
    }

    /// A numerical routine gave up (exit 4).
    pub fn numerical(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into() }
    }

    /// Map a core error onto the exit-code contract: existence verdicts are 3,
    /// solver/iteration breakdowns are 4, everything else is an input problem.
    pub fn from_core(err: qhd_core::Error) -> Self {
        use qhd_core::Error::*;
        let code = match &err {
            VerdictNotExists(_) | OutsideTheoremScope(_) => 3,
            NoConvergence { .. }
            | StepSizeUnderflow { .. }
            | PositivityLoss { .. }
            | MaxStepsExceeded { .. }
            | NonFiniteState { .. }
            | IterationLimit
            | NoSignChange { .. }
            | BracketSearchFailed(_)
            | NonFiniteEval { .. } => 4,
            _ => 2,
        };
        Failure { code, message: err.to_string() }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qhd-dsw",
    about = "Traveling and standing wave profiles for a quantum-hydrodynamic flow",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve the jump conditions for a pair of end states and classify both
    /// momentum branches.
    Classify(commands::ClassifyArgs),
    /// Construct a viscous traveling front connecting two end states.
    Travel(commands::TravelArgs),
    /// Construct a standing solitary pulse over a uniform far field.
    Standing(commands::StandingArgs),
    /// Reproduce one of the built-in phase-plane datasets (1-4).
    Figure(commands::FigureArgs),
    /// Run a randomized verification sweep and write a JSON report.
    Sweep(commands::SweepArgs),
}

/// Dispatch a parsed command line and reduce the outcome to an exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Classify(args) => commands::cmd_classify(args),
        Command::Travel(args) => commands::cmd_travel(args),
        Command::Standing(args) => commands::cmd_standing(args),
        Command::Figure(args) => commands::cmd_figure(args),
        Command::Sweep(args) => commands::cmd_sweep(args),
    };
    match result {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            failure.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_map_to_contract_codes() {
        use qhd_core::Error;
        let f = Failure::from_core(Error::VerdictNotExists("no orbit".into()));
        assert_eq!(f.code, 3);
        let f = Failure::from_core(Error::OutsideTheoremScope("unhandled regime".into()));
        assert_eq!(f.code, 3);
        let f = Failure::from_core(Error::NoConvergence { y: 100.0, residual: 0.5 });
        assert_eq!(f.code, 4);
        assert!(f.message.contains("residual"));
        let f = Failure::from_core(Error::MaxStepsExceeded { y: 3.0 });
        assert_eq!(f.code, 4);
        let f = Failure::from_core(Error::IterationLimit);
        assert_eq!(f.code, 4);
        let f = Failure::from_core(Error::NoSignChange { lo: 1.0, hi: 2.0 });
        assert_eq!(f.code, 4);
        let f = Failure::from_core(Error::EqualEndStates(2.0));
        assert_eq!(f.code, 2);
        let f = Failure::from_core(Error::InvalidParams("gamma".into()));
        assert_eq!(f.code, 2);
        let f = Failure::from_core(Error::NonPositiveDensity(-1.0));
        assert_eq!(f.code, 2);
    }

    #[test]
    fn cli_parses_subcommands() {
        let cli = Cli::try_parse_from([
            "qhd-dsw", "travel", "--p-plus", "1.2", "--p-minus", "2", "--s", "1", "--gamma",
            "1.5", "--mu", "0.3", "--k", "1.4142135623730951",
        ])
        .unwrap();
        match cli.command {
            Command::Travel(args) => {
                assert_eq!(args.p_plus, Some(1.2));
                assert_eq!(args.mu, Some(0.3));
                assert!(args.span.is_none());
            }
            other => panic!("parsed wrong command: {other:?}"),
        }

        let cli = Cli::try_parse_from(["qhd-dsw", "figure", "3"]).unwrap();
        match cli.command {
            Command::Figure(args) => assert_eq!(args.id, 3),
            other => panic!("parsed wrong command: {other:?}"),
        }

        // ids outside 1..=4 are rejected at parse time (usage error, exit 2)
        let err = Cli::try_parse_from(["qhd-dsw", "figure", "5"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
