//! `popdist` command-line tool.

use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod output;

use args::{Cli, Command};

/// Process exit codes.
pub mod exit {
    pub const INPUT: u8 = 2;
    pub const NON_CONVERGENCE: u8 = 3;
    pub const VERIFICATION: u8 = 4;
}

/// An error that already knows its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Self {
            code,
            error: error.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        let code = match error.downcast_ref::<popdist::Error>() {
            Some(
                popdist::Error::LpIterationLimit { .. }
                | popdist::Error::LpInfeasible
                | popdist::Error::LpUnbounded,
            ) => exit::NON_CONVERGENCE,
            _ => exit::INPUT,
        };
        Self { code, error }
    }
}

impl From<popdist::Error> for Failure {
    fn from(error: popdist::Error) -> Self {
        anyhow::Error::from(error).into()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Estimate(a) => commands::estimate(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a),
        Command::Compare(a) => commands::compare(a),
        Command::Scenario(a) => commands::scenario(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_kind() {
        let code = |e: popdist::Error| Failure::from(e).code;
        assert_eq!(code(popdist::Error::LpIterationLimit { iterations: 5 }), exit::NON_CONVERGENCE);
        assert_eq!(code(popdist::Error::LpInfeasible), exit::NON_CONVERGENCE);
        assert_eq!(code(popdist::Error::InvalidInput("x".into())), exit::INPUT);
        assert_eq!(code(popdist::Error::Parse { line: 3, message: "x".into() }), exit::INPUT);
        let wrapped = anyhow::Error::from(popdist::Error::LpUnbounded).context("solving");
        assert_eq!(Failure::from(wrapped).code, exit::NON_CONVERGENCE);
    }
}
