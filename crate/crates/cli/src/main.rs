use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;

use args::Cli;

/// Failure with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub const TRIAL: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const WRITE: u8 = 3;
    pub const CHECK: u8 = 4;

    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<nearideal::Error> for Failure {
    fn from(err: nearideal::Error) -> Self {
        use nearideal::Error as E;
        let code = match err {
            E::CausalityViolation { .. } | E::NotReal { .. } | E::Aliasing { .. } => Self::CHECK,
            E::Domain { .. } | E::Csv(_) | E::NonFinite(_) | E::EmptyProduct => Self::USAGE,
            E::Singularity(_)
            | E::NonStationary { .. }
            | E::DegenerateDenominator(_)
            | E::MissingIndex(_) => Self::TRIAL,
        };
        Self::new(code, err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
