mod commands;
mod instance;
mod output;

use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use settol::Error;

use commands::{AllLowerArgs, BoundsArgs, SetArgs, SingleArgs, VerifyArgs};
use output::OutputArgs;

/// Exact set tolerances for combinatorial sum problems.
#[derive(Parser, Debug)]
#[command(name = "settol", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single upper and lower tolerances per element.
    Single(SingleArgs),
    /// Set upper or lower tolerance of one set.
    Set(SetArgs),
    /// Lower tolerances of every nonempty subset.
    AllLower(AllLowerArgs),
    /// Bounds on the set tolerances of one set.
    Bounds(BoundsArgs),
    /// Compare the engine with the brute-force oracle.
    Verify(VerifyArgs),
}

impl Command {
    fn output(&self) -> &OutputArgs {
        match self {
            Command::Single(a) => &a.output,
            Command::Set(a) => &a.output,
            Command::AllLower(a) => &a.output,
            Command::Bounds(a) => &a.output,
            Command::Verify(a) => &a.output,
        }
    }
}

/// An error with its process exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn io(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    /// Any library error raised while reading an input file.
    pub fn input(e: Error) -> Self {
        Failure::io(e.to_string())
    }

    pub fn request(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::InvalidInstance(_) => 1,
            Error::IndexOutOfRange { .. }
            | Error::Overlap { .. }
            | Error::UnknownLabel(_)
            | Error::DuplicateLabel(_)
            | Error::InvalidRequest(_)
            | Error::CapExceeded { .. } => 2,
            Error::Arithmetic(_) | Error::Infeasible | Error::Internal(_) => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !cli.command.output().no_banner {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        eprintln!("settol {} at unix time {now}", env!("CARGO_PKG_VERSION"));
    }
    let result = match &cli.command {
        Command::Single(a) => commands::single(a),
        Command::Set(a) => commands::set(a),
        Command::AllLower(a) => commands::all_lower(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
