mod args;
mod compare;
mod manifest;
mod output;
mod solve;
mod synth;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Failure classes with their exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    /// Already formatted by the argument parser.
    Usage(String),
    Numerical(String),
    Verify(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Verify(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "error: {m}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Verify(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<holoflow::Error> for CliError {
    fn from(e: holoflow::Error) -> Self {
        use holoflow::Error as E;
        match e {
            E::Divergence { .. } | E::ZeroAmplitude { .. } | E::DegenerateSample { .. } => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn init_threads() -> CliResult<()> {
    let n = match std::env::var("HOLOFLOW_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("HOLOFLOW_THREADS must be a nonnegative integer, got `{v}`")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run() -> CliResult<()> {
    let argv = args::expand_config(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    init_threads()?;
    match cli.command {
        Command::Solve(a) => solve::run(a),
        Command::Compare(a) => compare::run(a),
        Command::Verify(a) => verify::run(a),
        Command::Synth(a) => synth::run(a),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
