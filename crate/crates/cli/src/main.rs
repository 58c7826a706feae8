mod args;
mod commands;
mod config;
mod io;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit status 2: the input or configuration is unusable.
const EXIT_INPUT: u8 = 2;
/// Exit status 3: the data break a statistical precondition.
const EXIT_CONTRACT: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            code: EXIT_INPUT,
        }
    }
}

impl From<cptest::Error> for CliError {
    fn from(e: cptest::Error) -> Self {
        let code = if e.is_contract_violation() {
            EXIT_CONTRACT
        } else {
            EXIT_INPUT
        };
        CliError {
            message: e.to_string(),
            code,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let threads = match &cli.command {
        Command::Test(a) => a.common.threads,
        Command::BenchRoc(a) => a.common.threads,
        Command::BenchPower(a) => a.common.threads,
        Command::Simulate(a) => a.common.threads,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::input("--threads must be positive"));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::input(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match cli.command {
        Command::Test(a) => commands::test(&a),
        Command::BenchRoc(a) => commands::bench_roc(&a),
        Command::BenchPower(a) => commands::bench_power(&a),
        Command::Simulate(a) => commands::simulate(&a),
    })
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return ExitCode::from(e.code);
        }
    };
    let cli = Cli::parse_from(argv);
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
