mod args;
mod commands;
mod format;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Failure, Output};

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Spectrum {
            range,
            common,
            zeros,
            oracle_cap,
        } => commands::spectrum(range, common, *zeros, *oracle_cap),
        Command::Table { range, common } => commands::table(range, common),
        Command::States {
            j,
            sector,
            zeta,
            common,
        } => commands::states(*j, sector.as_deref(), *zeta, common),
        Command::Verify {
            range,
            common,
            state_cap,
            inject_fault,
        } => commands::verify(range, common, *state_cap, *inject_fault),
        Command::Gaps {
            range,
            common,
            step,
            threshold,
        } => commands::gaps(range, common, *step, *threshold),
    }
}

fn out_path(cli: &Cli) -> Option<&std::path::Path> {
    let common = match &cli.command {
        Command::Spectrum { common, .. }
        | Command::Table { common, .. }
        | Command::States { common, .. }
        | Command::Verify { common, .. }
        | Command::Gaps { common, .. } => common,
    };
    common.out.as_deref()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match run(&cli) {
        Ok(o) => o,
        Err(f) => {
            eprintln!("tact: {}", f.message());
            return ExitCode::from(f.exit_code());
        }
    };
    let written = match out_path(&cli) {
        Some(path) => std::fs::write(path, &output.body),
        None => std::io::stdout().lock().write_all(output.body.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("tact: cannot write output: {e}");
        return ExitCode::from(3);
    }
    match output.violation {
        Some(v) => {
            eprintln!("tact: {v}");
            ExitCode::from(1)
        }
        None => ExitCode::SUCCESS,
    }
}
