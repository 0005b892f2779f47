//! `quadmap` command-line front end.
//!
//! Exit codes: 0 success, 1 a check or tolerance failed, 2 bad input or
//! configuration.

mod commands;
mod settings;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use settings::{CliError, GlobalOpts, Settings, SolveOpts};

#[derive(Debug, Parser)]
#[command(name = "quadmap", version, about = "Quadratic oscillator-atom maps: verification, spectra and duality")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every transform and operator check for a family.
    Verify,
    /// Map oscillator coordinates u to atom coordinates x.
    Map {
        #[arg(required = true, allow_negative_numbers = true)]
        coords: Vec<f64>,
    },
    /// Tabulate the dual closed-form spectra up to --nmax.
    Spectrum,
    /// Solve one radial eigenproblem and compare with the textbook levels.
    Solve {
        #[command(flatten)]
        extra: SolveOpts,
    },
    /// Solve the atom, map each level to its dual oscillator and solve that.
    Duality,
    /// Print the signed-index template of a family.
    EmitMatrix,
}

fn run(cli: &Cli) -> Result<commands::Outcome, CliError> {
    let no_extra = SolveOpts::default();
    let extra = match &cli.command {
        Command::Solve { extra } => extra,
        _ => &no_extra,
    };
    let s = Settings::resolve(&cli.opts, extra)?;
    match &cli.command {
        Command::Verify => commands::verify(&s),
        Command::Map { coords } => commands::map(&s, coords),
        Command::Spectrum => commands::spectrum(&s),
        Command::Solve { .. } => commands::solve_cmd(&s),
        Command::Duality => commands::duality(&s),
        Command::EmitMatrix => commands::emit_matrix(&s),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(outcome.stdout.as_bytes());
            let _ = out.flush();
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                if let Some(d) = outcome.diagnostics {
                    eprintln!("quadmap: {d}");
                }
                ExitCode::from(1)
            }
        }
        Err(CliError::Config(msg)) => {
            eprintln!("quadmap: {msg}");
            ExitCode::from(2)
        }
    }
}
