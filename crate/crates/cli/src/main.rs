use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use lambda_holo_core::sweeps::{self, SweepPoint, DURATION_TABLE, FREQUENCY_TABLE};
use lambda_holo_core::{EnvelopeKind, Error, InputState, PropagationConfig};

mod config;
mod output;

use config::{Cli, CommandKind, ConfigError, Format, RunConfig};

enum Failure {
    Config(ConfigError),
    Numerical(Error),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { name, reason } => {
                Failure::Config(ConfigError::new(name, reason))
            }
            e if e.is_numerical() => Failure::Numerical(e),
            e => Failure::Config(ConfigError::new("input", e)),
        }
    }
}

fn evaluate(c: &RunConfig, propagation: &PropagationConfig) -> Result<Vec<SweepPoint>, Error> {
    let gates = c.preset.gates();
    match c.command {
        CommandKind::Table1 => sweeps::frequency_sweep(
            &FREQUENCY_TABLE,
            &gates,
            c.kind,
            &c.shape,
            c.tau,
            c.input,
            propagation,
        ),
        CommandKind::Table2 => sweeps::envelope_input_sweep(
            &EnvelopeKind::ALL,
            &InputState::PAULI_EIGENSTATES,
            &c.sys,
            &c.gate,
            &c.shape,
            c.tau,
            propagation,
        ),
        CommandKind::Table3 => sweeps::duration_sweep(
            &DURATION_TABLE,
            &EnvelopeKind::ALL,
            &c.sys,
            &c.gate,
            &c.shape,
            c.input,
            propagation,
        ),
        CommandKind::Fig1 => {
            let (lo, hi, n) = c.grid;
            let taus = sweeps::log_grid(lo, hi, n)?;
            sweeps::averaged_duration_sweep(&taus, &gates, &c.sys, c.kind, &c.shape, propagation)
        }
        CommandKind::Fig2 => {
            let (lo, hi, n) = c.grid;
            let taus = sweeps::log_grid(lo, hi, n)?;
            let [not, hadamard] = gates;
            sweeps::sequence_sweep(
                &taus,
                &c.sys,
                &hadamard,
                &not,
                c.kind,
                &c.shape,
                propagation,
            )
        }
        CommandKind::Run => sweeps::duration_sweep(
            &[c.tau],
            &[c.kind],
            &c.sys,
            &c.gate,
            &c.shape,
            c.input,
            propagation,
        ),
    }
}

fn execute(c: &RunConfig) -> Result<Vec<u8>, Failure> {
    let points = evaluate(c, &c.propagation)?;
    if let Some(tol) = c.convergence_tol {
        let fine = evaluate(c, &c.propagation.refined())?;
        sweeps::check_convergence(&points, &fine, tol)?;
    }
    Ok(match c.format {
        Format::Csv => output::csv(&points).map_err(|e| ConfigError::new("output", e))?,
        Format::Json => output::json(&points),
    })
}

fn run() -> Result<(), Failure> {
    let (kind, options) = Cli::parse().command.split();
    let c = RunConfig::resolve(kind, options)?;
    let bytes = execute(&c)?;
    match &c.output {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| ConfigError::new("output", format!("{}: {e}", path.display())))?,
        None => std::io::stdout()
            .lock()
            .write_all(&bytes)
            .map_err(|e| ConfigError::new("output", e))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Config(e)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}
