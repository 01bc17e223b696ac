//! `walkzeta` command-line front end.
//!
//! Output schemas:
//! - `coin`: the coin record `{model, states, shift_kind, entries}` (entries
//!   row-major as `[re, im]`), or `matrix,row,col,re,im` rows. OQRW models
//!   emit both Kraus matrices.
//! - `evolve`: `{config, p, measures}` with `measures[n][site]`, or CSV
//!   `n,site,x1..xd,mu`.
//! - `zeta`: a list of evaluations, or CSV
//!   `u_re,u_im,re,im,log_re,log_im,imag_residual,branch_risk`.
//! - `zeta-limit`: a list of `{value, coarse, abs_diff, tol}`, or CSV
//!   `u_re,u_im,re,im,coarse_re,coarse_im,abs_diff,grid_m`.
//! - `cr`: a list of `{method, values}`, or CSV `r,re,im,method`.
//! - `verify`: `{passed, suites: [{suite, passed, metric, value, tol, detail}]}`,
//!   or CSV `suite,passed,metric,value,tol`.
//!
//! Complex numbers are `[re, im]` in JSON and paired columns in CSV, written
//! with 17 significant digits. Exit status is 2 for bad configuration, 1 when
//! a verification fails and 0 otherwise. `WALK_ZETA_THREADS` caps the worker
//! pool.

use std::process::ExitCode;

use clap::Parser;

mod args;
mod commands;
mod model;
mod verify;

use args::{Cli, Command};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Failed(String),
}

impl From<walkzeta::Error> for CliError {
    fn from(e: walkzeta::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("WALK_ZETA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("WALK_ZETA_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot build worker pool: {e}")))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    init_threads()?;
    let (text, passed) = match cli.command {
        Command::Coin => (commands::coin(cli)?, true),
        Command::Evolve => (commands::evolve(cli)?, true),
        Command::Zeta => (commands::zeta(cli)?, true),
        Command::ZetaLimit => (commands::zeta_limit(cli)?, true),
        Command::Cr => (commands::cr(cli)?, true),
        Command::Verify => verify::run(cli)?,
    };
    match &cli.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?
        }
        None => print!("{text}"),
    }
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
