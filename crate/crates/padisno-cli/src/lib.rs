//! Experiment front end for the `padisno` solvers.
//!
//! Four subcommands are exposed by the `padisno` binary:
//!
//! * `solve`   — one configured run, written as a trajectory CSV;
//! * `fig1`    — the 2-D parameter-grid experiment (6 alpha x 13 beta cells
//!   plus a FISTA-style reference), one CSV per cell and a summary CSV;
//! * `restore` — blur + salt-and-pepper image restoration with a
//!   wavelet-l0 regularizer, writing per-iteration ISNR and the restored
//!   image as binary PGM;
//! * `rates`   — empirical convergence-regime classification of a
//!   trajectory CSV against a known objective value.
//!
//! Exit codes: 0 success, 1 runtime failure (including `solve` stopping on
//! its iteration budget), 2 usage or config errors, 3 step-size gate
//! violations.

pub mod config;
pub mod csvio;
pub mod fig1;
pub mod rates;
pub mod restore;
pub mod solve;

use std::process::ExitCode;

/// Command-level errors with their process exit codes.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad invocation, config file or input data (exit 2).
    #[error("{0}")]
    Usage(String),
    /// Step size at or above the admissible bound without an override
    /// (exit 3).
    #[error("{0}")]
    StepGate(String),
    /// I/O or numerical failure while running (exit 1).
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Runtime(_) => ExitCode::from(1),
            CliError::Usage(_) => ExitCode::from(2),
            CliError::StepGate(_) => ExitCode::from(3),
        }
    }
}

impl From<padisno::Error> for CliError {
    fn from(err: padisno::Error) -> Self {
        match err {
            padisno::Error::StepSizeRejected { .. } => CliError::StepGate(err.to_string()),
            padisno::Error::InvalidParameter(_)
            | padisno::Error::DimensionMismatch { .. }
            | padisno::Error::Format(_) => CliError::Usage(err.to_string()),
            padisno::Error::Oracle(_) | padisno::Error::Numerical(_) => {
                CliError::Runtime(err.to_string())
            }
            padisno::Error::Io(e) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Runtime(err.to_string())
    }
}
