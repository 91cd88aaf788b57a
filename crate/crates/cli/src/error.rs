// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Exit code 2: the run never started (bad config, bad paths, bad shapes).
/// Exit code 3: the run completed arithmetic but a numerical contract
/// (Parseval identity, Monte Carlo agreement, optimizer convergence) failed.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical check failed: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<qtailor::Error> for CliError {
    fn from(err: qtailor::Error) -> CliError {
        match err {
            qtailor::Error::NonConvergence(msg) | qtailor::Error::Uncorrectable(msg) => {
                CliError::Numerical(msg)
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> CliError {
        CliError::Config(format!("io: {err}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
