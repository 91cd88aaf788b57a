// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Experiment runner on top of the `qtailor` library: parses a JSON
//! config, runs named experiments, and writes CSV/JSON artifacts whose
//! bytes depend only on the config and master seed.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

pub use config::{load_config, resolve, ExperimentConfig, ResolvedConfig};
pub use error::{CliError, CliResult};
