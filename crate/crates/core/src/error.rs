// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: expected {expected}, found {found}")]
    QubitMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("time grids do not match")]
    GridMismatch,

    #[error("operator is not Hermitian ({0})")]
    NonHermitian(String),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid Pauli label '{0}'")]
    InvalidPauliLabel(String),

    #[error("unknown gate kind '{0}'")]
    UnknownGate(String),

    #[error("twirl set is empty")]
    EmptyTwirlSet,

    #[error("twirl enumeration needs {needed} assignments, cap is {cap}")]
    EnumerationCapExceeded { needed: u128, cap: usize },

    #[error("twirl assignment covers {found} hard layers, circuit has {expected}")]
    AssignmentMismatch { expected: usize, found: usize },

    #[error("missing noise realization for hard layer {layer}")]
    MissingRealization { layer: usize },

    #[error("expected a hard layer, got an easy layer")]
    NotAHardLayer,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state is not normalized (norm deviates by {0:.3e})")]
    Unnormalized(f64),

    #[error("missing cross-spectrum for correlated sources ({0}, {1})")]
    MissingCrossSpectrum(usize, usize),

    #[error("pulse optimizer did not converge: {0}")]
    NonConvergence(String),

    #[error("first-order error is not correctable: {0}")]
    Uncorrectable(String),

    #[error("scaling fit needs positive data: {0}")]
    NonPositiveData(String),

    #[error("ensemble is empty")]
    EmptyEnsemble,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
