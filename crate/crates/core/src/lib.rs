// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Geometric analysis of coherent and stochastic noise in few-qubit
//! circuits.
//!
//! Noise accumulated by a gate is a vector in the error geometric space:
//! one real axis per non-identity Pauli operator, 4^m − 1 axes for m
//! qubits. A gate's noise traces a curve in this space (module
//! [`geometry`]); a circuit walks through it one front-propagated step
//! per hard layer ([`circuit`]); Pauli twirling randomizes the step signs
//! and turns coherent drift into a random walk ([`twirl`]); averaging over
//! twirls leaves a Pauli channel whose transfer matrix and perturbative
//! diagonal live in [`channel`]; noise processes, filter functions and
//! error second moments in [`spectra`]; fidelities and scaling fits in
//! [`metrics`].
//!
//! Everything downstream of a master seed is deterministic: RNG streams
//! are derived per (run, layer, source), ensembles collect in index order,
//! and reductions use a fixed pairwise tree, so results are bit-identical
//! across thread counts. The `parallel` feature (default) fans ensembles
//! out over rayon; disabling it swaps in a sequential fallback with
//! identical output.

pub mod channel;
pub mod circuit;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod pauli;
pub mod quad;
pub mod schedule;
pub mod spectra;
pub mod twirl;

pub use error::{Error, Result};

pub use channel::{
    analytic_twirled_diagonal, analytic_twirled_diagonal_moments, ptm_diagnostics,
    ChannelExpansion, ExpansionOrder, Ptm, PtmDiagnostics,
};
pub use circuit::{
    layer_local_error, presets, propagate_error_front, simulate_exact, total_error_phase,
    Circuit, CircuitNoise, EasyLayer, ErrorOrder, ErrorTrajectory, ExactRun, HardLayer, Layer,
    RealizationMode,
};
pub use geometry::{
    error_unitary, first_order_error, magnus_orders, second_order_error, toggling_frame_curve,
    ErrorCurve, ErrorVector, MagnusOrders,
};
pub use linalg::{CMat, CVec};
pub use metrics::{
    error_walk_ensemble, fit_scaling_exponent, rc_average_fidelity, state_fidelity_density,
    state_fidelity_pure, ExponentFit, FidelityEstimate, NoiseSource, ScalingSeries, TwirlShots,
    WalkStats,
};
pub use pauli::{
    all_paulis, commutes, expand_in_pauli_basis, pauli_mul, Pauli, PauliBasis, PauliString,
    PauliSum, Phase,
};
pub use schedule::{
    cnot_composite, export_pulse, import_pulse, iswap_schedule, iswap_target, make_gate,
    optimizer, propagate_noiseless, propagate_noisy, single_qubit_clifford, xx_halfpi_schedule,
    xx_halfpi_target, CompositeFragment, Coupling, Gate, GateKind, HamiltonianSchedule,
    NoiseTerm, Propagation, PulseShape, TimeGrid,
};
pub use spectra::{
    filter_function, second_moment, synthesize_realization, white_noise_moment_time_route,
    NoiseProcess, NoiseRealization, OmegaGrid, SecondMoment, SpectralModel, Spectrum,
};
pub use twirl::{
    apply_twirls, dress_error, enumerate_assignments, sample_twirls, TwirlAssignment, TwirlSet,
};
