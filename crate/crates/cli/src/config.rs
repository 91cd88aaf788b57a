// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! JSON experiment configuration. Unknown keys are rejected so typos fail
//! fast; semantic checks name the offending key path. The resolved config
//! (after CLI-flag overrides) is echoed into every output artifact
//! together with its hash, so any run can be replayed exactly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qtailor::RealizationMode;

use crate::error::{CliError, CliResult};

fn default_deltas() -> Vec<f64> {
    vec![0.01]
}

fn default_g() -> f64 {
    1.0
}

fn default_gate_steps() -> usize {
    qtailor::schedule::DEFAULT_STEPS
}

fn default_iswap_steps() -> usize {
    64
}

fn default_layers() -> usize {
    200
}

fn default_hadamards() -> usize {
    74
}

fn default_interleave_seed() -> u64 {
    1
}

fn default_top_axes() -> usize {
    4
}

fn default_shots() -> usize {
    200
}

fn default_true() -> bool {
    true
}

fn default_duration() -> f64 {
    1.0
}

fn default_fourier_terms() -> usize {
    5
}

fn default_mc_shots() -> usize {
    10_000
}

fn default_omega_harmonics() -> f64 {
    64.0
}

fn default_omega_intervals() -> usize {
    1 << 12
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircuitKind {
    IswapChain,
    Cnot,
    CnotHadamardMix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatePair {
    /// |01⟩ against the circuit's ideal output
    Computational,
    /// (|0⟩+|1⟩)|0⟩/√2 against the ideal Bell output
    Bell,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub kind: CircuitKind,
    /// checkpoint depths (hard-layer counts) for walk experiments
    #[serde(default)]
    pub depths: Vec<usize>,
    #[serde(default = "default_g")]
    pub g: f64,
    /// grid steps of the iSWAP layer
    #[serde(default = "default_iswap_steps")]
    pub iswap_steps: usize,
    /// noisy CNOT count in the mixed demo circuit
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_hadamards")]
    pub hadamards: usize,
    #[serde(default = "default_interleave_seed")]
    pub interleave_seed: u64,
    #[serde(default = "default_top_axes")]
    pub top_axes: usize,
    #[serde(default = "StatePair::computational")]
    pub state: StatePair,
}

impl StatePair {
    fn computational() -> StatePair {
        StatePair::Computational
    }
}

impl Default for CircuitSpec {
    fn default() -> CircuitSpec {
        CircuitSpec {
            kind: CircuitKind::Cnot,
            depths: Vec::new(),
            g: default_g(),
            iswap_steps: default_iswap_steps(),
            layers: default_layers(),
            hadamards: default_hadamards(),
            interleave_seed: default_interleave_seed(),
            top_axes: default_top_axes(),
            state: StatePair::Computational,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProcessSpec {
    QuasiStatic {
        #[serde(default)]
        std: f64,
    },
    OrnsteinUhlenbeck {
        std: f64,
        correlation_time: f64,
    },
    White {
        level: f64,
    },
}

impl Default for ProcessSpec {
    fn default() -> ProcessSpec {
        ProcessSpec::QuasiStatic { std: 0.0 }
    }
}

impl ProcessSpec {
    /// Process for a run at strength `delta` (quasi-static means shift with
    /// the strength; stochastic kinds carry their own scales).
    pub fn to_process(self, delta: f64) -> qtailor::NoiseProcess {
        match self {
            ProcessSpec::QuasiStatic { std } => qtailor::NoiseProcess::quasi_static(delta, std),
            ProcessSpec::OrnsteinUhlenbeck {
                std,
                correlation_time,
            } => qtailor::NoiseProcess::OrnsteinUhlenbeck {
                std,
                correlation_time,
            },
            ProcessSpec::White { level } => qtailor::NoiseProcess::White { level },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingSpec {
    /// δH = IZ − ZI + 0.5·ZZ added directly
    Additive,
    /// amplitude noise ε̃(t)·Ω(t) on the drive operator
    Amplitude,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default = "default_deltas")]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub process: ProcessSpec,
    #[serde(default = "NoiseSpec::default_mode")]
    pub mode: RealizationMode,
    /// coupling used by the filter-function experiment
    pub coupling: Option<CouplingSpec>,
    /// Monte Carlo cross-check shots for stochastic processes
    #[serde(default = "default_mc_shots")]
    pub mc_shots: usize,
    /// ω window in units of 2π/T, and trapezoid intervals
    #[serde(default = "default_omega_harmonics")]
    pub omega_harmonics: f64,
    #[serde(default = "default_omega_intervals")]
    pub omega_intervals: usize,
}

impl NoiseSpec {
    fn default_mode() -> RealizationMode {
        RealizationMode::SharedAcrossLayers
    }
}

impl Default for NoiseSpec {
    fn default() -> NoiseSpec {
        NoiseSpec {
            deltas: default_deltas(),
            process: ProcessSpec::default(),
            mode: RealizationMode::SharedAcrossLayers,
            coupling: None,
            mc_shots: default_mc_shots(),
            omega_harmonics: default_omega_harmonics(),
            omega_intervals: default_omega_intervals(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TwirlSetSpec {
    /// "full": all 4^m Paulis
    Named(String),
    /// explicit Pauli labels
    Labels(Vec<String>),
}

impl Default for TwirlSetSpec {
    fn default() -> TwirlSetSpec {
        TwirlSetSpec::Named("full".into())
    }
}

impl TwirlSetSpec {
    pub fn to_set(&self, qubits: usize) -> CliResult<qtailor::TwirlSet> {
        match self {
            TwirlSetSpec::Named(name) if name == "full" => Ok(qtailor::TwirlSet::full(qubits)),
            TwirlSetSpec::Named(other) => Err(CliError::Config(format!(
                "twirl.set: unknown named set '{other}' (only \"full\" or a label list)"
            ))),
            TwirlSetSpec::Labels(labels) => {
                let paulis = labels
                    .iter()
                    .map(|l| qtailor::PauliString::parse(l))
                    .collect::<qtailor::Result<Vec<_>>>()
                    .map_err(|e| CliError::Config(format!("twirl.set: {e}")))?;
                qtailor::TwirlSet::reduced(paulis)
                    .map_err(|e| CliError::Config(format!("twirl.set: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwirlSpec {
    #[serde(default)]
    pub set: TwirlSetSpec,
    #[serde(default = "default_shots")]
    pub shots: usize,
    #[serde(default = "default_true")]
    pub enumerate: bool,
}

impl Default for TwirlSpec {
    fn default() -> TwirlSpec {
        TwirlSpec {
            set: TwirlSetSpec::default(),
            shots: default_shots(),
            enumerate: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseKind {
    Cosine,
    Imported,
    Optimized,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub kind: PulseKind,
    /// pulse file for `imported`
    pub path: Option<PathBuf>,
    #[serde(default = "default_gate_steps")]
    pub steps: usize,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default = "default_fourier_terms")]
    pub fourier_terms: usize,
}

impl Default for PulseSpec {
    fn default() -> PulseSpec {
        PulseSpec {
            kind: PulseKind::Cosine,
            path: None,
            steps: default_gate_steps(),
            duration: default_duration(),
            fourier_terms: default_fourier_terms(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// optional echo of the experiment name; checked against the subcommand
    pub experiment: Option<String>,
    #[serde(default)]
    pub circuit: CircuitSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    #[serde(default)]
    pub twirl: TwirlSpec,
    #[serde(default)]
    pub pulse: PulseSpec,
    pub output_dir: Option<PathBuf>,
    pub master_seed: Option<u64>,
}

/// Config after CLI-flag overrides; this exact value is hashed and echoed.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub experiment: String,
    pub circuit: CircuitSpec,
    pub noise: NoiseSpec,
    pub twirl: TwirlSpec,
    pub pulse: PulseSpec,
    pub output_dir: PathBuf,
    pub master_seed: u64,
}

pub fn load_config(path: Option<&Path>) -> CliResult<ExperimentConfig> {
    match path {
        None => Ok(ExperimentConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

pub fn resolve(
    config: ExperimentConfig,
    experiment: &str,
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> CliResult<ResolvedConfig> {
    if let Some(named) = &config.experiment {
        if named != experiment {
            return Err(CliError::Config(format!(
                "experiment: config says '{named}' but the '{experiment}' subcommand was invoked"
            )));
        }
    }
    let resolved = ResolvedConfig {
        experiment: experiment.to_string(),
        circuit: config.circuit,
        noise: config.noise,
        twirl: config.twirl,
        pulse: config.pulse,
        output_dir: out
            .or(config.output_dir)
            .unwrap_or_else(|| PathBuf::from("out")),
        master_seed: seed.or(config.master_seed).unwrap_or(0),
    };
    validate(&resolved)?;
    Ok(resolved)
}

fn validate(cfg: &ResolvedConfig) -> CliResult<()> {
    let fail = |msg: String| Err(CliError::Config(msg));
    if cfg.noise.deltas.is_empty() {
        return fail("noise.deltas: must not be empty".into());
    }
    if cfg.noise.deltas.iter().any(|d| !d.is_finite()) {
        return fail("noise.deltas: entries must be finite".into());
    }
    if cfg.pulse.steps + 1 < 16 {
        return fail(format!(
            "pulse.steps: need at least 15 steps (16 samples), got {}",
            cfg.pulse.steps
        ));
    }
    if !cfg.pulse.duration.is_finite() || cfg.pulse.duration <= 0.0 {
        return fail(format!(
            "pulse.duration: must be positive, got {}",
            cfg.pulse.duration
        ));
    }
    if cfg.pulse.kind == PulseKind::Imported && cfg.pulse.path.is_none() {
        return fail("pulse.path: required when pulse.kind is \"imported\"".into());
    }
    if cfg.pulse.fourier_terms < 3 {
        return fail(format!(
            "pulse.fourier_terms: need at least 3, got {}",
            cfg.pulse.fourier_terms
        ));
    }
    if cfg.twirl.shots == 0 {
        return fail("twirl.shots: must be at least 1".into());
    }
    match cfg.experiment.as_str() {
        "filter-function" => {
            // the ω window must not cross the grid's Nyquist frequency,
            // where the sampled filter function aliases
            if (cfg.pulse.steps as f64) < 2.0 * cfg.noise.omega_harmonics {
                return fail(format!(
                    "pulse.steps: {} steps cannot resolve noise.omega_harmonics = {}                      (need at least twice as many steps as harmonics)",
                    cfg.pulse.steps, cfg.noise.omega_harmonics
                ));
            }
        }
        "error-walk" => {
            if cfg.circuit.depths.is_empty() {
                return fail("circuit.depths: required for error-walk".into());
            }
            let max = match cfg.circuit.kind {
                CircuitKind::CnotHadamardMix => cfg.circuit.layers,
                _ => *cfg.circuit.depths.iter().max().unwrap(),
            };
            if cfg.circuit.depths.iter().any(|&d| d == 0 || d > max) {
                return fail(format!("circuit.depths: entries must lie in 1..={max}"));
            }
            if cfg.circuit.kind == CircuitKind::Cnot {
                return fail(
                    "circuit.kind: error-walk runs on \"iswap-chain\" or \"cnot-hadamard-mix\""
                        .into(),
                );
            }
        }
        "fidelity-sweep" | "ptm" if cfg.circuit.kind == CircuitKind::CnotHadamardMix => {
            return fail(format!(
                "circuit.kind: {} runs on single-layer circuits (\"cnot\" or \"iswap-chain\")",
                cfg.experiment
            ));
        }
        _ => {}
    }
    Ok(())
}
