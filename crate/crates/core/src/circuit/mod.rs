// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Layered circuit model: noisy hard layers, noiseless easy layers,
//! front-propagated error trajectories, and the exact reference simulator.
//!
//! Front propagation follows the toggling-frame convention: each hard
//! layer's local error acts immediately before its ideal gate, so pushing
//! it to the start of the circuit conjugates the error phase by the ideal
//! circuit accumulated *before* that layer. Conjugation by a unitary is an
//! isometry of the error space, so every front-propagated step keeps its
//! local norm.

pub mod presets;

use std::collections::HashMap;
use std::hash::Hasher;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{
    first_order_error, magnus_orders, toggling_frame_curve, ErrorCurve, ErrorVector,
};
use crate::linalg::{self, dagger, identity, phase_aligned_distance, CMat, CVec};
use crate::pauli::PauliBasis;
use crate::schedule::{propagate_noiseless, propagate_noisy, HamiltonianSchedule, Propagation};
use crate::spectra::{synthesize_realization, NoiseRealization};

/// Noiseless layer folded in as a plain unitary.
#[derive(Debug, Clone)]
pub struct EasyLayer {
    pub label: String,
    pub unitary: CMat,
}

#[derive(Debug)]
pub struct HardLayerData {
    pub label: String,
    pub schedule: HamiltonianSchedule,
    pub propagation: Propagation,
    pub target: CMat,
    pub curves: Vec<ErrorCurve>,
}

/// Noisy layer with its precomputed ideal propagation and error curves.
/// Cloning shares the data, so repeated layers in deep circuits cost
/// nothing extra.
#[derive(Debug, Clone)]
pub struct HardLayer {
    data: Arc<HardLayerData>,
}

impl HardLayer {
    /// Build from a schedule; the stored ideal gate is the propagated
    /// noiseless unitary.
    pub fn new(label: impl Into<String>, schedule: HamiltonianSchedule) -> Result<HardLayer> {
        let propagation = propagate_noiseless(&schedule)?;
        let target = propagation.final_unitary().clone();
        Self::assemble(label.into(), schedule, propagation, target)
    }

    /// Build with an externally named target, checked against the
    /// propagated unitary up to a global phase (tolerance 1e−8).
    pub fn with_target(
        label: impl Into<String>,
        schedule: HamiltonianSchedule,
        target: CMat,
    ) -> Result<HardLayer> {
        let propagation = propagate_noiseless(&schedule)?;
        let defect = phase_aligned_distance(propagation.final_unitary(), &target);
        if defect > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "stored target deviates from propagated gate by {defect:.3e}"
            )));
        }
        Self::assemble(label.into(), schedule, propagation, target)
    }

    fn assemble(
        label: String,
        schedule: HamiltonianSchedule,
        propagation: Propagation,
        target: CMat,
    ) -> Result<HardLayer> {
        let curves = (0..schedule.noise().len())
            .map(|i| toggling_frame_curve(&schedule, &propagation, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(HardLayer {
            data: Arc::new(HardLayerData {
                label,
                schedule,
                propagation,
                target,
                curves,
            }),
        })
    }

    pub fn label(&self) -> &str {
        &self.data.label
    }

    pub fn schedule(&self) -> &HamiltonianSchedule {
        &self.data.schedule
    }

    pub fn propagation(&self) -> &Propagation {
        &self.data.propagation
    }

    pub fn target(&self) -> &CMat {
        &self.data.target
    }

    pub fn curves(&self) -> &[ErrorCurve] {
        &self.data.curves
    }

    fn data_ptr(&self) -> usize {
        Arc::as_ptr(&self.data) as usize
    }
}

#[derive(Debug, Clone)]
pub enum Layer {
    Hard(HardLayer),
    Easy(EasyLayer),
}

impl Layer {
    pub fn qubits_dim(&self) -> usize {
        match self {
            Layer::Hard(h) => h.target().nrows(),
            Layer::Easy(e) => e.unitary.nrows(),
        }
    }

    pub fn ideal_unitary(&self) -> &CMat {
        match self {
            Layer::Hard(h) => h.target(),
            Layer::Easy(e) => &e.unitary,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Circuit {
    qubits: usize,
    layers: Vec<Layer>,
}

impl Circuit {
    pub fn new(qubits: usize) -> Circuit {
        Circuit {
            qubits,
            layers: Vec::new(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn push_easy(&mut self, label: impl Into<String>, unitary: CMat) -> Result<()> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: unitary.nrows(),
            });
        }
        self.layers.push(Layer::Easy(EasyLayer {
            label: label.into(),
            unitary,
        }));
        Ok(())
    }

    pub fn push_hard(&mut self, layer: HardLayer) -> Result<()> {
        if layer.schedule().qubits() != self.qubits {
            return Err(Error::QubitMismatch {
                expected: self.qubits,
                found: layer.schedule().qubits(),
            });
        }
        self.layers.push(Layer::Hard(layer));
        Ok(())
    }

    pub fn push_layer(&mut self, layer: Layer) -> Result<()> {
        match layer {
            Layer::Hard(h) => self.push_hard(h),
            Layer::Easy(e) => self.push_easy(e.label, e.unitary),
        }
    }

    pub fn hard_layer_count(&self) -> usize {
        self.layers
            .iter()
            .filter(|l| matches!(l, Layer::Hard(_)))
            .count()
    }

    pub fn hard_layers(&self) -> impl Iterator<Item = &HardLayer> {
        self.layers.iter().filter_map(|l| match l {
            Layer::Hard(h) => Some(h),
            Layer::Easy(_) => None,
        })
    }

    /// Product of all ideal layer unitaries.
    pub fn ideal_unitary(&self) -> CMat {
        let mut u = identity(self.dim());
        for layer in &self.layers {
            u = layer.ideal_unitary().dot(&u);
        }
        u
    }
}

/// Which perturbative orders feed the local error step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorOrder {
    First,
    FirstAndSecond,
}

/// How quasi-static draws relate across layers of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealizationMode {
    /// One draw per (run, source), reused by every hard layer: slow drift.
    SharedAcrossLayers,
    /// Fresh draw per (run, layer, source).
    IndependentPerLayer,
}

/// Noise realizations for every hard layer of a circuit, in hard-layer
/// order.
#[derive(Debug, Clone)]
pub struct CircuitNoise {
    per_layer: Vec<Vec<NoiseRealization>>,
}

impl CircuitNoise {
    pub fn from_realizations(per_layer: Vec<Vec<NoiseRealization>>) -> CircuitNoise {
        CircuitNoise { per_layer }
    }

    /// The same constant strength for every noise term of every hard layer
    /// (a deterministic miscalibration).
    pub fn constant(circuit: &Circuit, value: f64) -> CircuitNoise {
        let per_layer = circuit
            .hard_layers()
            .map(|h| vec![NoiseRealization::constant(value); h.schedule().noise().len()])
            .collect();
        CircuitNoise { per_layer }
    }

    /// Draw from each noise term's own process. Streams are derived from
    /// (master seed, run index, layer, source) so results are independent
    /// of evaluation order; in shared mode the layer tag is dropped and
    /// every hard layer sees the same draw.
    pub fn draw(
        circuit: &Circuit,
        master_seed: u64,
        run_index: u64,
        mode: RealizationMode,
    ) -> Result<CircuitNoise> {
        let mut per_layer = Vec::with_capacity(circuit.hard_layer_count());
        for (ordinal, hard) in circuit.hard_layers().enumerate() {
            let mut row = Vec::with_capacity(hard.schedule().noise().len());
            for (source, term) in hard.schedule().noise().iter().enumerate() {
                let tags = match mode {
                    RealizationMode::SharedAcrossLayers => {
                        vec![1u64, run_index, source as u64]
                    }
                    RealizationMode::IndependentPerLayer => {
                        vec![2u64, run_index, ordinal as u64, source as u64]
                    }
                };
                row.push(synthesize_realization(
                    &term.process,
                    hard.schedule().grid(),
                    master_seed,
                    &tags,
                )?);
            }
            per_layer.push(row);
        }
        Ok(CircuitNoise { per_layer })
    }

    pub fn layer(&self, ordinal: usize) -> Result<&[NoiseRealization]> {
        self.per_layer
            .get(ordinal)
            .map(|v| v.as_slice())
            .ok_or(Error::MissingRealization { layer: ordinal })
    }

    pub fn layer_count(&self) -> usize {
        self.per_layer.len()
    }
}

/// Local error step of one hard layer: first-order by default, optionally
/// with the second-order commutator term.
pub fn layer_local_error(
    layer: &Layer,
    realizations: &[NoiseRealization],
    order: ErrorOrder,
) -> Result<ErrorVector> {
    let hard = match layer {
        Layer::Hard(h) => h,
        Layer::Easy(_) => return Err(Error::NotAHardLayer),
    };
    if realizations.len() != hard.curves().len() {
        return Err(Error::MissingRealization {
            layer: realizations.len(),
        });
    }
    let curves: Vec<&ErrorCurve> = hard.curves().iter().collect();
    let reals: Vec<&NoiseRealization> = realizations.iter().collect();
    match order {
        ErrorOrder::First => {
            let mut r = ErrorVector::zeros(hard.schedule().qubits());
            for (c, real) in curves.iter().zip(&reals) {
                r.add_assign(&first_order_error(c, real)?);
            }
            Ok(r)
        }
        ErrorOrder::FirstAndSecond => Ok(magnus_orders(&curves, &reals)?.total()),
    }
}

/// Front-propagated error path: one step per hard layer, with cumulative
/// sums and distances.
#[derive(Debug, Clone)]
pub struct ErrorTrajectory {
    steps: Vec<ErrorVector>,
    cumulative: Vec<ErrorVector>,
    distances: Vec<f64>,
}

impl ErrorTrajectory {
    pub fn steps(&self) -> &[ErrorVector] {
        &self.steps
    }

    pub fn cumulative(&self) -> &[ErrorVector] {
        &self.cumulative
    }

    /// ‖Σ_{k≤i} R⁽ᵏ⁾‖ per depth i (1-based step count).
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// Trajectory CSV: depth, cumulative distance, then cumulative
    /// components of the final top-`k` axes by magnitude.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W, top_k: usize) -> Result<()> {
        let axes = match self.cumulative.last() {
            Some(total) => total.top_axes(top_k),
            None => Vec::new(),
        };
        write!(w, "depth,distance")?;
        for (axis, _) in &axes {
            write!(w, ",{axis}")?;
        }
        writeln!(w)?;
        for (i, (dist, cum)) in self.distances.iter().zip(&self.cumulative).enumerate() {
            write!(w, "{},{:.16e}", i + 1, dist)?;
            for (axis, _) in &axes {
                write!(w, ",{:.16e}", cum.component(axis))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Move every hard layer's local error to the beginning of the circuit:
/// step i is the local error conjugated by the ideal circuit before layer i.
pub fn propagate_error_front(
    circuit: &Circuit,
    noise: &CircuitNoise,
    order: ErrorOrder,
) -> Result<ErrorTrajectory> {
    let basis = PauliBasis::new(circuit.qubits());
    let mut c_prev = identity(circuit.dim());
    let mut steps = Vec::with_capacity(circuit.hard_layer_count());
    let mut cumulative = Vec::with_capacity(circuit.hard_layer_count());
    let mut distances = Vec::with_capacity(circuit.hard_layer_count());
    let mut running = ErrorVector::zeros(circuit.qubits());
    let mut ordinal = 0usize;

    for layer in circuit.layers() {
        match layer {
            Layer::Easy(e) => {
                c_prev = e.unitary.dot(&c_prev);
            }
            Layer::Hard(h) => {
                let r_lo = layer_local_error(layer, noise.layer(ordinal)?, order)?;
                let phi_lo = r_lo.phase_operator(&basis);
                let phi_front = dagger(&c_prev).dot(&phi_lo).dot(&c_prev);
                let step = ErrorVector::from_expansion(
                    circuit.qubits(),
                    &basis.expand(&phi_front)?,
                )?;
                running.add_assign(&step);
                steps.push(step);
                cumulative.push(running.clone());
                distances.push(running.norm());
                c_prev = h.target().dot(&c_prev);
                ordinal += 1;
            }
        }
    }
    Ok(ErrorTrajectory {
        steps,
        cumulative,
        distances,
    })
}

/// Total error phase vector Σ_i R⁽ⁱ⁾ and its Euclidean distance.
pub fn total_error_phase(trajectory: &ErrorTrajectory) -> Result<(ErrorVector, f64)> {
    let total = trajectory
        .cumulative
        .last()
        .ok_or_else(|| Error::InvalidParameter("empty trajectory".into()))?
        .clone();
    let distance = total.norm();
    Ok((total, distance))
}

/// Result of a full noisy propagation.
#[derive(Debug, Clone)]
pub struct ExactRun {
    pub unitary: CMat,
    pub final_state: Option<CVec>,
}

fn realization_fingerprint(reals: &[NoiseRealization]) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    for r in reals {
        r.fingerprint(&mut h);
    }
    h.finish()
}

/// Exact noisy propagation, layer by layer on a `refine`-times finer grid
/// (the ground-truth oracle for the perturbative machinery). Identical
/// repeated hard layers with identical realizations are propagated once.
pub fn simulate_exact(
    circuit: &Circuit,
    noise: &CircuitNoise,
    initial: Option<&CVec>,
    refine: usize,
) -> Result<ExactRun> {
    if let Some(state) = initial {
        if state.len() != circuit.dim() {
            return Err(Error::DimensionMismatch {
                expected: circuit.dim(),
                found: state.len(),
            });
        }
        let norm: f64 = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Unnormalized((norm - 1.0).abs()));
        }
    }

    let mut cache: HashMap<(usize, u64), CMat> = HashMap::new();
    let mut u_total = identity(circuit.dim());
    let mut ordinal = 0usize;
    for layer in circuit.layers() {
        match layer {
            Layer::Easy(e) => {
                u_total = e.unitary.dot(&u_total);
            }
            Layer::Hard(h) => {
                let reals = noise.layer(ordinal)?;
                let key = (h.data_ptr(), realization_fingerprint(reals));
                let u_layer = match cache.get(&key) {
                    Some(u) => u.clone(),
                    None => {
                        let u = propagate_noisy(h.schedule(), reals, refine)?;
                        cache.insert(key, u.clone());
                        u
                    }
                };
                u_total = u_layer.dot(&u_total);
                ordinal += 1;
            }
        }
    }

    debug_assert!(
        linalg::unitarity_defect(&u_total) < 1e-10,
        "noisy propagation lost unitarity"
    );

    let final_state = initial.map(|psi| u_total.dot(psi));
    if let Some(out) = &final_state {
        let norm: f64 = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        debug_assert!((norm - 1.0).abs() < 1e-12, "norm drift {}", (norm - 1.0).abs());
    }
    Ok(ExactRun {
        unitary: u_total,
        final_state,
    })
}
