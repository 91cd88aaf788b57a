// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time-dependent Hamiltonians: pulses, noise terms, standard gate
//! constructors and propagation.
//!
//! Propagation uses piecewise-constant midpoint-rule exponential stepping:
//! over each step the Hamiltonian is frozen at the midpoint value (pulse
//! samples averaged between the bracketing grid points) and exponentiated,
//! so every step is exactly unitary and the global error is O(dt²). The
//! default grid is 512 steps per gate.

pub mod optimizer;

use std::path::Path;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, expm, identity, phase_aligned_distance, CMat};
use crate::pauli::{PauliString, PauliSum};
use crate::quad::trapezoid;
use crate::spectra::{NoiseProcess, NoiseRealization};

pub const DEFAULT_STEPS: usize = 512;

/// Uniform time grid over [0, T] with `steps` intervals (`steps + 1` points).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    duration: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(duration: f64, steps: usize) -> Result<TimeGrid> {
        if !duration.is_finite() || duration <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "grid duration must be positive, got {duration}"
            )));
        }
        if steps + 1 < 16 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 16 samples, got {}",
                steps + 1
            )));
        }
        Ok(TimeGrid { duration, steps })
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn points(&self) -> usize {
        self.steps + 1
    }

    pub fn dt(&self) -> f64 {
        self.duration / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.points()).map(|k| self.time(k)).collect()
    }
}

/// Real amplitude samples Ω(t_k) on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseShape {
    grid: TimeGrid,
    amplitudes: Vec<f64>,
}

impl PulseShape {
    pub fn from_samples(grid: TimeGrid, amplitudes: Vec<f64>) -> Result<PulseShape> {
        if amplitudes.len() != grid.points() {
            return Err(Error::InvalidPulse(format!(
                "expected {} samples, got {}",
                grid.points(),
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidPulse("non-finite amplitude sample".into()));
        }
        Ok(PulseShape { grid, amplitudes })
    }

    pub fn constant(grid: TimeGrid, value: f64) -> PulseShape {
        PulseShape {
            grid,
            amplitudes: vec![value; grid.points()],
        }
    }

    /// The "trivial" shape Ω(t) = A·(1 − cos(2πt/T)), scaled to `area`.
    pub fn cosine(grid: TimeGrid, area: f64) -> PulseShape {
        let t_total = grid.duration();
        let a = area / t_total;
        let amplitudes = (0..grid.points())
            .map(|k| {
                let t = grid.time(k);
                a * (1.0 - (2.0 * std::f64::consts::PI * t / t_total).cos())
            })
            .collect();
        PulseShape { grid, amplitudes }
    }

    /// Σ_k c_k (1 − cos(2πk t/T)); the optimizer's search family.
    pub fn fourier_series(grid: TimeGrid, coeffs: &[f64]) -> PulseShape {
        let t_total = grid.duration();
        let amplitudes = (0..grid.points())
            .map(|k| {
                let t = grid.time(k);
                coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let harmonic = (i + 1) as f64;
                        c * (1.0 - (2.0 * std::f64::consts::PI * harmonic * t / t_total).cos())
                    })
                    .sum()
            })
            .collect();
        PulseShape { grid, amplitudes }
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn area(&self) -> f64 {
        trapezoid(&self.amplitudes, self.grid.dt())
    }

    /// Rescale amplitudes so the trapezoidal area equals `target` exactly.
    pub fn rescale_area(&self, target: f64) -> Result<PulseShape> {
        let area = self.area();
        if area.abs() < 1e-12 * self.grid.duration() {
            return Err(Error::InvalidPulse(
                "pulse area too close to zero to rescale".into(),
            ));
        }
        let factor = target / area;
        Ok(PulseShape {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        })
    }
}

/// Two-column (time, amplitude) plain text; '#' starts a comment.
pub fn import_pulse(path: &Path) -> Result<PulseShape> {
    let text = std::fs::read_to_string(path)?;
    parse_pulse_text(&text)
}

pub fn parse_pulse_text(text: &str) -> Result<PulseShape> {
    let mut times = Vec::new();
    let mut amps = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(Error::InvalidPulse(format!(
                "line {}: expected two columns, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        let t: f64 = fields[0]
            .parse()
            .map_err(|_| Error::InvalidPulse(format!("line {}: non-numeric time", lineno + 1)))?;
        let a: f64 = fields[1].parse().map_err(|_| {
            Error::InvalidPulse(format!("line {}: non-numeric amplitude", lineno + 1))
        })?;
        times.push(t);
        amps.push(a);
    }
    if times.len() < 16 {
        return Err(Error::InvalidPulse(format!(
            "need at least 16 samples, got {}",
            times.len()
        )));
    }
    let duration = times[times.len() - 1] - times[0];
    if !duration.is_finite() || duration <= 0.0 {
        return Err(Error::InvalidPulse("grid is not increasing".into()));
    }
    let dt = duration / (times.len() - 1) as f64;
    for (k, w) in times.windows(2).enumerate() {
        let step = w[1] - w[0];
        if ((step - dt) / dt).abs() > 1e-6 {
            return Err(Error::InvalidPulse(format!(
                "non-uniform grid at row {} (step {:.6e}, expected {:.6e})",
                k + 2,
                step,
                dt
            )));
        }
    }
    let grid = TimeGrid::new(duration, times.len() - 1)?;
    PulseShape::from_samples(grid, amps)
}

pub fn export_pulse(pulse: &PulseShape, path: &Path) -> Result<()> {
    use std::io::Write;
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "# time amplitude")?;
    for (k, a) in pulse.amplitudes().iter().enumerate() {
        writeln!(f, "{:.16e} {:.16e}", pulse.grid().time(k), a)?;
    }
    Ok(())
}

/// How a noise source enters the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coupling {
    /// ε(t)·δH added directly.
    Additive,
    /// ε(t)·Ω_c(t)·δH, tracking the amplitude of control channel `c`.
    Multiplicative(usize),
}

/// A noise operator δH with its coupling and stochastic process.
#[derive(Debug, Clone)]
pub struct NoiseTerm {
    pub operator: PauliSum,
    pub coupling: Coupling,
    pub process: NoiseProcess,
}

impl NoiseTerm {
    pub fn additive(operator: PauliSum, process: NoiseProcess) -> Result<NoiseTerm> {
        process.validate()?;
        Ok(NoiseTerm {
            operator,
            coupling: Coupling::Additive,
            process,
        })
    }

    pub fn multiplicative(
        operator: PauliSum,
        channel: usize,
        process: NoiseProcess,
    ) -> Result<NoiseTerm> {
        process.validate()?;
        Ok(NoiseTerm {
            operator,
            coupling: Coupling::Multiplicative(channel),
            process,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ControlTerm {
    pub pulse: PulseShape,
    pub operator: CMat,
    /// Set when the operator was given as a Pauli combination; enables the
    /// fast single-Pauli propagation path and commutation analysis.
    pub operator_sum: Option<PauliSum>,
}

/// H(t) = Σ_c Ω_c(t)·A_c + Σ_i ε_i(t)·δH_i on a shared grid.
#[derive(Debug, Clone)]
pub struct HamiltonianSchedule {
    qubits: usize,
    grid: TimeGrid,
    controls: Vec<ControlTerm>,
    noise: Vec<NoiseTerm>,
}

impl HamiltonianSchedule {
    pub fn new(qubits: usize, grid: TimeGrid) -> HamiltonianSchedule {
        HamiltonianSchedule {
            qubits,
            grid,
            controls: Vec::new(),
            noise: Vec::new(),
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn duration(&self) -> f64 {
        self.grid.duration()
    }

    pub fn controls(&self) -> &[ControlTerm] {
        &self.controls
    }

    pub fn noise(&self) -> &[NoiseTerm] {
        &self.noise
    }

    pub fn add_control(&mut self, pulse: PulseShape, operator: CMat) -> Result<()> {
        if pulse.grid() != self.grid {
            return Err(Error::GridMismatch);
        }
        if operator.nrows() != self.dim() || operator.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: operator.nrows(),
            });
        }
        if !linalg::is_hermitian(&operator, 1e-12) {
            return Err(Error::NonHermitian("control operator".into()));
        }
        self.controls.push(ControlTerm {
            pulse,
            operator,
            operator_sum: None,
        });
        Ok(())
    }

    pub fn add_control_sum(&mut self, pulse: PulseShape, operator: &PauliSum) -> Result<()> {
        if operator.qubits() != self.qubits {
            return Err(Error::QubitMismatch {
                expected: self.qubits,
                found: operator.qubits(),
            });
        }
        self.add_control(pulse, operator.matrix())?;
        self.controls.last_mut().unwrap().operator_sum = Some(operator.clone());
        Ok(())
    }

    pub fn add_noise(&mut self, term: NoiseTerm) -> Result<()> {
        if term.operator.qubits() != self.qubits {
            return Err(Error::QubitMismatch {
                expected: self.qubits,
                found: term.operator.qubits(),
            });
        }
        if let Coupling::Multiplicative(c) = term.coupling {
            if c >= self.controls.len() {
                return Err(Error::InvalidParameter(format!(
                    "multiplicative coupling references control {c}, schedule has {}",
                    self.controls.len()
                )));
            }
        }
        self.noise.push(term);
        Ok(())
    }

    /// Amplitude profile C_ε(t_k) of noise term `i`: 1 for additive noise,
    /// the tracked control amplitude for multiplicative noise.
    pub fn amplitude_profile(&self, noise_index: usize) -> Vec<f64> {
        match self.noise[noise_index].coupling {
            Coupling::Additive => vec![1.0; self.grid.points()],
            Coupling::Multiplicative(c) => self.controls[c].pulse.amplitudes().to_vec(),
        }
    }

    fn control_midpoint_amp(&self, c: usize, k: usize) -> f64 {
        let amps = self.controls[c].pulse.amplitudes();
        0.5 * (amps[k] + amps[k + 1])
    }
}

/// Noiseless propagator sampled at every grid point.
#[derive(Debug, Clone)]
pub struct Propagation {
    grid: TimeGrid,
    unitaries: Vec<CMat>,
}

impl Propagation {
    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn unitaries(&self) -> &[CMat] {
        &self.unitaries
    }

    pub fn at(&self, k: usize) -> &CMat {
        &self.unitaries[k]
    }

    pub fn final_unitary(&self) -> &CMat {
        self.unitaries.last().expect("propagation has t=0 sample")
    }
}

// Fast path: a single control whose operator is a lone Pauli term exponentiates
// in closed form, c·P with P² = 1 giving exp(-iθcP) = cos(θc)·1 − i sin(θc)·P.
fn single_pauli_control(schedule: &HamiltonianSchedule) -> Option<(f64, CMat)> {
    if schedule.controls.len() != 1 {
        return None;
    }
    let sum = schedule.controls[0].operator_sum.as_ref()?;
    match sum.terms() {
        [(coeff, p)] => Some((*coeff, p.matrix())),
        _ => None,
    }
}

pub fn propagate_noiseless(schedule: &HamiltonianSchedule) -> Result<Propagation> {
    let dim = schedule.dim();
    let grid = schedule.grid();
    let dt = grid.dt();
    let mut unitaries = Vec::with_capacity(grid.points());
    let mut u = identity(dim);
    unitaries.push(u.clone());

    if let Some((coeff, pmat)) = single_pauli_control(schedule) {
        for k in 0..grid.steps() {
            let theta = coeff * schedule.control_midpoint_amp(0, k) * dt;
            let step = identity(dim).mapv(|z| z * C64::new(theta.cos(), 0.0))
                + pmat.mapv(|z| z * C64::new(0.0, -theta.sin()));
            u = step.dot(&u);
            unitaries.push(u.clone());
        }
        return Ok(Propagation { grid, unitaries });
    }

    for k in 0..grid.steps() {
        let mut h: CMat = Array2::zeros((dim, dim));
        for (c, term) in schedule.controls.iter().enumerate() {
            let amp = schedule.control_midpoint_amp(c, k);
            if amp != 0.0 {
                h = h + term.operator.mapv(|z| z * C64::new(amp, 0.0));
            }
        }
        let step = expm(&h.mapv(|z| z * C64::new(0.0, -dt)));
        u = step.dot(&u);
        unitaries.push(u.clone());
    }
    Ok(Propagation { grid, unitaries })
}

/// Full noisy propagator over the gate, H₀(t) + Σ_i ε_i(t)·C_i(t)·δH_i,
/// stepped on a `refine`-times finer grid with linear interpolation of the
/// pulse and realization samples. `refine = 1` reproduces the noiseless
/// stepping exactly in the ε → 0 limit.
pub fn propagate_noisy(
    schedule: &HamiltonianSchedule,
    realizations: &[NoiseRealization],
    refine: usize,
) -> Result<CMat> {
    if realizations.len() != schedule.noise.len() {
        return Err(Error::MissingRealization {
            layer: realizations.len(),
        });
    }
    for r in realizations {
        r.check_grid(schedule.grid().points())?;
    }
    let refine = refine.max(1);
    let dim = schedule.dim();
    let grid = schedule.grid();
    let dt = grid.dt();
    let sub_dt = dt / refine as f64;

    let noise_mats: Vec<CMat> = schedule.noise.iter().map(|n| n.operator.matrix()).collect();
    let profiles: Vec<Vec<f64>> = (0..schedule.noise.len())
        .map(|i| schedule.amplitude_profile(i))
        .collect();

    let interp = |samples: &[f64], k: usize, frac: f64| -> f64 {
        samples[k] * (1.0 - frac) + samples[k + 1] * frac
    };

    let mut u = identity(dim);
    for k in 0..grid.steps() {
        for r in 0..refine {
            let frac = (r as f64 + 0.5) / refine as f64;
            let mut h: CMat = Array2::zeros((dim, dim));
            for (c, term) in schedule.controls.iter().enumerate() {
                let amp = interp(schedule.controls[c].pulse.amplitudes(), k, frac);
                if amp != 0.0 {
                    h = h + term.operator.mapv(|z| z * C64::new(amp, 0.0));
                }
            }
            for (i, nm) in noise_mats.iter().enumerate() {
                let eps = realizations[i].interp(k, frac) * interp(&profiles[i], k, frac);
                if eps != 0.0 {
                    h = h + nm.mapv(|z| z * C64::new(eps, 0.0));
                }
            }
            let step = expm(&h.mapv(|z| z * C64::new(0.0, -sub_dt)));
            u = step.dot(&u);
        }
    }
    Ok(u)
}

// ---------------------------------------------------------------------------
// standard gates
// ---------------------------------------------------------------------------

fn pi() -> f64 {
    std::f64::consts::PI
}

fn single_qubit_matrix(name: &str) -> Result<CMat> {
    let c = |re: f64, im: f64| C64::new(re, im);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut m: CMat = Array2::zeros((2, 2));
    match name {
        "I" => {
            m[[0, 0]] = c(1.0, 0.0);
            m[[1, 1]] = c(1.0, 0.0);
        }
        "X" => {
            m[[0, 1]] = c(1.0, 0.0);
            m[[1, 0]] = c(1.0, 0.0);
        }
        "Y" => {
            m[[0, 1]] = c(0.0, -1.0);
            m[[1, 0]] = c(0.0, 1.0);
        }
        "Z" => {
            m[[0, 0]] = c(1.0, 0.0);
            m[[1, 1]] = c(-1.0, 0.0);
        }
        "H" => {
            m[[0, 0]] = c(inv_sqrt2, 0.0);
            m[[0, 1]] = c(inv_sqrt2, 0.0);
            m[[1, 0]] = c(inv_sqrt2, 0.0);
            m[[1, 1]] = c(-inv_sqrt2, 0.0);
        }
        "S" => {
            m[[0, 0]] = c(1.0, 0.0);
            m[[1, 1]] = c(0.0, 1.0);
        }
        "SDG" => {
            m[[0, 0]] = c(1.0, 0.0);
            m[[1, 1]] = c(0.0, -1.0);
        }
        other => return Err(Error::UnknownGate(other.to_string())),
    }
    Ok(m)
}

/// Named single-qubit Clifford embedded at `qubit` (0 = leftmost) on
/// `qubits` qubits.
pub fn single_qubit_clifford(name: &str, qubit: usize, qubits: usize) -> Result<CMat> {
    if qubit >= qubits {
        return Err(Error::InvalidParameter(format!(
            "qubit {qubit} out of range for {qubits} qubits"
        )));
    }
    let gate = single_qubit_matrix(name)?;
    let mut m = if qubit == 0 {
        gate.clone()
    } else {
        identity(2)
    };
    for q in 1..qubits {
        let factor = if q == qubit { &gate } else { &identity(2) };
        m = linalg::kron(&m, factor);
    }
    Ok(m)
}

/// Product of named gates applied in temporal order on one qubit wire.
pub fn clifford_sequence(names: &[&str], qubit: usize, qubits: usize) -> Result<CMat> {
    let mut m = identity(1 << qubits);
    for name in names {
        m = single_qubit_clifford(name, qubit, qubits)?.dot(&m);
    }
    Ok(m)
}

/// XX(π/2) entangler: H(t) = (Ω(t)/2)·XX with ∫Ω dt rescaled to π/2.
pub fn xx_halfpi_schedule(pulse: &PulseShape) -> Result<HamiltonianSchedule> {
    let rescaled = pulse.rescale_area(pi() / 2.0)?;
    let mut schedule = HamiltonianSchedule::new(2, rescaled.grid());
    let op = PauliSum::parse(&[(0.5, "XX")])?;
    schedule.add_control_sum(rescaled, &op)?;
    Ok(schedule)
}

pub fn xx_halfpi_target() -> CMat {
    let xx = PauliString::parse("XX").unwrap().matrix();
    expm(&xx.mapv(|z| z * C64::new(0.0, -pi() / 4.0)))
}

/// iSWAP-family entangler: constant H = g(XX + YY) for T = π/(4g).
pub fn iswap_schedule(g: f64, steps: usize) -> Result<HamiltonianSchedule> {
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "iswap coupling must be positive, got {g}"
        )));
    }
    let grid = TimeGrid::new(pi() / (4.0 * g), steps)?;
    let mut schedule = HamiltonianSchedule::new(2, grid);
    let op = PauliSum::parse(&[(1.0, "XX"), (1.0, "YY")])?;
    schedule.add_control_sum(PulseShape::constant(grid, g), &op)?;
    Ok(schedule)
}

pub fn iswap_target(g: f64) -> CMat {
    let op = PauliSum::parse(&[(1.0, "XX"), (1.0, "YY")]).unwrap().matrix();
    let t = pi() / (4.0 * g);
    expm(&op.mapv(|z| z * C64::new(0.0, -t * g)))
}

pub fn cnot_matrix() -> CMat {
    let mut m: CMat = Array2::zeros((4, 4));
    let one = C64::new(1.0, 0.0);
    m[[0, 0]] = one;
    m[[1, 1]] = one;
    m[[2, 3]] = one;
    m[[3, 2]] = one;
    m
}

/// An XX(π/2) hard gate sandwiched between single-qubit Clifford layers.
#[derive(Debug, Clone)]
pub struct CompositeFragment {
    pub pre: CMat,
    pub hard: HamiltonianSchedule,
    pub hard_target: CMat,
    pub post: CMat,
    pub target: CMat,
}

/// CNOT (control = leftmost qubit) from one XX(π/2) plus local Cliffords:
/// CNOT = (HZ ⊗ I) · XX(π/2) · (ZHS ⊗ HSH) up to a global phase.
pub fn cnot_composite(pulse: &PulseShape) -> Result<CompositeFragment> {
    let hard = xx_halfpi_schedule(pulse)?;
    let hard_target = xx_halfpi_target();
    let pre_q0 = clifford_sequence(&["S", "H", "Z"], 0, 2)?;
    let pre_q1 = clifford_sequence(&["H", "S", "H"], 1, 2)?;
    let pre = pre_q1.dot(&pre_q0);
    let post = clifford_sequence(&["Z", "H"], 0, 2)?;
    let target = cnot_matrix();
    let assembled = post.dot(&hard_target).dot(&pre);
    let defect = phase_aligned_distance(&assembled, &target);
    debug_assert!(defect < 1e-8, "CNOT decomposition defect {defect}");
    Ok(CompositeFragment {
        pre,
        hard,
        hard_target,
        post,
        target,
    })
}

/// Gate constructors addressable by kind.
#[derive(Debug, Clone)]
pub enum GateKind {
    XxHalfPi { pulse: PulseShape },
    Iswap { g: f64, steps: usize },
    SingleQubitClifford { name: String, qubit: usize, qubits: usize },
    CnotComposite { pulse: PulseShape },
}

#[derive(Debug, Clone)]
pub enum Gate {
    Schedule(HamiltonianSchedule),
    Unitary(CMat),
    Composite(Box<CompositeFragment>),
}

pub fn make_gate(kind: GateKind) -> Result<Gate> {
    match kind {
        GateKind::XxHalfPi { pulse } => Ok(Gate::Schedule(xx_halfpi_schedule(&pulse)?)),
        GateKind::Iswap { g, steps } => Ok(Gate::Schedule(iswap_schedule(g, steps)?)),
        GateKind::SingleQubitClifford {
            name,
            qubit,
            qubits,
        } => Ok(Gate::Unitary(single_qubit_clifford(&name, qubit, qubits)?)),
        GateKind::CnotComposite { pulse } => Ok(Gate::Composite(Box::new(cnot_composite(&pulse)?))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, unitarity_defect};
    use crate::spectra::NoiseProcess;

    fn grid(steps: usize) -> TimeGrid {
        TimeGrid::new(1.0, steps).unwrap()
    }

    #[test]
    fn zero_hamiltonian_propagates_to_identity() {
        let schedule = HamiltonianSchedule::new(1, grid(64));
        let prop = propagate_noiseless(&schedule).unwrap();
        for u in prop.unitaries() {
            assert!(frobenius_norm(&(u - &identity(2))) < 1e-14);
        }
    }

    #[test]
    fn full_x_rotation_returns_minus_identity() {
        // constant H = (Ω/2)X with ΩT = 2π: U(T) = -1 (global phase).
        let g = grid(256);
        let omega = 2.0 * pi();
        let mut schedule = HamiltonianSchedule::new(1, g);
        let op = PauliSum::parse(&[(0.5, "X")]).unwrap();
        schedule
            .add_control_sum(PulseShape::constant(g, omega), &op)
            .unwrap();
        let prop = propagate_noiseless(&schedule).unwrap();
        let u = prop.final_unitary();
        assert!(phase_aligned_distance(u, &identity(2)) < 1e-10);
        assert!((u[[0, 0]].re + 1.0).abs() < 1e-10);
    }

    #[test]
    fn iswap_matches_exact_exponential() {
        let g = 1.3;
        let schedule = iswap_schedule(g, 512).unwrap();
        let prop = propagate_noiseless(&schedule).unwrap();
        let target = iswap_target(g);
        assert!(frobenius_norm(&(prop.final_unitary() - &target)) < 1e-10);
        assert!(unitarity_defect(prop.final_unitary()) < 1e-12);
    }

    #[test]
    fn propagation_is_unitary_at_every_sample() {
        let pulse = PulseShape::cosine(grid(128), pi() / 2.0);
        let schedule = xx_halfpi_schedule(&pulse).unwrap();
        let prop = propagate_noiseless(&schedule).unwrap();
        for u in prop.unitaries() {
            assert!(unitarity_defect(u) < 1e-12);
        }
    }

    #[test]
    fn xx_halfpi_hits_target_up_to_phase() {
        let pulse = PulseShape::cosine(grid(512), 1.0); // wrong area on purpose
        let schedule = xx_halfpi_schedule(&pulse).unwrap();
        // area is rescaled to π/2 exactly
        assert!((schedule.controls()[0].pulse.area() - pi() / 2.0).abs() < 1e-10);
        let prop = propagate_noiseless(&schedule).unwrap();
        assert!(phase_aligned_distance(prop.final_unitary(), &xx_halfpi_target()) < 1e-8);
    }

    #[test]
    fn stepping_is_second_order_in_dt() {
        // genuinely time-dependent, non-commuting two-channel drive
        let reference_steps = 8192;
        let build = |steps: usize| {
            let g = grid(steps);
            let mut schedule = HamiltonianSchedule::new(1, g);
            let x = PauliSum::parse(&[(0.5, "X")]).unwrap();
            let z = PauliSum::parse(&[(0.4, "Z")]).unwrap();
            schedule
                .add_control_sum(PulseShape::cosine(g, 2.0), &x)
                .unwrap();
            let ramp: Vec<f64> = (0..g.points()).map(|k| g.time(k) * 1.5).collect();
            schedule
                .add_control_sum(PulseShape::from_samples(g, ramp).unwrap(), &z)
                .unwrap();
            propagate_noiseless(&schedule).unwrap().final_unitary().clone()
        };
        let reference = build(reference_steps);
        let mut log_dt = Vec::new();
        let mut log_err = Vec::new();
        for steps in [64usize, 128, 256, 512] {
            let err = frobenius_norm(&(&build(steps) - &reference));
            log_dt.push((1.0 / steps as f64).ln());
            log_err.push(err.ln());
        }
        let n = log_dt.len() as f64;
        let mx = log_dt.iter().sum::<f64>() / n;
        let my = log_err.iter().sum::<f64>() / n;
        let slope: f64 = log_dt
            .iter()
            .zip(&log_err)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / log_dt.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        assert!(slope >= 1.9, "convergence slope {slope} below 2nd order");
    }

    #[test]
    fn cnot_composite_equals_canonical_cnot() {
        let pulse = PulseShape::cosine(grid(512), pi() / 2.0);
        let frag = cnot_composite(&pulse).unwrap();
        let prop = propagate_noiseless(&frag.hard).unwrap();
        let assembled = frag.post.dot(prop.final_unitary()).dot(&frag.pre);
        let defect = phase_aligned_distance(&assembled, &cnot_matrix());
        assert!(defect < 1e-8, "assembled CNOT defect {defect}");
    }

    #[test]
    fn hadamard_embedding() {
        let h = single_qubit_clifford("H", 1, 2).unwrap();
        let expected = linalg::kron(&identity(2), &single_qubit_matrix("H").unwrap());
        assert!(frobenius_norm(&(&h - &expected)) < 1e-15);
        assert!(single_qubit_clifford("Q", 0, 1).is_err());
    }

    #[test]
    fn non_hermitian_control_rejected() {
        let g = grid(32);
        let mut schedule = HamiltonianSchedule::new(1, g);
        let mut bad: CMat = Array2::zeros((2, 2));
        bad[[0, 1]] = C64::new(1.0, 0.0); // upper triangular, not Hermitian
        let err = schedule.add_control(PulseShape::constant(g, 1.0), bad);
        assert!(matches!(err, Err(Error::NonHermitian(_))));
    }

    #[test]
    fn pulse_import_roundtrip_and_errors() {
        let g = grid(255);
        let pulse = PulseShape::cosine(g, 0.7);
        let dir = std::env::temp_dir().join("qtailor_pulse_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pulse.txt");
        export_pulse(&pulse, &path).unwrap();
        let back = import_pulse(&path).unwrap();
        assert_eq!(back.amplitudes().len(), pulse.amplitudes().len());
        for (a, b) in back.amplitudes().iter().zip(pulse.amplitudes()) {
            assert!((a - b).abs() < 1e-14);
        }

        // jittered grid rejected
        let mut text = String::new();
        for k in 0..64 {
            let t = k as f64 * 0.1 + if k == 30 { 0.01 } else { 0.0 };
            text.push_str(&format!("{t} 1.0\n"));
        }
        assert!(matches!(
            parse_pulse_text(&text),
            Err(Error::InvalidPulse(_))
        ));

        // too few samples
        assert!(parse_pulse_text("0 1\n1 1\n2 1\n").is_err());
        // non-numeric rows
        assert!(parse_pulse_text(&"0 a\n".repeat(20)).is_err());
        // comma separation accepted
        let csv: String = (0..20).map(|k| format!("{}, {}\n", k as f64 * 0.5, 2.0)).collect();
        assert!(parse_pulse_text(&csv).is_ok());
    }

    #[test]
    fn noisy_propagation_reduces_to_noiseless_at_zero_strength() {
        let pulse = PulseShape::cosine(grid(128), pi() / 2.0);
        let mut schedule = xx_halfpi_schedule(&pulse).unwrap();
        let op = PauliSum::parse(&[(1.0, "IZ"), (-1.0, "ZI"), (0.5, "ZZ")]).unwrap();
        schedule
            .add_noise(NoiseTerm::additive(op, NoiseProcess::quasi_static(0.0, 0.0)).unwrap())
            .unwrap();
        let prop = propagate_noiseless(&schedule).unwrap();
        let noisy = propagate_noisy(
            &schedule,
            &[NoiseRealization::constant(0.0)],
            1,
        )
        .unwrap();
        assert!(frobenius_norm(&(&noisy - prop.final_unitary())) < 1e-12);
    }
}
