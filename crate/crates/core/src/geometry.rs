// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Toggling-frame error curves and perturbative error orders for one gate.
//!
//! With U(t) = U₀(t)·U_ε(t) and U_ε = exp(−iΦ(t) + …), the error phase
//! operator is
//!
//!   Φ(t) = ∫₀ᵗ Σ_i ε_i(s)·U₀†(s) δH_i U₀(s) ds = Σ_j R_j(t)·σ̂_j,
//!
//! so each noise source traces a curve through the (4^m − 1)-dimensional
//! space of non-identity Pauli axes, with per-axis speed
//! r′_{i,j}(t) = (1/D)·Tr(σ̂_j · U₀†(t) δH_i U₀(t)). The fixed sign
//! convention is U_ε = exp(−iΦ + …); all axis signs follow from it and
//! the base-4 Pauli ordering.
//!
//! The second-order vector stores the −(1/2)∫[Φ̇, Φ] Magnus term so that
//! U_ε = exp(−i(R⁽¹⁾ + R⁽²⁾)·σ̂) holds through O(ε²); this convention is
//! validated against the exact noisy propagator rather than trusted.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{dagger, expm, CMat};
use crate::pauli::{pauli_mul, PauliBasis, PauliString, Phase};
use crate::quad::{cumulative_trapezoid, trapezoid};
use crate::schedule::{HamiltonianSchedule, Propagation, TimeGrid};
use crate::spectra::NoiseRealization;

/// Real coefficient vector on the 4^m − 1 non-identity Pauli axes.
/// Component `j` corresponds to Pauli index `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorVector {
    qubits: usize,
    components: Vec<f64>,
}

impl ErrorVector {
    pub fn zeros(qubits: usize) -> ErrorVector {
        ErrorVector {
            qubits,
            components: vec![0.0; 4usize.pow(qubits as u32) - 1],
        }
    }

    pub fn from_components(qubits: usize, components: Vec<f64>) -> Result<ErrorVector> {
        let expected = 4usize.pow(qubits as u32) - 1;
        if components.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: components.len(),
            });
        }
        Ok(ErrorVector { qubits, components })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn component(&self, axis: &PauliString) -> f64 {
        assert_eq!(axis.qubits(), self.qubits);
        assert!(!axis.is_identity(), "identity is not an error axis");
        self.components[axis.index() - 1]
    }

    pub fn set_component(&mut self, axis: &PauliString, value: f64) {
        assert_eq!(axis.qubits(), self.qubits);
        assert!(!axis.is_identity());
        self.components[axis.index() - 1] = value;
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> ErrorVector {
        ErrorVector {
            qubits: self.qubits,
            components: self.components.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &ErrorVector) -> ErrorVector {
        assert_eq!(self.qubits, other.qubits);
        ErrorVector {
            qubits: self.qubits,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn add_assign(&mut self, other: &ErrorVector) {
        assert_eq!(self.qubits, other.qubits);
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            *a += b;
        }
    }

    /// Φ = Σ_j R_j σ̂_j as a dense matrix.
    pub fn phase_operator(&self, basis: &PauliBasis) -> CMat {
        assert_eq!(basis.qubits(), self.qubits);
        let dim = basis.dim();
        let mut out: CMat = Array2::zeros((dim, dim));
        for (j, &c) in self.components.iter().enumerate() {
            if c != 0.0 {
                out = out + basis.matrix(j + 1).mapv(|z| z * C64::new(c, 0.0));
            }
        }
        out
    }

    /// Extract the non-identity real components of a Pauli expansion.
    /// The identity component and all imaginary parts must be negligible.
    pub fn from_expansion(qubits: usize, coeffs: &[C64]) -> Result<ErrorVector> {
        let expected = 4usize.pow(qubits as u32);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        debug_assert!(coeffs[0].norm() < 1e-9, "identity component in error vector");
        debug_assert!(
            coeffs[1..].iter().all(|c| c.im.abs() < 1e-9),
            "imaginary leakage in error vector"
        );
        Ok(ErrorVector {
            qubits,
            components: coeffs[1..].iter().map(|c| c.re).collect(),
        })
    }

    /// Axes with the largest |component|, descending.
    pub fn top_axes(&self, k: usize) -> Vec<(PauliString, f64)> {
        let mut ranked: Vec<(usize, f64)> = self
            .components
            .iter()
            .enumerate()
            .map(|(j, &c)| (j + 1, c))
            .collect();
        ranked.sort_by(|a, b| b.1.abs().partial_cmp(&a.1.abs()).unwrap());
        ranked
            .into_iter()
            .take(k)
            .map(|(idx, c)| (PauliString::from_index(idx, self.qubits), c))
            .collect()
    }
}

/// Per-gate error orders, stored so that U_ε = exp(−i(R⁽¹⁾ + R⁽²⁾)·σ̂).
#[derive(Debug, Clone)]
pub struct MagnusOrders {
    pub first: ErrorVector,
    pub second: ErrorVector,
    /// Not computed by this crate; carried for channel expansions that
    /// accept externally supplied third-order data.
    pub third: Option<ErrorVector>,
}

impl MagnusOrders {
    pub fn first_only(first: ErrorVector) -> MagnusOrders {
        let second = ErrorVector::zeros(first.qubits());
        MagnusOrders {
            first,
            second,
            third: None,
        }
    }

    pub fn qubits(&self) -> usize {
        self.first.qubits()
    }

    pub fn total(&self) -> ErrorVector {
        let mut t = self.first.add(&self.second);
        if let Some(r3) = &self.third {
            t.add_assign(r3);
        }
        t
    }
}

/// Toggling-frame curve of one noise source over a gate.
#[derive(Debug, Clone)]
pub struct ErrorCurve {
    qubits: usize,
    grid: TimeGrid,
    /// r′_{j}(t_k), shape (4^m − 1, points)
    derivatives: Array2<f64>,
    /// r_{j}(t_k) = ∫₀^{t_k} r′_j, same shape
    cumulative: Array2<f64>,
    /// amplitude profile C_ε(t_k)
    amplitude: Vec<f64>,
}

impl ErrorCurve {
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn grid(&self) -> TimeGrid {
        self.grid
    }

    pub fn axis_count(&self) -> usize {
        self.derivatives.nrows()
    }

    /// r′_j(t_k) for error-space component `j` (0-based, Pauli index j+1).
    pub fn derivative(&self, axis: usize, k: usize) -> f64 {
        self.derivatives[[axis, k]]
    }

    pub fn derivative_row(&self, axis: usize) -> Vec<f64> {
        self.derivatives.row(axis).to_vec()
    }

    pub fn cumulative_row(&self, axis: usize) -> Vec<f64> {
        self.cumulative.row(axis).to_vec()
    }

    pub fn amplitude(&self) -> &[f64] {
        &self.amplitude
    }

    /// Σ_j r′_j(t_k)² at each sample; equals 1 for a unit-Pauli source.
    pub fn speed_squared(&self) -> Vec<f64> {
        (0..self.grid.points())
            .map(|k| self.derivatives.column(k).iter().map(|v| v * v).sum())
            .collect()
    }

    /// CSV export: time column plus one column per axis that is anywhere
    /// non-negligible.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let active: Vec<usize> = (0..self.axis_count())
            .filter(|&j| self.derivatives.row(j).iter().any(|v| v.abs() > 1e-12))
            .collect();
        write!(w, "t")?;
        for &j in &active {
            write!(w, ",{}", PauliString::from_index(j + 1, self.qubits))?;
        }
        writeln!(w)?;
        for k in 0..self.grid.points() {
            write!(w, "{:.16e}", self.grid.time(k))?;
            for &j in &active {
                write!(w, ",{:.16e}", self.cumulative[[j, k]])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Expand U₀†(t) δH_i U₀(t) over the non-identity Pauli axes at every grid
/// point of a noiseless propagation.
pub fn toggling_frame_curve(
    schedule: &HamiltonianSchedule,
    propagation: &Propagation,
    noise_index: usize,
) -> Result<ErrorCurve> {
    if propagation.grid() != schedule.grid() {
        return Err(Error::GridMismatch);
    }
    let qubits = schedule.qubits();
    let basis = PauliBasis::new(qubits);
    let noise = &schedule.noise()[noise_index];
    let noise_mat = noise.operator.matrix();
    let points = schedule.grid().points();
    let axes = basis.len() - 1;

    let mut derivatives = Array2::zeros((axes, points));
    for k in 0..points {
        let u = propagation.at(k);
        let frame = dagger(u).dot(&noise_mat).dot(u);
        let coeffs = basis.expand(&frame)?;
        debug_assert!(coeffs[0].norm() < 1e-9);
        for j in 0..axes {
            debug_assert!(coeffs[j + 1].im.abs() < 1e-9);
            derivatives[[j, k]] = coeffs[j + 1].re;
        }
    }

    let dt = schedule.grid().dt();
    let mut cumulative = Array2::zeros((axes, points));
    for j in 0..axes {
        let row: Vec<f64> = derivatives.row(j).to_vec();
        for (k, v) in cumulative_trapezoid(&row, dt).into_iter().enumerate() {
            cumulative[[j, k]] = v;
        }
    }

    Ok(ErrorCurve {
        qubits,
        grid: schedule.grid(),
        derivatives,
        cumulative,
        amplitude: schedule.amplitude_profile(noise_index),
    })
}

/// First-order error vector R_j = ∫₀ᵀ ε̃(s)·C_ε(s)·r′_j(s) ds.
pub fn first_order_error(
    curve: &ErrorCurve,
    realization: &NoiseRealization,
) -> Result<ErrorVector> {
    realization.check_grid(curve.grid.points())?;
    let dt = curve.grid.dt();
    let points = curve.grid.points();
    let mut components = Vec::with_capacity(curve.axis_count());
    let mut scratch = vec![0.0; points];
    for j in 0..curve.axis_count() {
        for (k, sample) in scratch.iter_mut().enumerate() {
            *sample = realization.at(k) * curve.amplitude[k] * curve.derivatives[[j, k]];
        }
        components.push(trapezoid(&scratch, dt));
    }
    ErrorVector::from_components(curve.qubits, components)
}

// Anticommuting ordered axis pairs (j, k) with σ̂_{j+1}σ̂_{k+1} = phase·σ̂_{l+1};
// the weight Re(−i·phase) = ±1 turns the commutator integral into real
// error-space components.
fn commutator_table(qubits: usize) -> Vec<(usize, usize, usize, f64)> {
    let n = 4usize.pow(qubits as u32) - 1;
    let paulis: Vec<PauliString> = (1..=n)
        .map(|i| PauliString::from_index(i, qubits))
        .collect();
    let mut table = Vec::new();
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            let (phase, prod) = pauli_mul(&paulis[j], &paulis[k]).expect("same qubit count");
            let weight = match phase {
                Phase::PlusI => 1.0,   // Re(−i·i)
                Phase::MinusI => -1.0, // Re(−i·(−i))
                _ => continue,         // commuting pair
            };
            debug_assert!(!prod.is_identity());
            table.push((j, k, prod.index() - 1, weight));
        }
    }
    table
}

/// Second-order error vector from the commutator Magnus term,
/// R⁽²⁾·σ̂ = −(i/2)·∫₀ᵀ [Φ̇(s), Φ(s)] ds, expanded over the error axes.
/// Quadratic in the noise strength.
pub fn second_order_error(
    curves: &[&ErrorCurve],
    realizations: &[&NoiseRealization],
) -> Result<ErrorVector> {
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidParameter("no curves supplied".into()))?;
    if curves.len() != realizations.len() {
        return Err(Error::MissingRealization {
            layer: realizations.len(),
        });
    }
    let qubits = first.qubits;
    let grid = first.grid;
    let points = grid.points();
    let axes = first.axis_count();
    for (c, r) in curves.iter().zip(realizations) {
        if c.grid != grid {
            return Err(Error::GridMismatch);
        }
        r.check_grid(points)?;
    }

    // φ̇_j(t_k) summed over sources, then φ_j by cumulative quadrature
    let mut phi_dot = Array2::zeros((axes, points));
    for (curve, real) in curves.iter().zip(realizations) {
        for j in 0..axes {
            for k in 0..points {
                phi_dot[[j, k]] +=
                    real.at(k) * curve.amplitude[k] * curve.derivatives[[j, k]];
            }
        }
    }
    let dt = grid.dt();
    let mut phi = Array2::zeros((axes, points));
    for j in 0..axes {
        let row: Vec<f64> = phi_dot.row(j).to_vec();
        for (k, v) in cumulative_trapezoid(&row, dt).into_iter().enumerate() {
            phi[[j, k]] = v;
        }
    }

    let mut components = vec![0.0; axes];
    let mut scratch = vec![0.0; points];
    for (j, k, l, weight) in commutator_table(qubits) {
        for t in 0..points {
            scratch[t] = phi_dot[[j, t]] * phi[[k, t]];
        }
        components[l] += weight * trapezoid(&scratch, dt);
    }
    ErrorVector::from_components(qubits, components)
}

/// Convenience: first and second orders from a common set of curves.
pub fn magnus_orders(
    curves: &[&ErrorCurve],
    realizations: &[&NoiseRealization],
) -> Result<MagnusOrders> {
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidParameter("no curves supplied".into()))?;
    let mut r1 = ErrorVector::zeros(first.qubits());
    for (curve, real) in curves.iter().zip(realizations.iter()) {
        r1.add_assign(&first_order_error(curve, real)?);
    }
    let r2 = second_order_error(curves, realizations)?;
    Ok(MagnusOrders {
        first: r1,
        second: r2,
        third: None,
    })
}

/// U_ε = exp(−i Σ_j (R⁽¹⁾ + R⁽²⁾ [+ R⁽³⁾])_j σ̂_j).
pub fn error_unitary(orders: &MagnusOrders) -> CMat {
    let basis = PauliBasis::new(orders.qubits());
    let phi = orders.total().phase_operator(&basis);
    expm(&phi.mapv(|z| z * C64::new(0.0, -1.0)))
}
