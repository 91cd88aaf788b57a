// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Noise channels as Pauli transfer matrices.
//!
//! PTM entry (j, k) = (1/D)·Tr(σ̂_j · ℰ(σ̂_k)), rows and columns in the
//! base-4 Pauli index order. For the twirl-averaged channel the ensemble
//! is the list of dressed error unitaries T†U_εT; because Pauli
//! conjugation only permutes matrix entries and flips signs, the exact
//! full-set average cancels every off-diagonal entry to machine precision.
//!
//! The analytic diagonal expansion keeps the explicitly written orders:
//! through ε³ the coefficient on axis P̂ is
//! 1 − 2·Σ_{ {σ̂_i,P̂}=0 } R⁽¹⁾_i (R⁽¹⁾_i + R⁽²⁾_i), and the fourth order
//! adds Σ_i [ 2R⁽¹⁾_i((R⁽¹⁾_i)³ − R⁽³⁾_i)/3 − (R⁽²⁾_i)²/2 ] plus the
//! ordered-pair cross sum Σ_{i≠j, commuting, both anticommuting with P̂}
//! 2(R⁽¹⁾_iR⁽¹⁾_j)² — the ordered-pair reading is pinned by the
//! product-of-cosines regression test.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::pairwise_sum;
use crate::geometry::MagnusOrders;
use crate::linalg::{dagger, CMat};
use crate::pauli::{commutes, PauliBasis, PauliString};

#[derive(Debug, Clone, PartialEq)]
pub struct Ptm {
    qubits: usize,
    entries: Array2<f64>,
}

impl Ptm {
    pub fn identity(qubits: usize) -> Ptm {
        let n = 4usize.pow(qubits as u32);
        Ptm {
            qubits,
            entries: Array2::eye(n),
        }
    }

    pub fn from_entries(qubits: usize, entries: Array2<f64>) -> Result<Ptm> {
        let n = 4usize.pow(qubits as u32);
        if entries.dim() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: entries.nrows(),
            });
        }
        Ok(Ptm { qubits, entries })
    }

    /// PTM of the unitary channel ρ ↦ UρU†.
    pub fn of_unitary(u: &CMat) -> Result<Ptm> {
        Self::of_ensemble(std::slice::from_ref(u))
    }

    /// Equal-weight ensemble average of unitary conjugations, with a fixed
    /// pairwise reduction so the result is bit-stable.
    pub fn of_ensemble(unitaries: &[CMat]) -> Result<Ptm> {
        let first = unitaries.first().ok_or(Error::EmptyEnsemble)?;
        let dim = first.nrows();
        if !dim.is_power_of_two() || dim < 2 {
            return Err(Error::DimensionMismatch {
                expected: dim.max(2).next_power_of_two(),
                found: dim,
            });
        }
        let qubits = dim.trailing_zeros() as usize;
        let basis = PauliBasis::new(qubits);
        let n = basis.len();

        let mut per_entry: Vec<Vec<f64>> = vec![Vec::with_capacity(unitaries.len()); n * n];
        for u in unitaries {
            if u.nrows() != dim || u.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: u.nrows(),
                });
            }
            let udag = dagger(u);
            for k in 0..n {
                let image = u.dot(basis.matrix(k)).dot(&udag);
                let coeffs = basis.expand(&image)?;
                for j in 0..n {
                    debug_assert!(coeffs[j].im.abs() < 1e-9);
                    per_entry[j * n + k].push(coeffs[j].re);
                }
            }
        }
        let count = unitaries.len() as f64;
        let mut entries = Array2::zeros((n, n));
        for j in 0..n {
            for k in 0..n {
                entries[[j, k]] = pairwise_sum(&per_entry[j * n + k]) / count;
            }
        }
        Ok(Ptm { qubits, entries })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.entries[[j, k]]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.size()).map(|j| self.entries[[j, j]]).collect()
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let mut max = 0.0f64;
        for j in 0..self.size() {
            for k in 0..self.size() {
                if j != k {
                    max = max.max(self.entries[[j, k]].abs());
                }
            }
        }
        max
    }

    /// Channel composition: `self` applied first, then `next`.
    pub fn then(&self, next: &Ptm) -> Result<Ptm> {
        if next.qubits != self.qubits {
            return Err(Error::QubitMismatch {
                expected: self.qubits,
                found: next.qubits,
            });
        }
        Ok(Ptm {
            qubits: self.qubits,
            entries: next.entries.dot(&self.entries),
        })
    }

    /// Apply the channel to a density matrix via its Pauli coefficients.
    pub fn apply_density(&self, rho: &CMat) -> Result<CMat> {
        let basis = PauliBasis::new(self.qubits);
        let coeffs = basis.expand(rho)?;
        let n = self.size();
        let mapped: Vec<num_complex::Complex64> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| coeffs[k] * self.entries[[j, k]])
                    .sum::<num_complex::Complex64>()
            })
            .collect();
        Ok(basis.assemble(&mapped))
    }

    /// CSV rows of the matrix, with a label header.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        let labels: Vec<String> = (0..self.size())
            .map(|i| PauliString::from_index(i, self.qubits).label())
            .collect();
        writeln!(w, "axis,{}", labels.join(","))?;
        for (j, label) in labels.iter().enumerate() {
            write!(w, "{label}")?;
            for k in 0..self.size() {
                write!(w, ",{:.16e}", self.entries[[j, k]])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Scalar health summary of a PTM.
#[derive(Debug, Clone, Serialize)]
pub struct PtmDiagnostics {
    pub max_off_diagonal: f64,
    pub diagonal: Vec<f64>,
    pub avg_gate_fidelity: f64,
}

/// Average gate fidelity of a trace-preserving channel,
/// F_avg = (Tr M + D)/(D² + D).
pub fn ptm_diagnostics(ptm: &Ptm) -> PtmDiagnostics {
    let d = (1usize << ptm.qubits()) as f64;
    let trace: f64 = ptm.diagonal().iter().sum();
    PtmDiagnostics {
        max_off_diagonal: ptm.max_off_diagonal(),
        diagonal: ptm.diagonal(),
        avg_gate_fidelity: (trace + d) / (d * d + d),
    }
}

/// How far to carry the perturbative diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpansionOrder {
    Two,
    Three,
    Four,
}

/// Analytic twirled-channel diagonal with per-order breakdown.
#[derive(Debug, Clone)]
pub struct ChannelExpansion {
    qubits: usize,
    /// full coefficients, index = Pauli index (identity first, exactly 1)
    coefficients: Vec<f64>,
    /// ε² piece per axis
    order2: Vec<f64>,
    /// ε³ piece per axis
    order3: Vec<f64>,
    /// ε⁴ piece per axis
    order4: Vec<f64>,
}

impl ChannelExpansion {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, axis: &PauliString) -> f64 {
        self.coefficients[axis.index()]
    }

    pub fn order_terms(&self, axis: &PauliString) -> (f64, f64, f64) {
        let j = axis.index() - 1;
        (self.order2[j], self.order3[j], self.order4[j])
    }

    /// Diagonal PTM built from the expansion.
    pub fn to_ptm(&self) -> Ptm {
        let n = self.coefficients.len();
        let mut entries = Array2::zeros((n, n));
        for (j, &c) in self.coefficients.iter().enumerate() {
            entries[[j, j]] = c;
        }
        Ptm {
            qubits: self.qubits,
            entries,
        }
    }
}

fn anticommutation_mask(qubits: usize) -> Vec<Vec<bool>> {
    let n = 4usize.pow(qubits as u32) - 1;
    let paulis: Vec<PauliString> = (1..=n)
        .map(|i| PauliString::from_index(i, qubits))
        .collect();
    let mut mask = vec![vec![false; n]; n];
    for (a, pa) in paulis.iter().enumerate() {
        for (b, pb) in paulis.iter().enumerate() {
            mask[a][b] = !commutes(pa, pb).expect("same qubit count");
        }
    }
    mask
}

/// Per-axis diagonal coefficients of the twirl-averaged channel through the
/// requested order in the noise strength.
pub fn analytic_twirled_diagonal(orders: &MagnusOrders, through: ExpansionOrder) -> ChannelExpansion {
    let qubits = orders.qubits();
    let n = 4usize.pow(qubits as u32) - 1;
    let r1 = orders.first.components();
    let r2 = orders.second.components();
    let r3_store;
    let r3: &[f64] = match &orders.third {
        Some(v) => v.components(),
        None => {
            r3_store = vec![0.0; n];
            &r3_store
        }
    };
    let anti = anticommutation_mask(qubits);
    let commute_pair = |i: usize, j: usize| !anti[i][j];

    let mut order2 = vec![0.0; n];
    let mut order3 = vec![0.0; n];
    let mut order4 = vec![0.0; n];
    for p in 0..n {
        let mut sum2 = 0.0;
        let mut sum3 = 0.0;
        let mut sum4_single = 0.0;
        for i in 0..n {
            if !anti[i][p] {
                continue;
            }
            sum2 += r1[i] * r1[i];
            sum3 += r1[i] * r2[i];
            sum4_single += 2.0 * r1[i] * (r1[i].powi(3) - r3[i]) / 3.0 - r2[i] * r2[i] / 2.0;
        }
        let mut sum4_pairs = 0.0;
        for i in 0..n {
            if !anti[i][p] || r1[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if j == i || !anti[j][p] || !commute_pair(i, j) {
                    continue;
                }
                let prod = r1[i] * r1[j];
                sum4_pairs += 2.0 * prod * prod;
            }
        }
        order2[p] = -2.0 * sum2;
        order3[p] = -2.0 * sum3;
        order4[p] = sum4_single + sum4_pairs;
    }

    let mut coefficients = vec![1.0; n + 1];
    for p in 0..n {
        let mut c = 1.0 + order2[p];
        if matches!(through, ExpansionOrder::Three | ExpansionOrder::Four) {
            c += order3[p];
        }
        if matches!(through, ExpansionOrder::Four) {
            c += order4[p];
        }
        coefficients[p + 1] = c;
    }
    ChannelExpansion {
        qubits,
        coefficients,
        order2,
        order3,
        order4,
    }
}

/// Leading-order diagonal for stochastic noise: second moments ⟨(R⁽¹⁾_i)²⟩
/// substituted for the deterministic squares.
pub fn analytic_twirled_diagonal_moments(
    qubits: usize,
    r1_second_moments: &[f64],
) -> Result<ChannelExpansion> {
    let n = 4usize.pow(qubits as u32) - 1;
    if r1_second_moments.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: r1_second_moments.len(),
        });
    }
    let anti = anticommutation_mask(qubits);
    let mut order2 = vec![0.0; n];
    let mut coefficients = vec![1.0; n + 1];
    for p in 0..n {
        let sum2: f64 = (0..n)
            .filter(|&i| anti[i][p])
            .map(|i| r1_second_moments[i])
            .sum();
        order2[p] = -2.0 * sum2;
        coefficients[p + 1] = 1.0 + order2[p];
    }
    Ok(ChannelExpansion {
        qubits,
        coefficients,
        order3: vec![0.0; n],
        order4: vec![0.0; n],
        order2,
    })
}
