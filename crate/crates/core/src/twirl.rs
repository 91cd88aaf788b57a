// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Pauli twirling: random twirl gates before each hard layer with the
//! correction Tc = U₀ T† U₀† after it, folded into the adjacent easy
//! layers. Twirl and correction gates are treated as noiseless, and the
//! correction is computed from the stored ideal gate, never the noisy
//! propagator.
//!
//! Dressing the toggling-frame error by T flips the sign of every error
//! component whose axis anticommutes with T; averaging over the full Pauli
//! set therefore zeroes the dressed step in expectation.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, EasyLayer, Layer};
use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::ErrorVector;
use crate::linalg::{dagger, CMat};
use crate::pauli::{all_paulis, commutes, PauliString};

/// The gate pool twirls are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct TwirlSet {
    paulis: Vec<PauliString>,
}

impl TwirlSet {
    /// All 4^m Paulis including the identity.
    pub fn full(qubits: usize) -> TwirlSet {
        TwirlSet {
            paulis: all_paulis(qubits),
        }
    }

    /// A user-supplied reduced set.
    pub fn reduced(paulis: Vec<PauliString>) -> Result<TwirlSet> {
        if paulis.is_empty() {
            return Err(Error::EmptyTwirlSet);
        }
        let qubits = paulis[0].qubits();
        for p in &paulis {
            if p.qubits() != qubits {
                return Err(Error::QubitMismatch {
                    expected: qubits,
                    found: p.qubits(),
                });
            }
        }
        Ok(TwirlSet { paulis })
    }

    pub fn identity_only(qubits: usize) -> TwirlSet {
        TwirlSet {
            paulis: vec![PauliString::identity(qubits)],
        }
    }

    pub fn len(&self) -> usize {
        self.paulis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paulis.is_empty()
    }

    pub fn paulis(&self) -> &[PauliString] {
        &self.paulis
    }
}

/// Seed provenance of a sampled assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwirlProvenance {
    pub master_seed: u64,
    pub run_index: u64,
}

/// One twirl per hard layer.
#[derive(Debug, Clone, PartialEq)]
pub struct TwirlAssignment {
    twirls: Vec<PauliString>,
    provenance: Option<TwirlProvenance>,
}

impl TwirlAssignment {
    pub fn from_twirls(twirls: Vec<PauliString>) -> TwirlAssignment {
        TwirlAssignment {
            twirls,
            provenance: None,
        }
    }

    pub fn twirls(&self) -> &[PauliString] {
        &self.twirls
    }

    pub fn provenance(&self) -> Option<TwirlProvenance> {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.twirls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twirls.is_empty()
    }

    /// layer index → Pauli label, for exact replay.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "twirls": self
                .twirls
                .iter()
                .enumerate()
                .map(|(i, p)| serde_json::json!({ "layer": i, "twirl": p.label() }))
                .collect::<Vec<_>>(),
            "provenance": self.provenance,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<TwirlAssignment> {
        let arr = value
            .get("twirls")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::InvalidParameter("missing 'twirls' array".into()))?;
        let mut twirls = vec![None; arr.len()];
        for entry in arr {
            let layer = entry
                .get("layer")
                .and_then(|v| v.as_u64())
                .ok_or_else(|| Error::InvalidParameter("missing 'layer'".into()))?
                as usize;
            let label = entry
                .get("twirl")
                .and_then(|v| v.as_str())
                .ok_or_else(|| Error::InvalidParameter("missing 'twirl'".into()))?;
            if layer >= twirls.len() {
                return Err(Error::InvalidParameter(format!("layer {layer} out of range")));
            }
            twirls[layer] = Some(PauliString::parse(label)?);
        }
        let twirls = twirls
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidParameter("gap in layer indices".into()))?;
        Ok(TwirlAssignment {
            twirls,
            provenance: None,
        })
    }
}

/// Independent uniform draw per hard layer, keyed by
/// (master seed, run index, layer index) so the assignment is identical
/// however the ensemble is scheduled.
pub fn sample_twirls(
    circuit: &Circuit,
    master_seed: u64,
    run_index: u64,
    set: &TwirlSet,
) -> Result<TwirlAssignment> {
    if set.is_empty() {
        return Err(Error::EmptyTwirlSet);
    }
    let twirls = (0..circuit.hard_layer_count())
        .map(|layer| {
            let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
            rng.set_stream(exec::derive_stream(&[3, run_index, layer as u64]));
            let pick = rng.random_range(0..set.len());
            set.paulis()[pick].clone()
        })
        .collect();
    Ok(TwirlAssignment {
        twirls,
        provenance: Some(TwirlProvenance {
            master_seed,
            run_index,
        }),
    })
}

/// All |set|^(hard layers) assignments with equal weight, for exact
/// (shot-noise-free) averages. Capped to keep enumeration honest.
pub const ENUMERATION_CAP: usize = 4096;

pub fn enumerate_assignments(circuit: &Circuit, set: &TwirlSet) -> Result<Vec<TwirlAssignment>> {
    if set.is_empty() {
        return Err(Error::EmptyTwirlSet);
    }
    let layers = circuit.hard_layer_count();
    let needed = (set.len() as u128).pow(layers as u32);
    if needed > ENUMERATION_CAP as u128 {
        return Err(Error::EnumerationCapExceeded {
            needed,
            cap: ENUMERATION_CAP,
        });
    }
    let total = needed as usize;
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut twirls = Vec::with_capacity(layers);
        for _ in 0..layers {
            twirls.push(set.paulis()[code % set.len()].clone());
            code /= set.len();
        }
        out.push(TwirlAssignment {
            twirls,
            provenance: None,
        });
    }
    Ok(out)
}

fn merge_pending(layers: &mut Vec<Layer>, pending: Option<(String, CMat)>) {
    if let Some((label, unitary)) = pending {
        layers.push(Layer::Easy(EasyLayer { label, unitary }));
    }
}

/// Fold T before and Tc = U₀T†U₀† after every hard layer, merging with
/// neighbouring easy layers so the layer budget does not grow.
pub fn apply_twirls(circuit: &Circuit, assignment: &TwirlAssignment) -> Result<Circuit> {
    if assignment.len() != circuit.hard_layer_count() {
        return Err(Error::AssignmentMismatch {
            expected: circuit.hard_layer_count(),
            found: assignment.len(),
        });
    }
    let mut out = Circuit::new(circuit.qubits());
    let mut layers: Vec<Layer> = Vec::new();
    // pending easy product accumulated until the next hard layer or the end
    let mut pending: Option<(String, CMat)> = None;
    let mut ordinal = 0usize;

    for layer in circuit.layers() {
        match layer {
            Layer::Easy(e) => {
                pending = Some(match pending {
                    None => (e.label.clone(), e.unitary.clone()),
                    Some((label, u)) => (format!("{}*{}", e.label, label), e.unitary.dot(&u)),
                });
            }
            Layer::Hard(h) => {
                let t = &assignment.twirls()[ordinal];
                let t_mat = t.matrix();
                // twirl merges into the easy product before the hard layer
                pending = Some(match pending {
                    None => (format!("T[{t}]"), t_mat.clone()),
                    Some((label, u)) => (format!("T[{t}]*{label}"), t_mat.dot(&u)),
                });
                merge_pending(&mut layers, pending.take());
                layers.push(Layer::Hard(h.clone()));
                // correction becomes the head of the next easy product
                let correction = h.target().dot(&dagger(&t_mat)).dot(&dagger(h.target()));
                pending = Some((format!("Tc[{t}]"), correction));
                ordinal += 1;
            }
        }
    }
    merge_pending(&mut layers, pending);
    for layer in layers {
        out.push_layer(layer)?;
    }
    Ok(out)
}

/// Sign rule for the dressed local step: component j keeps its sign iff
/// the twirl commutes with σ̂_j.
pub fn dress_error(r_lo: &ErrorVector, twirl: &PauliString) -> Result<ErrorVector> {
    let qubits = r_lo.qubits();
    if twirl.qubits() != qubits {
        return Err(Error::QubitMismatch {
            expected: qubits,
            found: twirl.qubits(),
        });
    }
    let mut components = Vec::with_capacity(r_lo.components().len());
    for (j, &c) in r_lo.components().iter().enumerate() {
        let axis = PauliString::from_index(j + 1, qubits);
        let sign = if commutes(twirl, &axis)? { 1.0 } else { -1.0 };
        components.push(sign * c);
    }
    ErrorVector::from_components(qubits, components)
}
