// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! The demonstration circuits: a CNOT built from one XX(π/2) hard gate
//! plus local Cliffords with δ(IZ − ZI + 0.5·ZZ) noise, and an iSWAP
//! generated by g(XX + YY) with Heisenberg δg(XX + YY + ZZ) noise that
//! commutes with the drive.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::pauli::PauliSum;
use crate::schedule::{
    cnot_composite, iswap_schedule, iswap_target, single_qubit_clifford, NoiseTerm, PulseShape,
};
use crate::spectra::NoiseProcess;

use super::{Circuit, HardLayer};

/// δH = IZ − ZI + 0.5·ZZ, the CNOT circuit's dephasing-type miscalibration.
pub fn cnot_noise_operator() -> PauliSum {
    PauliSum::parse(&[(1.0, "IZ"), (-1.0, "ZI"), (0.5, "ZZ")]).unwrap()
}

/// δH = XX + YY + ZZ, the iSWAP circuit's uncorrectable Heisenberg term.
pub fn iswap_noise_operator() -> PauliSum {
    PauliSum::parse(&[(1.0, "XX"), (1.0, "YY"), (1.0, "ZZ")]).unwrap()
}

/// The noisy XX(π/2) hard gate of the CNOT circuit.
pub fn xx_hard_layer(pulse: &PulseShape, process: NoiseProcess) -> Result<HardLayer> {
    let mut schedule = cnot_composite(pulse)?.hard;
    schedule.add_noise(NoiseTerm::additive(cnot_noise_operator(), process)?)?;
    HardLayer::new("xx_halfpi", schedule)
}

/// CNOT as [easy pre] · [noisy XX(π/2)] · [easy post].
pub fn cnot_circuit(pulse: &PulseShape, process: NoiseProcess) -> Result<Circuit> {
    let frag = cnot_composite(pulse)?;
    let mut schedule = frag.hard;
    schedule.add_noise(NoiseTerm::additive(cnot_noise_operator(), process)?)?;
    let hard = HardLayer::new("xx_halfpi", schedule)?;
    let mut circuit = Circuit::new(2);
    circuit.push_easy("cnot_pre", frag.pre)?;
    circuit.push_hard(hard)?;
    circuit.push_easy("cnot_post", frag.post)?;
    Ok(circuit)
}

/// One noisy iSWAP layer (constant drive g(XX + YY) for T = π/(4g)).
pub fn iswap_layer(g: f64, steps: usize, process: NoiseProcess) -> Result<HardLayer> {
    let mut schedule = iswap_schedule(g, steps)?;
    schedule.add_noise(NoiseTerm::additive(iswap_noise_operator(), process)?)?;
    HardLayer::with_target("iswap", schedule, iswap_target(g))
}

/// A chain of `depth` identical noisy iSWAP layers (data shared).
pub fn iswap_chain(g: f64, steps: usize, depth: usize, process: NoiseProcess) -> Result<Circuit> {
    let layer = iswap_layer(g, steps, process)?;
    let mut circuit = Circuit::new(2);
    for _ in 0..depth {
        circuit.push_hard(layer.clone())?;
    }
    Ok(circuit)
}

/// `n_cnot` noisy CNOTs with `n_hadamard` noise-free Hadamards interleaved
/// at seeded uniform-random positions; the Hadamard's qubit is also drawn
/// from the same stream. The interleaving pattern is a config choice, not
/// physics, so the seed is recorded by callers for replay.
pub fn cnot_hadamard_mix(
    pulse: &PulseShape,
    process: NoiseProcess,
    n_cnot: usize,
    n_hadamard: usize,
    interleave_seed: u64,
) -> Result<Circuit> {
    let frag = cnot_composite(pulse)?;
    let mut schedule = frag.hard;
    schedule.add_noise(NoiseTerm::additive(cnot_noise_operator(), process)?)?;
    let hard = HardLayer::new("xx_halfpi", schedule)?;

    let mut slots: Vec<bool> = std::iter::repeat_n(true, n_cnot)
        .chain(std::iter::repeat_n(false, n_hadamard))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(interleave_seed);
    slots.shuffle(&mut rng);

    let mut circuit = Circuit::new(2);
    for is_cnot in slots {
        if is_cnot {
            circuit.push_easy("cnot_pre", frag.pre.clone())?;
            circuit.push_hard(hard.clone())?;
            circuit.push_easy("cnot_post", frag.post.clone())?;
        } else {
            let qubit = if rng.random::<bool>() { 0 } else { 1 };
            circuit.push_easy(
                format!("hadamard_q{qubit}"),
                single_qubit_clifford("H", qubit, 2)?,
            )?;
        }
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::phase_aligned_distance;
    use crate::schedule::{cnot_matrix, TimeGrid};
    use std::f64::consts::PI;

    #[test]
    fn cnot_circuit_ideal_unitary_is_cnot() {
        let pulse = PulseShape::cosine(TimeGrid::new(1.0, 256).unwrap(), PI / 2.0);
        let circuit = cnot_circuit(&pulse, NoiseProcess::quasi_static(0.0, 0.0)).unwrap();
        assert!(phase_aligned_distance(&circuit.ideal_unitary(), &cnot_matrix()) < 1e-8);
        assert_eq!(circuit.hard_layer_count(), 1);
    }

    #[test]
    fn mix_has_requested_layer_counts() {
        let pulse = PulseShape::cosine(TimeGrid::new(1.0, 64).unwrap(), PI / 2.0);
        let circuit = cnot_hadamard_mix(
            &pulse,
            NoiseProcess::quasi_static(0.01, 0.0),
            10,
            4,
            42,
        )
        .unwrap();
        assert_eq!(circuit.hard_layer_count(), 10);
        let hadamards = circuit
            .layers()
            .iter()
            .filter(|l| matches!(l, super::super::Layer::Easy(e) if e.label.starts_with("hadamard")))
            .count();
        assert_eq!(hadamards, 4);
    }

    #[test]
    fn mix_is_deterministic_per_seed() {
        let pulse = PulseShape::cosine(TimeGrid::new(1.0, 64).unwrap(), PI / 2.0);
        let labels = |seed: u64| -> Vec<String> {
            cnot_hadamard_mix(&pulse, NoiseProcess::quasi_static(0.0, 0.0), 6, 3, seed)
                .unwrap()
                .layers()
                .iter()
                .map(|l| match l {
                    super::super::Layer::Easy(e) => e.label.clone(),
                    super::super::Layer::Hard(h) => h.label().to_string(),
                })
                .collect()
        };
        assert_eq!(labels(5), labels(5));
        assert_ne!(labels(5), labels(6));
    }
}
