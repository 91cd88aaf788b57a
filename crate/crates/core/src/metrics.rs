// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fidelities, randomized-compiling ensemble averages, error-walk
//! statistics, and scaling-exponent fits.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::circuit::{
    propagate_error_front, simulate_exact, Circuit, CircuitNoise, ErrorOrder, RealizationMode,
};
use crate::error::{Error, Result};
use crate::exec::{self, pairwise_mean, pairwise_sum};
use crate::linalg::{CMat, CVec};
use crate::twirl::{apply_twirls, enumerate_assignments, sample_twirls, TwirlAssignment, TwirlSet};

fn check_normalized(norm_sqr: f64) -> Result<()> {
    let defect = (norm_sqr.sqrt() - 1.0).abs();
    if defect > 1e-9 {
        return Err(Error::Unnormalized(defect));
    }
    Ok(())
}

/// |⟨target|ψ⟩|² for pure states.
pub fn state_fidelity_pure(psi: &CVec, target: &CVec) -> Result<f64> {
    if psi.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            found: psi.len(),
        });
    }
    check_normalized(psi.iter().map(|z| z.norm_sqr()).sum())?;
    check_normalized(target.iter().map(|z| z.norm_sqr()).sum())?;
    let overlap: C64 = target
        .iter()
        .zip(psi.iter())
        .map(|(t, p)| t.conj() * p)
        .sum();
    Ok(overlap.norm_sqr().clamp(0.0, 1.0 + 1e-9))
}

/// ⟨target|ρ|target⟩ for an averaged density matrix.
pub fn state_fidelity_density(rho: &CMat, target: &CVec) -> Result<f64> {
    if rho.nrows() != target.len() || rho.ncols() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            found: rho.nrows(),
        });
    }
    check_normalized(target.iter().map(|z| z.norm_sqr()).sum())?;
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..target.len() {
        for b in 0..target.len() {
            acc += target[a].conj() * rho[[a, b]] * target[b];
        }
    }
    debug_assert!(acc.im.abs() < 1e-9);
    Ok(acc.re.clamp(0.0, 1.0 + 1e-9))
}

/// Noise supplied to ensemble runs.
#[derive(Debug, Clone, Copy)]
pub enum NoiseSource<'a> {
    /// The same realizations for every member (deterministic miscalibration).
    Fixed(&'a CircuitNoise),
    /// Fresh draws per member from each term's own process.
    Stochastic { mode: RealizationMode },
}

impl<'a> NoiseSource<'a> {
    fn for_member(
        &self,
        circuit: &Circuit,
        master_seed: u64,
        member: u64,
    ) -> Result<CircuitNoise> {
        match self {
            NoiseSource::Fixed(noise) => Ok((*noise).clone()),
            NoiseSource::Stochastic { mode } => {
                CircuitNoise::draw(circuit, master_seed, member, *mode)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum TwirlShots {
    /// Every assignment exactly once; shot-noise-free.
    Enumerate,
    /// Seeded Monte Carlo over assignments.
    Sample { runs: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct FidelityEstimate {
    pub fidelity: f64,
    pub std_error: f64,
    pub members: usize,
}

/// Randomized-compiling average: output density matrix averaged over
/// (assignment, realization) pairs, then projected on the target state.
/// The pairwise reduction keeps results bit-identical across thread counts.
#[allow(clippy::too_many_arguments)]
pub fn rc_average_fidelity(
    circuit: &Circuit,
    set: &TwirlSet,
    shots: TwirlShots,
    noise: NoiseSource<'_>,
    initial: &CVec,
    target: &CVec,
    master_seed: u64,
    refine: usize,
) -> Result<FidelityEstimate> {
    let assignments: Vec<TwirlAssignment> = match shots {
        TwirlShots::Enumerate => enumerate_assignments(circuit, set)?,
        TwirlShots::Sample { runs } => {
            if runs == 0 {
                return Err(Error::InvalidParameter("need at least one shot".into()));
            }
            (0..runs)
                .map(|r| sample_twirls(circuit, master_seed, r as u64, set))
                .collect::<Result<Vec<_>>>()?
        }
    };
    let members = assignments.len();
    let dim = circuit.dim();

    let outputs: Vec<Result<(CVec, f64)>> = exec::run_indexed(members, |i| {
        let twirled = apply_twirls(circuit, &assignments[i])?;
        let member_noise = noise.for_member(circuit, master_seed, i as u64)?;
        let run = simulate_exact(&twirled, &member_noise, Some(initial), refine)?;
        let psi = run.final_state.expect("initial state supplied");
        let f = state_fidelity_pure(&psi, target)?;
        Ok((psi, f))
    });
    let mut states = Vec::with_capacity(members);
    let mut fidelities = Vec::with_capacity(members);
    for out in outputs {
        let (psi, f) = out?;
        states.push(psi);
        fidelities.push(f);
    }

    // ρ_avg entrywise with a fixed pairwise tree
    let mut rho: CMat = Array2::zeros((dim, dim));
    let mut scratch_re = vec![0.0; members];
    let mut scratch_im = vec![0.0; members];
    for a in 0..dim {
        for b in 0..dim {
            for (i, psi) in states.iter().enumerate() {
                let v = psi[a] * psi[b].conj();
                scratch_re[i] = v.re;
                scratch_im[i] = v.im;
            }
            rho[[a, b]] = C64::new(
                pairwise_sum(&scratch_re) / members as f64,
                pairwise_sum(&scratch_im) / members as f64,
            );
        }
    }
    let fidelity = state_fidelity_density(&rho, target)?;

    let std_error = match shots {
        TwirlShots::Enumerate => 0.0,
        TwirlShots::Sample { .. } => batch_means_std_error(&fidelities),
    };
    Ok(FidelityEstimate {
        fidelity,
        std_error,
        members,
    })
}

fn batch_means_std_error(samples: &[f64]) -> f64 {
    let batches = samples.len().clamp(1, 10);
    if batches < 2 {
        return 0.0;
    }
    let per = samples.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| {
            let lo = b * per;
            let hi = if b == batches - 1 { samples.len() } else { lo + per };
            pairwise_mean(&samples[lo..hi])
        })
        .collect();
    let grand = pairwise_mean(&means);
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>()
        / (batches as f64 - 1.0);
    (var / batches as f64).sqrt()
}

/// Per-depth error-distance statistics of a twirled circuit ensemble.
#[derive(Debug, Clone)]
pub struct WalkStats {
    pub depths: Vec<usize>,
    /// deterministic bare-circuit distance at each depth
    pub bare: Vec<f64>,
    /// distances of the run-0 twirled trajectory
    pub single_shot: Vec<f64>,
    /// √(mean |Φ_total|²) over runs
    pub rms: Vec<f64>,
    /// mean |Φ_total|² and its standard error
    pub mean_square: Vec<f64>,
    pub mean_square_se: Vec<f64>,
    pub runs: usize,
}

/// Run `runs` independently twirled copies of `circuit` and collect
/// distances at the checkpoint depths (counted in hard layers).
pub fn error_walk_ensemble(
    circuit: &Circuit,
    set: &TwirlSet,
    runs: usize,
    noise: NoiseSource<'_>,
    depths: &[usize],
    master_seed: u64,
    order: ErrorOrder,
) -> Result<WalkStats> {
    let max_depth = circuit.hard_layer_count();
    if runs == 0 {
        return Err(Error::InvalidParameter("need at least one run".into()));
    }
    for &d in depths {
        if d == 0 || d > max_depth {
            return Err(Error::InvalidParameter(format!(
                "checkpoint depth {d} outside 1..={max_depth}"
            )));
        }
    }

    let bare_noise = noise.for_member(circuit, master_seed, u64::MAX)?;
    let bare_traj = propagate_error_front(circuit, &bare_noise, order)?;
    let bare: Vec<f64> = depths.iter().map(|&d| bare_traj.distances()[d - 1]).collect();

    let per_run: Vec<Result<Vec<f64>>> = exec::run_indexed(runs, |r| {
        let assignment = sample_twirls(circuit, master_seed, r as u64, set)?;
        let twirled = apply_twirls(circuit, &assignment)?;
        let run_noise = noise.for_member(circuit, master_seed, r as u64)?;
        let traj = propagate_error_front(&twirled, &run_noise, order)?;
        Ok(depths.iter().map(|&d| traj.distances()[d - 1]).collect())
    });
    let mut distances: Vec<Vec<f64>> = Vec::with_capacity(runs);
    for row in per_run {
        distances.push(row?);
    }

    let single_shot = distances[0].clone();
    let mut rms = Vec::with_capacity(depths.len());
    let mut mean_square = Vec::with_capacity(depths.len());
    let mut mean_square_se = Vec::with_capacity(depths.len());
    for di in 0..depths.len() {
        let squares: Vec<f64> = distances.iter().map(|row| row[di] * row[di]).collect();
        let mean = pairwise_mean(&squares);
        let var = squares.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>()
            / (runs as f64 - 1.0).max(1.0);
        mean_square.push(mean);
        mean_square_se.push((var / runs as f64).sqrt());
        rms.push(mean.max(0.0).sqrt());
    }

    Ok(WalkStats {
        depths: depths.to_vec(),
        bare,
        single_shot,
        rms,
        mean_square,
        mean_square_se,
        runs,
    })
}

/// Data for a log-log scaling fit.
#[derive(Debug, Clone)]
pub struct ScalingSeries {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// ensemble spread per point (0 for deterministic data)
    pub spread: Vec<f64>,
}

impl ScalingSeries {
    pub fn new(x: Vec<f64>, y: Vec<f64>, spread: Vec<f64>) -> ScalingSeries {
        ScalingSeries { x, y, spread }
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ExponentFit {
    pub exponent: f64,
    pub std_error: f64,
    pub ci95: f64,
    pub points_used: usize,
}

/// Least-squares slope of log y against log x, with the confidence interval
/// taken from the fit residuals. `skip_lowest` drops the smallest-x points
/// (transient suppression for ensemble data); the precondition of six
/// points over a decade applies to the full series.
pub fn fit_scaling_exponent(series: &ScalingSeries, skip_lowest: usize) -> Result<ExponentFit> {
    if series.x.len() != series.y.len() {
        return Err(Error::DimensionMismatch {
            expected: series.x.len(),
            found: series.y.len(),
        });
    }
    if series.x.len() < 6 {
        return Err(Error::InvalidParameter(format!(
            "scaling fit needs at least 6 points, got {}",
            series.x.len()
        )));
    }
    for (&x, &y) in series.x.iter().zip(&series.y) {
        if !x.is_finite() || x <= 0.0 || !y.is_finite() || y <= 0.0 {
            return Err(Error::NonPositiveData(format!("({x}, {y})")));
        }
    }
    let span = series.x.iter().cloned().fold(f64::MIN, f64::max)
        / series.x.iter().cloned().fold(f64::MAX, f64::min);
    if span < 10.0 {
        return Err(Error::InvalidParameter(format!(
            "x range spans only a factor {span:.2}, need a decade"
        )));
    }

    let mut points: Vec<(f64, f64)> = series
        .x
        .iter()
        .zip(&series.y)
        .map(|(&x, &y)| (x, y))
        .collect();
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let points = &points[skip_lowest.min(points.len().saturating_sub(3))..];
    let n = points.len() as f64;

    let lx: Vec<f64> = points.iter().map(|(x, _)| x.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|(_, y)| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = (n - 2.0).max(1.0);
    let std_error = (ss_res / dof / sxx).sqrt();
    Ok(ExponentFit {
        exponent: slope,
        std_error,
        ci95: 1.96 * std_error,
        points_used: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::presets;
    use crate::spectra::NoiseProcess;
    use ndarray::Array1;

    fn basis_state(dim: usize, idx: usize) -> CVec {
        let mut v: CVec = Array1::zeros(dim);
        v[idx] = C64::new(1.0, 0.0);
        v
    }

    #[test]
    fn exact_power_laws_fit_cleanly() {
        let x: Vec<f64> = (0..8).map(|k| 2.0f64.powi(k)).collect();
        let linear = ScalingSeries::new(x.clone(), x.iter().map(|v| 3.0 * v).collect(), vec![]);
        let fit = fit_scaling_exponent(&linear, 0).unwrap();
        assert!((fit.exponent - 1.0).abs() < 0.01);
        assert!(fit.ci95 < 0.01);

        let sqrt = ScalingSeries::new(x.clone(), x.iter().map(|v| 2.0 * v.sqrt()).collect(), vec![]);
        let fit = fit_scaling_exponent(&sqrt, 2).unwrap();
        assert!((fit.exponent - 0.5).abs() < 0.01);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let x: Vec<f64> = (0..8).map(|k| 2.0f64.powi(k)).collect();
        let y: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!(matches!(
            fit_scaling_exponent(&ScalingSeries::new(x.clone(), y, vec![]), 0),
            Err(Error::NonPositiveData(_))
        ));
        let narrow = ScalingSeries::new(
            vec![1.0, 1.5, 2.0, 2.5, 3.0, 3.5],
            vec![1.0; 6],
            vec![],
        );
        assert!(fit_scaling_exponent(&narrow, 0).is_err());
        let short = ScalingSeries::new(vec![1.0, 10.0, 100.0], vec![1.0; 3], vec![]);
        assert!(fit_scaling_exponent(&short, 0).is_err());
    }

    #[test]
    fn pure_state_fidelities() {
        let psi = basis_state(4, 2);
        assert!((state_fidelity_pure(&psi, &basis_state(4, 2)).unwrap() - 1.0).abs() < 1e-15);
        assert!(state_fidelity_pure(&psi, &basis_state(4, 1)).unwrap() < 1e-15);
        let mut unnorm: CVec = Array1::zeros(4);
        unnorm[0] = C64::new(0.5, 0.0);
        assert!(matches!(
            state_fidelity_pure(&unnorm, &psi),
            Err(Error::Unnormalized(_))
        ));
    }

    #[test]
    fn depolarized_density_fidelity_is_quarter() {
        let rho = Array2::from_diag_elem(4, C64::new(0.25, 0.0));
        let f = state_fidelity_density(&rho, &basis_state(4, 3)).unwrap();
        assert!((f - 0.25).abs() < 1e-15);
    }

    fn iswap_single_layer(delta: f64) -> Circuit {
        presets::iswap_chain(1.0, 64, 1, NoiseProcess::quasi_static(delta, 0.0)).unwrap()
    }

    #[test]
    fn zero_noise_rc_fidelity_is_one() {
        let circuit = iswap_single_layer(0.0);
        let noise = CircuitNoise::constant(&circuit, 0.0);
        let initial = basis_state(4, 1);
        let run = simulate_exact(&circuit, &noise, Some(&initial), 2).unwrap();
        let target = run.final_state.unwrap();
        let est = rc_average_fidelity(
            &circuit,
            &TwirlSet::full(2),
            TwirlShots::Enumerate,
            NoiseSource::Fixed(&noise),
            &initial,
            &target,
            1,
            2,
        )
        .unwrap();
        assert!((est.fidelity - 1.0).abs() < 1e-10);
        assert_eq!(est.members, 16);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn identity_twirl_set_reproduces_bare_fidelity() {
        let delta = 0.04;
        let circuit = iswap_single_layer(delta);
        let noise = CircuitNoise::constant(&circuit, delta);
        let initial = basis_state(4, 1);
        let ideal = presets::iswap_chain(1.0, 64, 1, NoiseProcess::quasi_static(0.0, 0.0))
            .unwrap()
            .ideal_unitary();
        let target = ideal.dot(&initial);
        let bare_run = simulate_exact(&circuit, &noise, Some(&initial), 2).unwrap();
        let bare = state_fidelity_pure(&bare_run.final_state.unwrap(), &target).unwrap();
        let est = rc_average_fidelity(
            &circuit,
            &TwirlSet::identity_only(2),
            TwirlShots::Enumerate,
            NoiseSource::Fixed(&noise),
            &initial,
            &target,
            1,
            2,
        )
        .unwrap();
        assert!((est.fidelity - bare).abs() < 1e-12);
    }

    #[test]
    fn rc_beats_bare_on_iswap_sweep() {
        let initial = basis_state(4, 1);
        let ideal = presets::iswap_chain(1.0, 64, 1, NoiseProcess::quasi_static(0.0, 0.0))
            .unwrap()
            .ideal_unitary();
        let target = ideal.dot(&initial);
        for &delta in &[0.02, 0.05, 0.1] {
            let circuit = iswap_single_layer(delta);
            let noise = CircuitNoise::constant(&circuit, delta);
            let bare_run = simulate_exact(&circuit, &noise, Some(&initial), 2).unwrap();
            let bare = state_fidelity_pure(&bare_run.final_state.unwrap(), &target).unwrap();
            let rc = rc_average_fidelity(
                &circuit,
                &TwirlSet::full(2),
                TwirlShots::Enumerate,
                NoiseSource::Fixed(&noise),
                &initial,
                &target,
                1,
                2,
            )
            .unwrap();
            assert!(
                rc.fidelity >= bare - 1e-12,
                "RC {:.6} below bare {bare:.6} at delta {delta}",
                rc.fidelity
            );
        }
    }

    #[test]
    fn walk_stats_basic_shape_and_determinism() {
        let circuit =
            presets::iswap_chain(1.0, 64, 8, NoiseProcess::quasi_static(0.01, 0.0)).unwrap();
        let noise = CircuitNoise::constant(&circuit, 0.01);
        let depths = [1, 2, 4, 8];
        let a = error_walk_ensemble(
            &circuit,
            &TwirlSet::full(2),
            16,
            NoiseSource::Fixed(&noise),
            &depths,
            5,
            ErrorOrder::First,
        )
        .unwrap();
        let b = error_walk_ensemble(
            &circuit,
            &TwirlSet::full(2),
            16,
            NoiseSource::Fixed(&noise),
            &depths,
            5,
            ErrorOrder::First,
        )
        .unwrap();
        assert_eq!(a.rms, b.rms, "ensemble statistics must be reproducible");
        // bare distance for the commuting chain is exactly linear in depth
        let step = a.bare[0];
        for (i, &d) in depths.iter().enumerate() {
            assert!((a.bare[i] - d as f64 * step).abs() < 1e-10);
        }
    }
}
