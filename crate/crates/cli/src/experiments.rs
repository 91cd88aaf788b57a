// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! The experiment runners behind the subcommands.

use std::io::Write;

use ndarray::Array1;
use num_complex::Complex64 as C64;

use qtailor::circuit::presets;
use qtailor::linalg::dagger;
use qtailor::metrics::{NoiseSource, TwirlShots};
use qtailor::schedule::optimizer::{optimize_first_order_pulse, robust_xx_spec};
use qtailor::*;

use crate::config::{
    CircuitKind, CouplingSpec, ProcessSpec, PulseKind, ResolvedConfig, StatePair,
};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_float, OutputContext};

fn basis_state(dim: usize, idx: usize) -> CVec {
    let mut v: CVec = Array1::zeros(dim);
    v[idx] = C64::new(1.0, 0.0);
    v
}

fn plus_zero_state() -> CVec {
    let mut v: CVec = Array1::zeros(4);
    let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    v[0] = a;
    v[2] = a;
    v
}

fn trivial_pulse(cfg: &ResolvedConfig) -> CliResult<PulseShape> {
    let grid = TimeGrid::new(cfg.pulse.duration, cfg.pulse.steps)?;
    Ok(PulseShape::cosine(grid, std::f64::consts::FRAC_PI_2))
}

/// The dephasing-robust XX pulse, imported or optimized per the pulse spec.
fn robust_pulse(cfg: &ResolvedConfig) -> CliResult<PulseShape> {
    match cfg.pulse.kind {
        PulseKind::Imported => {
            let path = cfg
                .pulse
                .path
                .as_ref()
                .ok_or_else(|| CliError::Config("pulse.path: missing pulse file".into()))?;
            Ok(import_pulse(path)?)
        }
        PulseKind::Optimized | PulseKind::Cosine => {
            let grid = TimeGrid::new(cfg.pulse.duration, cfg.pulse.steps)?;
            let report = optimize_first_order_pulse(&robust_xx_spec(grid, cfg.pulse.fourier_terms))?;
            Ok(report.pulse)
        }
    }
}

fn fit_or_reason(
    xs: &[f64],
    ys: &[f64],
    skip: usize,
) -> (Option<ExponentFit>, Option<String>) {
    match fit_scaling_exponent(&ScalingSeries::new(xs.to_vec(), ys.to_vec(), vec![]), skip) {
        Ok(fit) => (Some(fit), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

// ---------------------------------------------------------------------------
// error-walk
// ---------------------------------------------------------------------------

pub fn run_error_walk(cfg: &ResolvedConfig) -> CliResult<()> {
    let out = OutputContext::new(cfg)?;
    let delta = cfg.noise.deltas[0];
    let process = cfg.noise.process.to_process(delta);

    let circuit = match cfg.circuit.kind {
        CircuitKind::IswapChain => {
            let max_depth = *cfg.circuit.depths.iter().max().unwrap();
            presets::iswap_chain(cfg.circuit.g, cfg.circuit.iswap_steps, max_depth, process)?
        }
        CircuitKind::CnotHadamardMix => presets::cnot_hadamard_mix(
            &trivial_pulse(cfg)?,
            process,
            cfg.circuit.layers,
            cfg.circuit.hadamards,
            cfg.circuit.interleave_seed,
        )?,
        CircuitKind::Cnot => unreachable!("rejected by validation"),
    };
    let set = cfg.twirl.set.to_set(2)?;

    let stats = error_walk_ensemble(
        &circuit,
        &set,
        cfg.twirl.shots,
        NoiseSource::Stochastic {
            mode: cfg.noise.mode,
        },
        &cfg.circuit.depths,
        cfg.master_seed,
        ErrorOrder::First,
    )?;

    let mut w = out.csv_writer("error_walk.csv")?;
    writeln!(
        w,
        "depth,bare_distance,single_shot_distance,rms_distance,mean_square,mean_square_se"
    )?;
    for (i, &depth) in stats.depths.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            depth,
            fmt_float(stats.bare[i]),
            fmt_float(stats.single_shot[i]),
            fmt_float(stats.rms[i]),
            fmt_float(stats.mean_square[i]),
            fmt_float(stats.mean_square_se[i]),
        )?;
    }
    w.flush()?;

    // full trajectories of the bare circuit and the run-0 twirled copy
    let bare_noise = CircuitNoise::draw(&circuit, cfg.master_seed, u64::MAX, cfg.noise.mode)?;
    let bare_traj = propagate_error_front(&circuit, &bare_noise, ErrorOrder::First)?;
    let mut w = out.csv_writer("trajectory_bare.csv")?;
    bare_traj.write_csv(&mut w, cfg.circuit.top_axes)?;
    w.flush()?;

    let assignment = sample_twirls(&circuit, cfg.master_seed, 0, &set)?;
    let twirled = apply_twirls(&circuit, &assignment)?;
    let run_noise = CircuitNoise::draw(&circuit, cfg.master_seed, 0, cfg.noise.mode)?;
    let twirled_traj = propagate_error_front(&twirled, &run_noise, ErrorOrder::First)?;
    let mut w = out.csv_writer("trajectory_twirled.csv")?;
    twirled_traj.write_csv(&mut w, cfg.circuit.top_axes)?;
    w.flush()?;
    out.write_json("run0_twirl_assignment.json", assignment.to_json())?;

    let xs: Vec<f64> = stats.depths.iter().map(|&d| d as f64).collect();
    let (bare_fit, bare_note) = fit_or_reason(&xs, &stats.bare, 2);
    let (rms_fit, rms_note) = fit_or_reason(&xs, &stats.rms, 2);
    out.write_json(
        "error_walk_fit.json",
        serde_json::json!({
            "runs": stats.runs,
            "depths": stats.depths,
            "bare_exponent": bare_fit,
            "bare_fit_note": bare_note,
            "rms_exponent": rms_fit,
            "rms_fit_note": rms_note,
            "fit_skips_lowest": 2,
            "single_shot_final_distance": stats.single_shot.last(),
            "bare_final_distance": stats.bare.last(),
        }),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// fidelity-sweep
// ---------------------------------------------------------------------------

struct SweepCircuit {
    circuit: Circuit,
}

fn build_single_layer(cfg: &ResolvedConfig, pulse: &PulseShape, delta: f64) -> CliResult<SweepCircuit> {
    let process = cfg.noise.process.to_process(delta);
    let circuit = match cfg.circuit.kind {
        CircuitKind::Cnot => presets::cnot_circuit(pulse, process)?,
        CircuitKind::IswapChain => {
            presets::iswap_chain(cfg.circuit.g, cfg.circuit.iswap_steps, 1, process)?
        }
        CircuitKind::CnotHadamardMix => unreachable!("rejected by validation"),
    };
    Ok(SweepCircuit { circuit })
}

fn sweep_states(cfg: &ResolvedConfig, ideal: &CMat) -> (CVec, CVec) {
    let initial = match cfg.circuit.state {
        StatePair::Computational => basis_state(4, 1),
        StatePair::Bell => plus_zero_state(),
    };
    let target = ideal.dot(&initial);
    (initial, target)
}

pub fn run_fidelity_sweep(cfg: &ResolvedConfig) -> CliResult<()> {
    let out = OutputContext::new(cfg)?;
    let with_robust = cfg.pulse.kind != PulseKind::Cosine;
    if with_robust && cfg.circuit.kind != CircuitKind::Cnot {
        return Err(CliError::Config(
            "pulse.kind: robust pulses apply to the \"cnot\" circuit".into(),
        ));
    }
    let pulse = trivial_pulse(cfg)?;
    let robust = if with_robust {
        Some(robust_pulse(cfg)?)
    } else {
        None
    };
    let shots = if cfg.twirl.enumerate {
        TwirlShots::Enumerate
    } else {
        TwirlShots::Sample {
            runs: cfg.twirl.shots,
        }
    };
    let set = cfg.twirl.set.to_set(2)?;

    let mut w = out.csv_writer("fidelity_sweep.csv")?;
    if with_robust {
        writeln!(
            w,
            "delta,f_bare,f_rc,f_rc_se,f_bare_robust,f_rc_robust,f_rc_robust_se"
        )?;
    } else {
        writeln!(w, "delta,f_bare,f_rc,f_rc_se")?;
    }

    let mut rows = Vec::new();
    for &delta in &cfg.noise.deltas {
        let sweep = build_single_layer(cfg, &pulse, delta)?;
        let ideal = sweep.circuit.ideal_unitary();
        let (initial, target) = sweep_states(cfg, &ideal);

        let evaluate = |circuit: &Circuit| -> CliResult<(f64, f64, f64)> {
            let bare_noise =
                CircuitNoise::draw(circuit, cfg.master_seed, u64::MAX, cfg.noise.mode)?;
            let bare_run = simulate_exact(circuit, &bare_noise, Some(&initial), 2)?;
            let f_bare = state_fidelity_pure(&bare_run.final_state.unwrap(), &target)?;
            let est = rc_average_fidelity(
                circuit,
                &set,
                shots,
                NoiseSource::Stochastic {
                    mode: cfg.noise.mode,
                },
                &initial,
                &target,
                cfg.master_seed,
                2,
            )?;
            Ok((f_bare, est.fidelity, est.std_error))
        };

        let (f_bare, f_rc, f_rc_se) = evaluate(&sweep.circuit)?;
        if let Some(robust_pulse) = &robust {
            let sweep_r = build_single_layer(
                &ResolvedConfig {
                    circuit: cfg.circuit.clone(),
                    ..cfg.clone()
                },
                robust_pulse,
                delta,
            )?;
            let (f_bare_r, f_rc_r, f_rc_r_se) = evaluate(&sweep_r.circuit)?;
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt_float(delta),
                fmt_float(f_bare),
                fmt_float(f_rc),
                fmt_float(f_rc_se),
                fmt_float(f_bare_r),
                fmt_float(f_rc_r),
                fmt_float(f_rc_r_se),
            )?;
            rows.push(serde_json::json!({
                "delta": delta,
                "f_bare": f_bare,
                "f_rc": f_rc,
                "f_rc_se": f_rc_se,
                "f_bare_robust": f_bare_r,
                "f_rc_robust": f_rc_r,
                "f_rc_robust_se": f_rc_r_se,
            }));
        } else {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_float(delta),
                fmt_float(f_bare),
                fmt_float(f_rc),
                fmt_float(f_rc_se),
            )?;
            rows.push(serde_json::json!({
                "delta": delta,
                "f_bare": f_bare,
                "f_rc": f_rc,
                "f_rc_se": f_rc_se,
            }));
        }
    }
    w.flush()?;
    out.write_json("fidelity_sweep.json", serde_json::json!({ "rows": rows }))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// ptm
// ---------------------------------------------------------------------------

fn xx_layer_with(cfg: &ResolvedConfig, pulse: &PulseShape, delta: f64) -> CliResult<HardLayer> {
    let process = cfg.noise.process.to_process(delta);
    Ok(presets::xx_hard_layer(pulse, process)?)
}

/// Exact error unitary of the layer for one drawn realization.
fn layer_error_unitary(layer: &HardLayer, noise: &[NoiseRealization]) -> CliResult<CMat> {
    let noisy = propagate_noisy(layer.schedule(), noise, 2)?;
    Ok(dagger(layer.propagation().final_unitary()).dot(&noisy))
}

fn draw_layer_noise(layer: &HardLayer, seed: u64, member: u64) -> CliResult<Vec<NoiseRealization>> {
    layer
        .schedule()
        .noise()
        .iter()
        .enumerate()
        .map(|(source, term)| {
            Ok(synthesize_realization(
                &term.process,
                layer.schedule().grid(),
                seed,
                &[4, member, source as u64],
            )?)
        })
        .collect()
}

pub fn run_ptm(cfg: &ResolvedConfig) -> CliResult<()> {
    let out = OutputContext::new(cfg)?;
    let delta = cfg.noise.deltas[0];
    let trivial = trivial_pulse(cfg)?;
    let robust = robust_pulse(cfg)?;
    let set = cfg.twirl.set.to_set(2)?;

    let mut diagnostics = serde_json::Map::new();
    for (tag, pulse) in [("trivial", &trivial), ("robust", &robust)] {
        let layer = xx_layer_with(cfg, pulse, delta)?;

        let bare_noise = draw_layer_noise(&layer, cfg.master_seed, u64::MAX)?;
        let bare_ptm = Ptm::of_unitary(&layer_error_unitary(&layer, &bare_noise)?)?;

        let dressed: Vec<CMat> = if cfg.twirl.enumerate {
            let mut members = Vec::with_capacity(set.len());
            for (i, t) in set.paulis().iter().enumerate() {
                let noise = draw_layer_noise(&layer, cfg.master_seed, i as u64)?;
                let u_eps = layer_error_unitary(&layer, &noise)?;
                let tm = t.matrix();
                members.push(dagger(&tm).dot(&u_eps).dot(&tm));
            }
            members
        } else {
            let mut single = Circuit::new(2);
            single.push_hard(layer.clone())?;
            let mut members = Vec::with_capacity(cfg.twirl.shots);
            for run in 0..cfg.twirl.shots {
                let assignment = sample_twirls(&single, cfg.master_seed, run as u64, &set)?;
                let noise = draw_layer_noise(&layer, cfg.master_seed, run as u64)?;
                let u_eps = layer_error_unitary(&layer, &noise)?;
                let tm = assignment.twirls()[0].matrix();
                members.push(dagger(&tm).dot(&u_eps).dot(&tm));
            }
            members
        };
        let rc_ptm = Ptm::of_ensemble(&dressed)?;

        for (condition, ptm) in [("bare", &bare_ptm), ("rc", &rc_ptm)] {
            let name = format!("ptm_{condition}_{tag}.csv");
            let mut w = out.csv_writer(&name)?;
            ptm.write_csv(&mut w)?;
            w.flush()?;
            diagnostics.insert(
                format!("{condition}_{tag}"),
                serde_json::to_value(ptm_diagnostics(ptm)).expect("diagnostics serialize"),
            );
        }
    }
    diagnostics.insert(
        "axes".into(),
        serde_json::json!(all_paulis(2)
            .iter()
            .map(|p| p.label())
            .collect::<Vec<_>>()),
    );
    out.write_json(
        "ptm_diagnostics.json",
        serde_json::Value::Object(diagnostics),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// filter-function
// ---------------------------------------------------------------------------

pub fn run_filter_function(cfg: &ResolvedConfig) -> CliResult<()> {
    let out = OutputContext::new(cfg)?;
    let delta = cfg.noise.deltas[0];
    let process = cfg.noise.process.to_process(delta);
    let coupling = cfg.noise.coupling.unwrap_or(match cfg.noise.process {
        ProcessSpec::White { .. } => CouplingSpec::Amplitude,
        _ => CouplingSpec::Additive,
    });

    let mut schedule = xx_halfpi_schedule(&trivial_pulse(cfg)?)?;
    match coupling {
        CouplingSpec::Additive => {
            schedule.add_noise(NoiseTerm::additive(
                presets::cnot_noise_operator(),
                process.clone(),
            )?)?;
        }
        CouplingSpec::Amplitude => {
            let amp_op = PauliSum::parse(&[(0.5, "XX")])?;
            schedule.add_noise(NoiseTerm::multiplicative(amp_op, 0, process.clone())?)?;
        }
    }
    let prop = propagate_noiseless(&schedule)?;
    let curve = toggling_frame_curve(&schedule, &prop, 0)?;

    let mut w = out.csv_writer("error_curve.csv")?;
    curve.write_csv(&mut w)?;
    w.flush()?;

    let duration = schedule.duration();
    let omega_grid = OmegaGrid {
        max: cfg.noise.omega_harmonics * 2.0 * std::f64::consts::PI / duration,
        intervals: cfg.noise.omega_intervals,
    };
    let omegas = omega_grid.values();
    let filters = filter_function(&curve, &omegas);

    // active axes only
    let active: Vec<usize> = (0..curve.axis_count())
        .filter(|&j| (0..omegas.len()).any(|w| filters[[j, w]].norm() > 1e-9))
        .collect();
    let mut w = out.csv_writer("filter_function.csv")?;
    write!(w, "omega")?;
    for &j in &active {
        let label = PauliString::from_index(j + 1, 2);
        write!(w, ",re_{label},im_{label}")?;
    }
    writeln!(w)?;
    for (wi, &omega) in omegas.iter().enumerate() {
        write!(w, "{}", fmt_float(omega))?;
        for &j in &active {
            write!(
                w,
                ",{},{}",
                fmt_float(filters[[j, wi]].re),
                fmt_float(filters[[j, wi]].im)
            )?;
        }
        writeln!(w)?;
    }
    w.flush()?;

    // second moments with the dual-route checks
    let mean_profile = match cfg.noise.process {
        ProcessSpec::QuasiStatic { .. } if delta != 0.0 => {
            Some(vec![delta; schedule.grid().points()])
        }
        _ => None,
    };
    let model = SpectralModel::independent(vec![process.spectrum()]);
    let moment = second_moment(&[&curve], &model, &[mean_profile.clone()], omega_grid)?;

    let mut checks = serde_json::Map::new();
    // truncation monitor: double the ω window (where the grid resolves it)
    // and report how much the fluctuation moment moves
    if !process.spectrum().is_delta() {
        let nyquist_ok =
            (cfg.pulse.steps as f64) >= 4.0 * cfg.noise.omega_harmonics;
        if nyquist_ok {
            let wide = second_moment(
                &[&curve],
                &model,
                &[mean_profile],
                omega_grid.doubled(),
            )?;
            let base: f64 = moment.fluctuation.iter().sum();
            let extended: f64 = wide.fluctuation.iter().sum();
            let shift = if base.abs() > 0.0 {
                (extended - base).abs() / base.abs()
            } else {
                0.0
            };
            checks.insert("truncation_shift_on_doubling".into(), shift.into());
        } else {
            checks.insert(
                "truncation_shift_on_doubling".into(),
                serde_json::Value::String(
                    "skipped: grid cannot resolve the doubled window".into(),
                ),
            );
        }
    }
    match cfg.noise.process {
        ProcessSpec::QuasiStatic { std } => {
            // spectral route against the direct quadrature, exactly the same
            // integrals on both sides
            let unit = first_order_error(&curve, &NoiseRealization::constant(1.0))?;
            let mut max_rel = 0.0f64;
            for (j, &f) in moment.fluctuation.iter().enumerate() {
                let direct = std * std * unit.components()[j] * unit.components()[j];
                if direct > 1e-14 {
                    max_rel = max_rel.max((f - direct).abs() / direct);
                }
            }
            checks.insert("quasi_static_rel_error".into(), max_rel.into());
            if max_rel > 1e-9 {
                return Err(CliError::Numerical(format!(
                    "quasi-static spectral route deviates from direct quadrature by {max_rel:.3e} (limit 1e-9)"
                )));
            }
        }
        ProcessSpec::White { level } => {
            let time_route: f64 = white_noise_moment_time_route(&curve, level).iter().sum();
            let omega_route: f64 = moment.fluctuation.iter().sum();
            let rel = (omega_route - time_route).abs() / time_route;
            checks.insert("parseval_time_route".into(), time_route.into());
            checks.insert("parseval_omega_route".into(), omega_route.into());
            checks.insert("parseval_rel_error".into(), rel.into());
            if rel > 1e-6 {
                return Err(CliError::Numerical(format!(
                    "white-noise Parseval identity off by {rel:.3e} (limit 1e-6); \
                     time route {time_route:.6e}, omega route {omega_route:.6e}"
                )));
            }
        }
        ProcessSpec::OrnsteinUhlenbeck { .. } => {
            if cfg.noise.mc_shots > 0 {
                let shots = cfg.noise.mc_shots;
                let seed = cfg.master_seed;
                let sums: Vec<CliResult<f64>> = qtailor::exec::run_indexed(shots, |shot| {
                    let real = synthesize_realization(
                        &process,
                        curve.grid(),
                        seed,
                        &[5, shot as u64],
                    )?;
                    let r1 = first_order_error(&curve, &real)?;
                    Ok(r1.components().iter().map(|c| c * c).sum())
                });
                let mut values = Vec::with_capacity(shots);
                for s in sums {
                    values.push(s?);
                }
                let mc_total = qtailor::exec::pairwise_mean(&values);
                let spectral_total: f64 = moment.fluctuation.iter().sum();
                let rel = (mc_total - spectral_total).abs() / spectral_total;
                checks.insert("ou_monte_carlo_total".into(), mc_total.into());
                checks.insert("ou_spectral_total".into(), spectral_total.into());
                checks.insert("ou_rel_error".into(), rel.into());
                checks.insert("ou_shots".into(), shots.into());
                if rel > 0.05 {
                    return Err(CliError::Numerical(format!(
                        "OU Monte Carlo second moment off by {rel:.3} (limit 0.05)"
                    )));
                }
            }
        }
    }

    let axis_rows: Vec<serde_json::Value> = active
        .iter()
        .map(|&j| {
            serde_json::json!({
                "axis": PauliString::from_index(j + 1, 2).label(),
                "mean": moment.mean[j],
                "mean_squared": moment.mean_squared[j],
                "fluctuation": moment.fluctuation[j],
                "total": moment.mean_squared[j] + moment.fluctuation[j],
            })
        })
        .collect();
    out.write_json(
        "moments.json",
        serde_json::json!({
            "coupling": coupling,
            "axes": axis_rows,
            "checks": checks,
        }),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// pulse-opt
// ---------------------------------------------------------------------------

pub fn run_pulse_opt(cfg: &ResolvedConfig) -> CliResult<()> {
    let out = OutputContext::new(cfg)?;
    let grid = TimeGrid::new(cfg.pulse.duration, cfg.pulse.steps)?;
    let report = optimize_first_order_pulse(&robust_xx_spec(grid, cfg.pulse.fourier_terms))?;
    export_pulse(&report.pulse, &out.path("pulse_optimized.txt"))?;
    out.write_json(
        "pulse_opt_report.json",
        serde_json::json!({
            "objective": report.objective,
            "baseline_objective": report.baseline_objective,
            "reduction_factor": report.baseline_objective / report.objective.max(1e-300),
            "gate_error": report.gate_error,
            "evaluations": report.evaluations,
            "pulse_file": "pulse_optimized.txt",
        }),
    )?;
    Ok(())
}
