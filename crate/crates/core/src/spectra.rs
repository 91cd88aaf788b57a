// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Noise processes: realization synthesis, power spectral densities,
//! fundamental filter functions, and second moments of the first-order
//! error.
//!
//! PSD convention: S(ω) = (1/2π)·∫⟨ε̃(s)ε̃(0)⟩e^{−iωs}ds, so ∫S(ω)dω
//! equals the process variance. A quasi-static process is the δ-at-zero
//! limit; white noise has constant level S₀ with ⟨ε(s)ε(0)⟩ = 2πS₀·δ(s).

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::geometry::ErrorCurve;
use crate::quad::trapezoid;
use crate::schedule::TimeGrid;

/// Stochastic model of one noise source's strength ε̃(t).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NoiseProcess {
    /// Constant over a run, Gaussian across runs.
    QuasiStatic { mean: f64, std: f64 },
    /// Exponentially correlated Gaussian process.
    OrnsteinUhlenbeck { std: f64, correlation_time: f64 },
    /// Flat PSD at level S₀.
    White { level: f64 },
    /// Custom PSD samples on a symmetric ω grid (no synthesis support;
    /// usable in spectral moments only).
    Tabulated { omegas: Vec<f64>, values: Vec<f64> },
}

impl NoiseProcess {
    pub fn quasi_static(mean: f64, std: f64) -> NoiseProcess {
        NoiseProcess::QuasiStatic { mean, std }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| {
            Err(Error::InvalidParameter(format!(
                "{what} must be non-negative and finite, got {v}"
            )))
        };
        match self {
            NoiseProcess::QuasiStatic { std, mean } => {
                if !std.is_finite() || *std < 0.0 {
                    return bad("quasi-static std", *std);
                }
                if !mean.is_finite() {
                    return bad("quasi-static mean", *mean);
                }
            }
            NoiseProcess::OrnsteinUhlenbeck {
                std,
                correlation_time,
            } => {
                if !std.is_finite() || *std < 0.0 {
                    return bad("OU std", *std);
                }
                if !correlation_time.is_finite() || *correlation_time <= 0.0 {
                    return bad("OU correlation time", *correlation_time);
                }
            }
            NoiseProcess::White { level } => {
                if !level.is_finite() || *level < 0.0 {
                    return bad("white level", *level);
                }
            }
            NoiseProcess::Tabulated { omegas, values } => {
                if omegas.len() != values.len() || omegas.is_empty() {
                    return Err(Error::InvalidParameter(
                        "tabulated PSD needs matching, nonempty grids".into(),
                    ));
                }
                if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidParameter(
                        "tabulated PSD must be non-negative".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Deterministic mean profile (nonzero only for quasi-static means).
    pub fn mean(&self) -> f64 {
        match self {
            NoiseProcess::QuasiStatic { mean, .. } => *mean,
            _ => 0.0,
        }
    }

    pub fn spectrum(&self) -> Spectrum {
        match self {
            NoiseProcess::QuasiStatic { std, .. } => Spectrum::DeltaAtZero {
                variance: std * std,
            },
            NoiseProcess::OrnsteinUhlenbeck {
                std,
                correlation_time,
            } => Spectrum::OrnsteinUhlenbeck {
                variance: std * std,
                correlation_time: *correlation_time,
            },
            NoiseProcess::White { level } => Spectrum::White { level: *level },
            NoiseProcess::Tabulated { omegas, values } => Spectrum::Tabulated {
                omegas: omegas.clone(),
                values: values.clone(),
            },
        }
    }
}

/// Power spectral density of a stationary fluctuation.
#[derive(Debug, Clone, PartialEq)]
pub enum Spectrum {
    DeltaAtZero { variance: f64 },
    White { level: f64 },
    OrnsteinUhlenbeck { variance: f64, correlation_time: f64 },
    Tabulated { omegas: Vec<f64>, values: Vec<f64> },
}

impl Spectrum {
    pub fn is_delta(&self) -> bool {
        matches!(self, Spectrum::DeltaAtZero { .. })
    }

    /// S(ω); for the δ-at-zero kind the weight lives in [`Self::delta_weight`].
    pub fn value(&self, omega: f64) -> f64 {
        match self {
            Spectrum::DeltaAtZero { .. } => 0.0,
            Spectrum::White { level } => *level,
            Spectrum::OrnsteinUhlenbeck {
                variance,
                correlation_time,
            } => {
                let tc = *correlation_time;
                variance / std::f64::consts::PI * tc / (1.0 + omega * omega * tc * tc)
            }
            Spectrum::Tabulated { omegas, values } => {
                // linear interpolation, zero outside the table
                if omegas.is_empty() {
                    return 0.0;
                }
                if omega <= omegas[0] || omega >= *omegas.last().unwrap() {
                    if omega == omegas[0] {
                        return values[0];
                    }
                    if omega == *omegas.last().unwrap() {
                        return *values.last().unwrap();
                    }
                    return 0.0;
                }
                let idx = omegas.partition_point(|&w| w <= omega) - 1;
                let frac = (omega - omegas[idx]) / (omegas[idx + 1] - omegas[idx]);
                values[idx] * (1.0 - frac) + values[idx + 1] * frac
            }
        }
    }

    /// Weight of the δ(ω) component (the quasi-static variance).
    pub fn delta_weight(&self) -> f64 {
        match self {
            Spectrum::DeltaAtZero { variance } => *variance,
            _ => 0.0,
        }
    }
}

/// Sampled strength ε̃(t_k) of one source over a gate grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRealization {
    samples: Samples,
    stream: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
enum Samples {
    Constant(f64),
    Grid(Vec<f64>),
}

impl NoiseRealization {
    pub fn constant(value: f64) -> NoiseRealization {
        NoiseRealization {
            samples: Samples::Constant(value),
            stream: None,
        }
    }

    pub fn from_samples(samples: Vec<f64>, stream: Option<u64>) -> NoiseRealization {
        NoiseRealization {
            samples: Samples::Grid(samples),
            stream,
        }
    }

    pub fn stream(&self) -> Option<u64> {
        self.stream
    }

    pub fn check_grid(&self, points: usize) -> Result<()> {
        match &self.samples {
            Samples::Constant(_) => Ok(()),
            Samples::Grid(v) if v.len() == points => Ok(()),
            Samples::Grid(_) => Err(Error::GridMismatch),
        }
    }

    pub fn at(&self, k: usize) -> f64 {
        match &self.samples {
            Samples::Constant(v) => *v,
            Samples::Grid(v) => v[k],
        }
    }

    /// Linear interpolation inside step `k` at fraction `frac` ∈ [0, 1).
    pub fn interp(&self, k: usize, frac: f64) -> f64 {
        match &self.samples {
            Samples::Constant(v) => *v,
            Samples::Grid(v) => v[k] * (1.0 - frac) + v[k + 1] * frac,
        }
    }

    pub fn scaled(&self, factor: f64) -> NoiseRealization {
        let samples = match &self.samples {
            Samples::Constant(v) => Samples::Constant(v * factor),
            Samples::Grid(v) => Samples::Grid(v.iter().map(|x| x * factor).collect()),
        };
        NoiseRealization {
            samples,
            stream: self.stream,
        }
    }

    /// Hash the exact value content (bit patterns) into `h`; used to dedupe
    /// repeated layer propagations.
    pub fn fingerprint<H: std::hash::Hasher>(&self, h: &mut H) {
        use std::hash::Hash;
        self.stream.hash(h);
        match &self.samples {
            Samples::Constant(v) => {
                0u8.hash(h);
                v.to_bits().hash(h);
            }
            Samples::Grid(v) => {
                1u8.hash(h);
                for x in v {
                    x.to_bits().hash(h);
                }
            }
        }
    }
}

/// Draw one realization of `process` on `grid`. Deterministic given
/// (`master_seed`, `tags`): the RNG stream id is derived from the tag path,
/// so draws are independent of evaluation order.
pub fn synthesize_realization(
    process: &NoiseProcess,
    grid: TimeGrid,
    master_seed: u64,
    tags: &[u64],
) -> Result<NoiseRealization> {
    process.validate()?;
    let stream = exec::derive_stream(tags);
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    let normal = |rng: &mut ChaCha8Rng| -> f64 { StandardNormal.sample(rng) };

    match process {
        NoiseProcess::QuasiStatic { mean, std } => {
            let value = if *std > 0.0 {
                mean + std * normal(&mut rng)
            } else {
                *mean
            };
            Ok(NoiseRealization {
                samples: Samples::Constant(value),
                stream: Some(stream),
            })
        }
        NoiseProcess::OrnsteinUhlenbeck {
            std,
            correlation_time,
        } => {
            // exact AR(1) discretization: no integration bias
            let a = (-grid.dt() / correlation_time).exp();
            let innovation = std * (1.0 - a * a).sqrt();
            let mut samples = Vec::with_capacity(grid.points());
            let mut x = std * normal(&mut rng); // stationary start
            samples.push(x);
            for _ in 1..grid.points() {
                x = a * x + innovation * normal(&mut rng);
                samples.push(x);
            }
            Ok(NoiseRealization {
                samples: Samples::Grid(samples),
                stream: Some(stream),
            })
        }
        NoiseProcess::White { level } => {
            let sigma = (2.0 * std::f64::consts::PI * level / grid.dt()).sqrt();
            let samples = (0..grid.points()).map(|_| sigma * normal(&mut rng)).collect();
            Ok(NoiseRealization {
                samples: Samples::Grid(samples),
                stream: Some(stream),
            })
        }
        NoiseProcess::Tabulated { .. } => Err(Error::InvalidParameter(
            "synthesis is not supported for tabulated spectra".into(),
        )),
    }
}

/// Symmetric ω grid for spectral quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmegaGrid {
    pub max: f64,
    pub intervals: usize,
}

impl OmegaGrid {
    /// Default window: |ω| ≤ 64·(2π/T) with 2¹² intervals. Filter functions
    /// of smooth finite pulses decay fast enough that the truncation error
    /// is negligible; `second_moment` callers can double and compare.
    /// The window must stay below the time grid's Nyquist frequency π/dt
    /// (held with ≥ 2·64 steps per gate, e.g. the default 512), otherwise
    /// the sampled filter function aliases.
    pub fn default_for(duration: f64) -> OmegaGrid {
        OmegaGrid {
            max: 64.0 * 2.0 * std::f64::consts::PI / duration,
            intervals: 1 << 12,
        }
    }

    pub fn doubled(&self) -> OmegaGrid {
        OmegaGrid {
            max: 2.0 * self.max,
            intervals: 2 * self.intervals,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.intervals;
        (0..=n)
            .map(|k| -self.max + 2.0 * self.max * k as f64 / n as f64)
            .collect()
    }

    pub fn step(&self) -> f64 {
        2.0 * self.max / self.intervals as f64
    }
}

/// First-order fundamental filter function samples
/// F_j(ω) = ∫₀ᵀ C_ε(s)·r′_j(s)·e^{iωs} ds, one row per error axis.
pub fn filter_function(curve: &ErrorCurve, omegas: &[f64]) -> Array2<C64> {
    let points = curve.grid().points();
    let dt = curve.grid().dt();
    let axes = curve.axis_count();
    let mut out = Array2::from_elem((axes, omegas.len()), C64::new(0.0, 0.0));

    // trapezoid weights folded into the integrand
    let weight = |k: usize| -> f64 {
        if k == 0 || k == points - 1 {
            0.5 * dt
        } else {
            dt
        }
    };
    let weighted: Vec<Vec<f64>> = (0..axes)
        .map(|j| {
            (0..points)
                .map(|k| weight(k) * curve.amplitude()[k] * curve.derivative(j, k))
                .collect()
        })
        .collect();

    for (wi, &omega) in omegas.iter().enumerate() {
        let phase: Vec<C64> = (0..points)
            .map(|k| C64::from_polar(1.0, omega * curve.grid().time(k)))
            .collect();
        for j in 0..axes {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..points {
                acc += phase[k] * weighted[j][k];
            }
            out[[j, wi]] = acc;
        }
    }
    out
}

/// Diagonal spectra per source plus optional symmetric cross-spectra.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    sources: Vec<Spectrum>,
    cross: Vec<(usize, usize, Spectrum)>,
}

impl SpectralModel {
    /// Independent sources (all cross-spectra zero).
    pub fn independent(sources: Vec<Spectrum>) -> SpectralModel {
        SpectralModel {
            sources,
            cross: Vec::new(),
        }
    }

    pub fn with_cross(mut self, i: usize, k: usize, spectrum: Spectrum) -> Result<SpectralModel> {
        if i >= self.sources.len() || k >= self.sources.len() || i == k {
            return Err(Error::MissingCrossSpectrum(i, k));
        }
        self.cross.push((i.min(k), i.max(k), spectrum));
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.sources.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sources.is_empty()
    }

    pub fn source(&self, i: usize) -> &Spectrum {
        &self.sources[i]
    }

    fn cross_spectrum(&self, i: usize, k: usize) -> Option<&Spectrum> {
        let key = (i.min(k), i.max(k));
        self.cross
            .iter()
            .find(|(a, b, _)| (*a, *b) == key)
            .map(|(_, _, s)| s)
    }
}

/// Per-axis decomposition of ⟨R_j²⟩ into the deterministic mean piece and
/// the spectral fluctuation piece.
#[derive(Debug, Clone)]
pub struct SecondMoment {
    /// ⟨R_j⟩ = Σ_i ∫ ε̄_i C_i r′_{ij}
    pub mean: Vec<f64>,
    /// (Σ_i ⟨R_j^{(i)}⟩)² — the Σ_{ik}⟨R⟩⟨R⟩ pairing
    pub mean_squared: Vec<f64>,
    /// Σ_{ik} ∫ S_{ik}(ω) F*_{ij} F_{kj} dω
    pub fluctuation: Vec<f64>,
}

impl SecondMoment {
    /// ⟨R_j²⟩ per axis.
    pub fn total(&self) -> Vec<f64> {
        self.mean_squared
            .iter()
            .zip(&self.fluctuation)
            .map(|(m, f)| m + f)
            .collect()
    }
}

/// Second moments of the first-order error. `mean_profiles[i]`, when given,
/// overrides a constant zero mean for source `i`; it must be sampled on the
/// curve grid.
pub fn second_moment(
    curves: &[&ErrorCurve],
    model: &SpectralModel,
    mean_profiles: &[Option<Vec<f64>>],
    omega_grid: OmegaGrid,
) -> Result<SecondMoment> {
    let n_sources = curves.len();
    if model.len() != n_sources || mean_profiles.len() != n_sources {
        return Err(Error::InvalidParameter(format!(
            "need one spectrum and one mean profile per source ({n_sources} curves, {} spectra, {} profiles)",
            model.len(),
            mean_profiles.len()
        )));
    }
    let first = curves
        .first()
        .ok_or_else(|| Error::InvalidParameter("no curves supplied".into()))?;
    let grid = first.grid();
    let axes = first.axis_count();
    for c in curves {
        if c.grid() != grid {
            return Err(Error::GridMismatch);
        }
    }

    let dt = grid.dt();
    let points = grid.points();

    // per-source mean contribution ⟨R_j^{(i)}⟩
    let mut per_source_mean = vec![vec![0.0; axes]; n_sources];
    for (i, curve) in curves.iter().enumerate() {
        if let Some(profile) = &mean_profiles[i] {
            if profile.len() != points {
                return Err(Error::GridMismatch);
            }
            let mut scratch = vec![0.0; points];
            for (j, slot) in per_source_mean[i].iter_mut().enumerate() {
                for (k, sample) in scratch.iter_mut().enumerate() {
                    *sample = profile[k] * curve.amplitude()[k] * curve.derivative(j, k);
                }
                *slot = trapezoid(&scratch, dt);
            }
        }
    }
    let mean: Vec<f64> = (0..axes)
        .map(|j| (0..n_sources).map(|i| per_source_mean[i][j]).sum())
        .collect();
    let mean_squared: Vec<f64> = mean.iter().map(|m| m * m).collect();

    // fluctuation: δ-at-zero parts analytically, the rest on the ω grid
    let omegas = omega_grid.values();
    let filters: Vec<Array2<C64>> = curves.iter().map(|c| filter_function(c, &omegas)).collect();
    let zero_filters: Vec<Array2<C64>> = curves.iter().map(|c| filter_function(c, &[0.0])).collect();

    let mut fluctuation = vec![0.0; axes];
    let dw = omega_grid.step();
    let n_w = omegas.len();
    for i in 0..n_sources {
        for k_src in 0..n_sources {
            let spectrum = if i == k_src {
                Some(model.source(i))
            } else {
                model.cross_spectrum(i, k_src)
            };
            let Some(spectrum) = spectrum else { continue };

            let delta = spectrum.delta_weight();
            if delta != 0.0 {
                for j in 0..axes {
                    let fi = zero_filters[i][[j, 0]];
                    let fk = zero_filters[k_src][[j, 0]];
                    fluctuation[j] += delta * (fi.conj() * fk).re;
                }
            }
            if spectrum.is_delta() {
                continue;
            }
            for j in 0..axes {
                let mut samples = Vec::with_capacity(n_w);
                for (wi, &omega) in omegas.iter().enumerate() {
                    let s = spectrum.value(omega);
                    let fi = filters[i][[j, wi]];
                    let fk = filters[k_src][[j, wi]];
                    samples.push(s * (fi.conj() * fk).re);
                }
                fluctuation[j] += trapezoid(&samples, dw);
            }
        }
    }

    Ok(SecondMoment {
        mean,
        mean_squared,
        fluctuation,
    })
}

/// Time-domain route of the white-noise moment,
/// Σ over requested axes of 2πS₀·∫ (C_ε r′_j)² dt. Used as the dual route
/// of the Parseval consistency check.
pub fn white_noise_moment_time_route(curve: &ErrorCurve, level: f64) -> Vec<f64> {
    let dt = curve.grid().dt();
    let points = curve.grid().points();
    (0..curve.axis_count())
        .map(|j| {
            let samples: Vec<f64> = (0..points)
                .map(|k| {
                    let f = curve.amplitude()[k] * curve.derivative(j, k);
                    f * f
                })
                .collect();
            2.0 * std::f64::consts::PI * level * trapezoid(&samples, dt)
        })
        .collect()
}
