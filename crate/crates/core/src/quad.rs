// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Trapezoidal quadrature on uniform grids.

pub fn trapezoid(samples: &[f64], dt: f64) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let interior: f64 = samples[1..n - 1].iter().sum();
    dt * (0.5 * (samples[0] + samples[n - 1]) + interior)
}

/// Running integral with the same rule; output[k] = ∫_0^{t_k}.
pub fn cumulative_trapezoid(samples: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in samples.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_linear_exactly() {
        let n = 100;
        let dt = 0.01;
        let samples: Vec<f64> = (0..=n).map(|k| 3.0 * k as f64 * dt).collect();
        assert!((trapezoid(&samples, dt) - 1.5).abs() < 1e-14);
        let cum = cumulative_trapezoid(&samples, dt);
        assert!((cum[n] - 1.5).abs() < 1e-14);
        assert!((cum[n / 2] - 0.375).abs() < 1e-14);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(trapezoid(&[], 0.1), 0.0);
        assert_eq!(trapezoid(&[5.0], 0.1), 0.0);
        assert_eq!(cumulative_trapezoid(&[5.0], 0.1), vec![0.0]);
    }
}
