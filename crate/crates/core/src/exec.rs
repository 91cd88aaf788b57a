// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic execution helpers.
//!
//! Ensembles fan out over independent work items identified by an index.
//! Results are collected in index order and reduced with a fixed pairwise
//! tree, so outputs are bit-identical regardless of thread count — and
//! identical between the `parallel` build and the sequential fallback.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `0..n`, preserving index order.
#[cfg(feature = "parallel")]
pub fn run_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, preserving index order.
#[cfg(not(feature = "parallel"))]
pub fn run_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    run_indexed_seq(n, f)
}

/// Sequential reference path; always available so the benches can compare.
pub fn run_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Pairwise (tree) sum with a fixed association order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Pairwise mean.
pub fn pairwise_mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    pairwise_sum(xs) / xs.len() as f64
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Derive an RNG stream id from a path of tags (run index, layer index,
/// noise-source index, ...). Counter-based, so draws are independent of
/// execution order and thread scheduling.
pub fn derive_stream(tags: &[u64]) -> u64 {
    let mut state = 0x51_7C_C1_B7_27_22_0A_95u64;
    for &t in tags {
        state = splitmix64(state ^ t.wrapping_mul(GOLDEN_GAMMA));
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_sum_matches_exact_on_integers() {
        let xs: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 5050.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[3.5]), 3.5);
    }

    #[test]
    fn run_indexed_preserves_order() {
        let out = run_indexed(64, |i| i * i);
        let seq = run_indexed_seq(64, |i| i * i);
        assert_eq!(out, seq);
    }

    #[test]
    fn derive_stream_is_stable_and_tag_sensitive() {
        let a = derive_stream(&[1, 2, 3]);
        assert_eq!(a, derive_stream(&[1, 2, 3]));
        assert_ne!(a, derive_stream(&[1, 2, 4]));
        assert_ne!(a, derive_stream(&[1, 3, 2]));
        assert_ne!(derive_stream(&[0]), derive_stream(&[0, 0]));
    }
}
