// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Dense complex linear algebra for small (≤ 16×16) matrices.
//!
//! Everything here operates on `ndarray::Array2<Complex64>`. The matrix
//! exponential uses scaling-and-squaring with a Padé(13) approximant
//! (Higham 2005), which for the skew-Hermitian generators used throughout
//! this crate keeps step propagators unitary to machine precision.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

pub fn identity(dim: usize) -> CMat {
    Array2::from_diag_elem(dim, C64::new(1.0, 0.0))
}

pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            for k in 0..rb {
                for l in 0..cb {
                    out[[i * rb + k, j * cb + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}

pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_entry(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn one_norm(a: &CMat) -> f64 {
    let (_, cols) = a.dim();
    (0..cols)
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Trace of the matrix product `a · b` without forming it.
pub fn trace_of_product(a: &CMat, b: &CMat) -> C64 {
    let n = a.nrows();
    let mut t = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            t += a[[i, k]] * b[[k, i]];
        }
    }
    t
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    let (r, c) = a.dim();
    if r != c {
        return false;
    }
    for i in 0..r {
        for j in 0..c {
            if (a[[i, j]] - a[[j, i]].conj()).norm() > tol {
                return false;
            }
        }
    }
    true
}

pub fn unitarity_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let prod = dagger(a).dot(a);
    frobenius_norm(&(&prod - &identity(n)))
}

/// Frobenius distance between `a` and `b` minimized over a global phase.
/// The aligned difference is formed explicitly; the closed-form
/// ‖a‖² + ‖b‖² − 2|Tr(a†b)| expression cancels catastrophically near zero.
pub fn phase_aligned_distance(a: &CMat, b: &CMat) -> f64 {
    let overlap = trace_of_product(&dagger(a), b);
    let phase = if overlap.norm() > 0.0 {
        overlap.conj() / overlap.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let diff = a - &b.mapv(|z| z * phase);
    frobenius_norm(&diff)
}

/// Solve `a x = rhs` for complex square `a` by Gaussian elimination with
/// partial pivoting. Panics on singular input; the crate only solves
/// well-conditioned Padé denominators.
pub fn solve(a: &CMat, rhs: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(a.ncols(), n);
    assert_eq!(rhs.nrows(), n);
    let m = rhs.ncols();
    let mut lu = a.clone();
    let mut x = rhs.clone();

    for col in 0..n {
        let mut pivot = col;
        let mut best = lu[[col, col]].norm();
        for row in (col + 1)..n {
            let v = lu[[row, col]].norm();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        assert!(best > 0.0, "singular matrix in solve");
        if pivot != col {
            for j in 0..n {
                lu.swap([col, j], [pivot, j]);
            }
            for j in 0..m {
                x.swap([col, j], [pivot, j]);
            }
        }
        let diag = lu[[col, col]];
        for row in (col + 1)..n {
            let factor = lu[[row, col]] / diag;
            if factor.norm() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = lu[[col, j]];
                lu[[row, j]] -= factor * v;
            }
            for j in 0..m {
                let v = x[[col, j]];
                x[[row, j]] -= factor * v;
            }
        }
    }
    // back substitution
    for col in (0..n).rev() {
        let diag = lu[[col, col]];
        for j in 0..m {
            let mut v = x[[col, j]];
            for k in (col + 1)..n {
                v -= lu[[col, k]] * x[[k, j]];
            }
            x[[col, j]] = v / diag;
        }
    }
    x
}

// Padé(13) coefficients, Higham (2005) Table 10.4.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling-and-squaring with Padé(13).
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    assert_eq!(a.ncols(), n, "expm requires a square matrix");
    let norm = one_norm(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scale = C64::new(1.0 / (2.0f64).powi(squarings as i32), 0.0);
    let a1 = a.mapv(|z| z * scale);

    let eye = identity(n);
    let a2 = a1.dot(&a1);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);

    let c = |k: usize| C64::new(PADE13[k], 0.0);
    let w1 = a6.mapv(|z| z * c(13)) + a4.mapv(|z| z * c(11)) + a2.mapv(|z| z * c(9));
    let w2 = a6.mapv(|z| z * c(7))
        + a4.mapv(|z| z * c(5))
        + a2.mapv(|z| z * c(3))
        + eye.mapv(|z| z * c(1));
    let u = a1.dot(&(a6.dot(&w1) + &w2));

    let z1 = a6.mapv(|z| z * c(12)) + a4.mapv(|z| z * c(10)) + a2.mapv(|z| z * c(8));
    let v = a6.dot(&z1)
        + a6.mapv(|z| z * c(6))
        + a4.mapv(|z| z * c(4))
        + a2.mapv(|z| z * c(2))
        + eye.mapv(|z| z * c(0));

    let mut r = solve(&(&v - &u), &(&v + &u));
    for _ in 0..squarings {
        r = r.dot(&r);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let z: CMat = Array2::zeros((4, 4));
        let e = expm(&z);
        assert!(frobenius_norm(&(&e - &identity(4))) < 1e-15);
    }

    #[test]
    fn expm_diagonal_phase() {
        // exp(-i θ Z) = diag(e^{-iθ}, e^{iθ})
        let theta = 0.7;
        let mut a: CMat = Array2::zeros((2, 2));
        a[[0, 0]] = c(0.0, -theta);
        a[[1, 1]] = c(0.0, theta);
        let e = expm(&a);
        assert_abs_diff_eq!(e[[0, 0]].re, theta.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[[0, 0]].im, -theta.sin(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[[1, 1]].im, theta.sin(), epsilon = 1e-14);
        assert!(e[[0, 1]].norm() < 1e-15);
    }

    #[test]
    fn expm_pauli_x_rotation() {
        // exp(-i θ X) = cos θ I - i sin θ X
        let theta = 1.3;
        let mut a: CMat = Array2::zeros((2, 2));
        a[[0, 1]] = c(0.0, -theta);
        a[[1, 0]] = c(0.0, -theta);
        let e = expm(&a);
        assert_abs_diff_eq!(e[[0, 0]].re, theta.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[[0, 1]].im, -theta.sin(), epsilon = 1e-14);
    }

    #[test]
    fn expm_skew_hermitian_is_unitary() {
        // a fixed skew-Hermitian generator with large norm (forces squaring)
        let mut h: CMat = Array2::zeros((4, 4));
        for i in 0..4 {
            for j in 0..4 {
                let v = c(((i * 7 + j * 3) % 5) as f64 - 2.0, ((i + 2 * j) % 3) as f64 - 1.0);
                h[[i, j]] = v;
            }
        }
        let herm = (&h + &dagger(&h)).mapv(|z| z * c(0.5, 0.0));
        let gen = herm.mapv(|z| z * c(0.0, -8.0));
        let e = expm(&gen);
        assert!(unitarity_defect(&e) < 1e-12);
    }

    #[test]
    fn expm_inverse_is_exp_of_negation() {
        let mut h: CMat = Array2::zeros((3, 3));
        h[[0, 1]] = c(0.3, 0.1);
        h[[1, 0]] = c(0.3, -0.1);
        h[[2, 2]] = c(1.2, 0.0);
        let gen = h.mapv(|z| z * c(0.0, -1.0));
        let e = expm(&gen);
        let einv = expm(&gen.mapv(|z| -z));
        let prod = e.dot(&einv);
        assert!(frobenius_norm(&(&prod - &identity(3))) < 1e-13);
    }

    #[test]
    fn solve_roundtrip() {
        let mut a: CMat = Array2::zeros((3, 3));
        a[[0, 0]] = c(2.0, 1.0);
        a[[0, 1]] = c(-1.0, 0.0);
        a[[1, 1]] = c(3.0, -0.5);
        a[[1, 2]] = c(0.5, 0.5);
        a[[2, 0]] = c(0.0, 1.0);
        a[[2, 2]] = c(1.0, 0.0);
        let x_true = identity(3).mapv(|z| z * c(1.5, -0.25));
        let rhs = a.dot(&x_true);
        let x = solve(&a, &rhs);
        assert!(frobenius_norm(&(&x - &x_true)) < 1e-12);
    }

    #[test]
    fn phase_aligned_distance_ignores_global_phase() {
        let u = identity(4);
        let v = u.mapv(|z| z * C64::from_polar(1.0, 0.83));
        assert!(phase_aligned_distance(&u, &v) < 1e-12);
        let w = u.mapv(|z| z * c(0.9, 0.0));
        assert!(phase_aligned_distance(&u, &w) > 0.1);
    }

    #[test]
    fn kron_dimensions_and_values() {
        let a = identity(2).mapv(|z| z * c(2.0, 0.0));
        let mut b: CMat = Array2::zeros((2, 2));
        b[[0, 1]] = c(1.0, 0.0);
        b[[1, 0]] = c(1.0, 0.0);
        let k = kron(&a, &b);
        assert_eq!(k.dim(), (4, 4));
        assert_eq!(k[[0, 1]], c(2.0, 0.0));
        assert_eq!(k[[2, 3]], c(2.0, 0.0));
        assert_eq!(k[[0, 3]], c(0.0, 0.0));
    }
}
