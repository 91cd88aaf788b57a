// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Generalized Pauli algebra on m qubits.
//!
//! A [`PauliString`] is a tensor product of single-qubit Paulis, identified
//! either by its label ("XY", "ZZI", ...) or by its base-4 index with
//! I=0, X=1, Y=2, Z=3 and the leftmost qubit most significant. Products,
//! commutation and basis expansion are exact: phases are tracked as one of
//! {1, −1, i, −i} and never floated.
//!
//! Operators are expanded in the un-normalized Pauli basis with the
//! inner product (1/D)·Tr(σ̂_i σ̂_j) = δ_ij, D = 2^m.

use std::fmt;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, trace_of_product, CMat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn from_digit(d: usize) -> Pauli {
        match d {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            3 => Pauli::Z,
            _ => unreachable!(),
        }
    }

    pub fn matrix(self) -> CMat {
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        let mut m = Array2::from_elem((2, 2), zero);
        match self {
            Pauli::I => {
                m[[0, 0]] = one;
                m[[1, 1]] = one;
            }
            Pauli::X => {
                m[[0, 1]] = one;
                m[[1, 0]] = one;
            }
            Pauli::Y => {
                m[[0, 1]] = -i;
                m[[1, 0]] = i;
            }
            Pauli::Z => {
                m[[0, 0]] = one;
                m[[1, 1]] = -one;
            }
        }
        m
    }
}

/// Exact quarter phase attached to Pauli products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn value(self) -> C64 {
        match self {
            Phase::PlusOne => C64::new(1.0, 0.0),
            Phase::PlusI => C64::new(0.0, 1.0),
            Phase::MinusOne => C64::new(-1.0, 0.0),
            Phase::MinusI => C64::new(0.0, -1.0),
        }
    }

    fn from_quarter_turns(q: u8) -> Phase {
        match q % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    fn quarter_turns(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn times(self, other: Phase) -> Phase {
        Phase::from_quarter_turns(self.quarter_turns() + other.quarter_turns())
    }
}

// Single-site product table: (phase, result) for row·column in I,X,Y,Z order.
fn site_product(a: Pauli, b: Pauli) -> (Phase, Pauli) {
    use Pauli::*;
    use Phase::*;
    match (a, b) {
        (I, p) => (PlusOne, p),
        (p, I) => (PlusOne, p),
        (X, X) | (Y, Y) | (Z, Z) => (PlusOne, I),
        (X, Y) => (PlusI, Z),
        (Y, X) => (MinusI, Z),
        (Y, Z) => (PlusI, X),
        (Z, Y) => (MinusI, X),
        (Z, X) => (PlusI, Y),
        (X, Z) => (MinusI, Y),
    }
}

/// A labeled Pauli operator on `m` qubits (no phase of its own).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    sites: Vec<Pauli>,
}

impl PauliString {
    pub fn new(sites: Vec<Pauli>) -> PauliString {
        assert!(!sites.is_empty(), "PauliString needs at least one qubit");
        PauliString { sites }
    }

    pub fn parse(label: &str) -> Result<PauliString> {
        let sites: Option<Vec<Pauli>> = label.chars().map(Pauli::from_char).collect();
        match sites {
            Some(s) if !s.is_empty() => Ok(PauliString { sites: s }),
            _ => Err(Error::InvalidPauliLabel(label.to_string())),
        }
    }

    pub fn identity(qubits: usize) -> PauliString {
        PauliString::new(vec![Pauli::I; qubits])
    }

    pub fn qubits(&self) -> usize {
        self.sites.len()
    }

    pub fn site(&self, q: usize) -> Pauli {
        self.sites[q]
    }

    pub fn is_identity(&self) -> bool {
        self.sites.iter().all(|&p| p == Pauli::I)
    }

    pub fn label(&self) -> String {
        self.sites.iter().map(|p| p.to_char()).collect()
    }

    /// Base-4 index, leftmost qubit most significant.
    pub fn index(&self) -> usize {
        self.sites.iter().fold(0, |acc, &p| acc * 4 + p as usize)
    }

    pub fn from_index(index: usize, qubits: usize) -> PauliString {
        assert!(index < 4usize.pow(qubits as u32));
        let mut sites = vec![Pauli::I; qubits];
        let mut rest = index;
        for q in (0..qubits).rev() {
            sites[q] = Pauli::from_digit(rest % 4);
            rest /= 4;
        }
        PauliString { sites }
    }

    pub fn matrix(&self) -> CMat {
        let mut m = self.sites[0].matrix();
        for p in &self.sites[1..] {
            m = kron(&m, &p.matrix());
        }
        m
    }

    /// Number of sites acting non-trivially.
    pub fn weight(&self) -> usize {
        self.sites.iter().filter(|&&p| p != Pauli::I).count()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn check_same_qubits(a: &PauliString, b: &PauliString) -> Result<()> {
    if a.qubits() != b.qubits() {
        return Err(Error::QubitMismatch {
            expected: a.qubits(),
            found: b.qubits(),
        });
    }
    Ok(())
}

/// Product with exact phase: matrix(a)·matrix(b) = phase · matrix(product).
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<(Phase, PauliString)> {
    check_same_qubits(a, b)?;
    let mut phase = Phase::PlusOne;
    let mut sites = Vec::with_capacity(a.qubits());
    for q in 0..a.qubits() {
        let (p, s) = site_product(a.site(q), b.site(q));
        phase = phase.times(p);
        sites.push(s);
    }
    Ok((phase, PauliString::new(sites)))
}

/// True iff the two operators commute: the number of sites where both act
/// non-trivially and differ must be even.
pub fn commutes(a: &PauliString, b: &PauliString) -> Result<bool> {
    check_same_qubits(a, b)?;
    let mut anti = 0usize;
    for q in 0..a.qubits() {
        let (pa, pb) = (a.site(q), b.site(q));
        if pa != Pauli::I && pb != Pauli::I && pa != pb {
            anti += 1;
        }
    }
    Ok(anti.is_multiple_of(2))
}

/// All 4^m Pauli strings in index order.
pub fn all_paulis(qubits: usize) -> Vec<PauliString> {
    (0..4usize.pow(qubits as u32))
        .map(|i| PauliString::from_index(i, qubits))
        .collect()
}

/// Cached dense matrices of the full Pauli basis, in index order.
pub struct PauliBasis {
    qubits: usize,
    matrices: Vec<CMat>,
}

impl PauliBasis {
    pub fn new(qubits: usize) -> PauliBasis {
        let matrices = all_paulis(qubits).iter().map(|p| p.matrix()).collect();
        PauliBasis { qubits, matrices }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matrix(&self, index: usize) -> &CMat {
        &self.matrices[index]
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    /// Coefficients c_j = (1/D)·Tr(σ̂_j M), so that M = Σ_j c_j σ̂_j.
    pub fn expand(&self, m: &CMat) -> Result<Vec<C64>> {
        let dim = self.dim();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.nrows(),
            });
        }
        let inv_d = 1.0 / dim as f64;
        Ok(self
            .matrices
            .iter()
            .map(|sigma| trace_of_product(sigma, m) * inv_d)
            .collect())
    }

    /// Rebuild Σ_j c_j σ̂_j from coefficients.
    pub fn assemble(&self, coeffs: &[C64]) -> CMat {
        let dim = self.dim();
        let mut out: CMat = Array2::zeros((dim, dim));
        for (c, sigma) in coeffs.iter().zip(&self.matrices) {
            if c.norm_sqr() > 0.0 {
                out = out + sigma.mapv(|z| z * *c);
            }
        }
        out
    }
}

/// Expand a matrix in the Pauli basis (one-shot convenience).
pub fn expand_in_pauli_basis(m: &CMat) -> Result<Vec<C64>> {
    let dim = m.nrows();
    if m.ncols() != dim || dim == 0 || !dim.is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: dim.max(1).next_power_of_two(),
            found: dim,
        });
    }
    let qubits = dim.trailing_zeros() as usize;
    PauliBasis::new(qubits).expand(m)
}

/// Real linear combination of Pauli strings; Hermitian by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn new(terms: Vec<(f64, PauliString)>) -> Result<PauliSum> {
        let qubits = terms
            .first()
            .map(|(_, p)| p.qubits())
            .ok_or_else(|| Error::InvalidParameter("empty Pauli sum".into()))?;
        for (_, p) in &terms {
            if p.qubits() != qubits {
                return Err(Error::QubitMismatch {
                    expected: qubits,
                    found: p.qubits(),
                });
            }
        }
        Ok(PauliSum { qubits, terms })
    }

    pub fn parse(spec: &[(f64, &str)]) -> Result<PauliSum> {
        let terms = spec
            .iter()
            .map(|(c, l)| PauliString::parse(l).map(|p| (*c, p)))
            .collect::<Result<Vec<_>>>()?;
        PauliSum::new(terms)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn matrix(&self) -> CMat {
        let dim = 1 << self.qubits;
        let mut out: CMat = Array2::zeros((dim, dim));
        for (c, p) in &self.terms {
            out = out + p.matrix().mapv(|z| z * C64::new(*c, 0.0));
        }
        out
    }

    /// True iff every term commutes with every term of `other`.
    /// (Sufficient for [sum, other sum] = 0; the demo noise models are
    /// built from termwise-commuting sets.)
    pub fn commutes_termwise(&self, other: &PauliSum) -> Result<bool> {
        for (_, a) in &self.terms {
            for (_, b) in &other.terms {
                if !commutes(a, b)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, frobenius_norm, identity};
    use proptest::prelude::*;

    #[test]
    fn label_index_roundtrip() {
        for m in 1..=3 {
            for i in 0..4usize.pow(m as u32) {
                let p = PauliString::from_index(i, m);
                assert_eq!(p.index(), i);
                assert_eq!(PauliString::parse(&p.label()).unwrap(), p);
            }
        }
    }

    #[test]
    fn index_convention_leftmost_most_significant() {
        assert_eq!(PauliString::parse("XY").unwrap().index(), 6);
        assert_eq!(PauliString::parse("ZI").unwrap().index(), 12);
        assert_eq!(PauliString::parse("IZ").unwrap().index(), 3);
    }

    #[test]
    fn single_site_products() {
        let (ph, p) = pauli_mul(
            &PauliString::parse("XI").unwrap(),
            &PauliString::parse("ZI").unwrap(),
        )
        .unwrap();
        assert_eq!(ph, Phase::MinusI);
        assert_eq!(p.label(), "YI");

        let (ph, p) = pauli_mul(
            &PauliString::parse("XY").unwrap(),
            &PauliString::parse("XY").unwrap(),
        )
        .unwrap();
        assert_eq!(ph, Phase::PlusOne);
        assert_eq!(p.label(), "II");

        // phase aggregation over two sites: (−i)(−i) = −1
        let (ph, p) = pauli_mul(
            &PauliString::parse("XX").unwrap(),
            &PauliString::parse("ZZ").unwrap(),
        )
        .unwrap();
        assert_eq!(ph, Phase::MinusOne);
        assert_eq!(p.label(), "YY");
    }

    #[test]
    fn commutation_examples() {
        let c = |a: &str, b: &str| {
            commutes(
                &PauliString::parse(a).unwrap(),
                &PauliString::parse(b).unwrap(),
            )
            .unwrap()
        };
        assert!(c("XX", "ZZ"));
        assert!(!c("XI", "ZI"));
        assert!(c("II", "YZ"));
        assert!(c("II", "II"));
    }

    #[test]
    fn mismatched_qubit_counts_error() {
        let a = PauliString::parse("X").unwrap();
        let b = PauliString::parse("XY").unwrap();
        assert!(pauli_mul(&a, &b).is_err());
        assert!(commutes(&a, &b).is_err());
    }

    #[test]
    fn basis_orthogonality() {
        for m in 1..=3 {
            let basis = PauliBasis::new(m);
            let d = basis.dim() as f64;
            for i in 0..basis.len() {
                for j in 0..basis.len() {
                    let t = trace_of_product(basis.matrix(i), basis.matrix(j));
                    let expected = if i == j { d } else { 0.0 };
                    assert!(
                        (t.re - expected).abs() < 1e-12 && t.im.abs() < 1e-12,
                        "orthogonality failed at m={m}, ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn expand_simple_combination() {
        let sum = PauliSum::parse(&[(0.3, "ZI"), (0.1, "IZ")]).unwrap();
        let coeffs = expand_in_pauli_basis(&sum.matrix()).unwrap();
        for (i, c) in coeffs.iter().enumerate() {
            let expected = if i == PauliString::parse("ZI").unwrap().index() {
                0.3
            } else if i == PauliString::parse("IZ").unwrap().index() {
                0.1
            } else {
                0.0
            };
            assert!((c.re - expected).abs() < 1e-14 && c.im.abs() < 1e-14);
        }
    }

    #[test]
    fn expand_identity() {
        let coeffs = expand_in_pauli_basis(&identity(4)).unwrap();
        assert!((coeffs[0].re - 1.0).abs() < 1e-15);
        assert!(coeffs[1..].iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn expand_matrix_exponential() {
        // exp(−i·0.2·ZI): c_0 = cos 0.2, c_ZI = −i sin 0.2
        let zi = PauliString::parse("ZI").unwrap();
        let gen = zi.matrix().mapv(|z| z * C64::new(0.0, -0.2));
        let u = expm(&gen);
        let coeffs = expand_in_pauli_basis(&u).unwrap();
        assert!((coeffs[0] - C64::new(0.2f64.cos(), 0.0)).norm() < 1e-13);
        assert!((coeffs[zi.index()] - C64::new(0.0, -(0.2f64.sin()))).norm() < 1e-13);
    }

    #[test]
    fn expand_reconstructs() {
        let sum = PauliSum::parse(&[(0.7, "XY"), (-0.2, "ZZ"), (0.05, "IX")]).unwrap();
        let m = sum.matrix();
        let basis = PauliBasis::new(2);
        let coeffs = basis.expand(&m).unwrap();
        let back = basis.assemble(&coeffs);
        assert!(frobenius_norm(&(&back - &m)) < 1e-13);
    }

    fn arb_pauli_string(m: usize) -> impl Strategy<Value = PauliString> {
        prop::collection::vec(0usize..4, m).prop_map(|digits| {
            PauliString::new(digits.into_iter().map(Pauli::from_digit).collect())
        })
    }

    proptest! {
        #[test]
        fn product_matches_matrix_oracle(
            a in arb_pauli_string(2),
            b in arb_pauli_string(2),
        ) {
            let (phase, prod) = pauli_mul(&a, &b).unwrap();
            let lhs = a.matrix().dot(&b.matrix());
            let rhs = prod.matrix().mapv(|z| z * phase.value());
            prop_assert!(frobenius_norm(&(&lhs - &rhs)) < 1e-12);
        }

        #[test]
        fn commutes_matches_commutator_norm(
            a in arb_pauli_string(2),
            b in arb_pauli_string(2),
        ) {
            let comm = commutes(&a, &b).unwrap();
            let ab = a.matrix().dot(&b.matrix());
            let ba = b.matrix().dot(&a.matrix());
            let norm = frobenius_norm(&(&ab - &ba));
            prop_assert_eq!(comm, norm < 1e-12);
        }

        #[test]
        fn product_is_associative_with_phases(
            a in arb_pauli_string(3),
            b in arb_pauli_string(3),
            c in arb_pauli_string(3),
        ) {
            let (p_ab, ab) = pauli_mul(&a, &b).unwrap();
            let (p_abc_l, abc_l) = pauli_mul(&ab, &c).unwrap();
            let left = (p_ab.times(p_abc_l), abc_l);
            let (p_bc, bc) = pauli_mul(&b, &c).unwrap();
            let (p_abc_r, abc_r) = pauli_mul(&a, &bc).unwrap();
            let right = (p_bc.times(p_abc_r), abc_r);
            prop_assert_eq!(left, right);
        }
    }
}
