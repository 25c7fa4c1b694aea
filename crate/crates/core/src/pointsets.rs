//! Linear algebra of the vanishing ideal of a finite point set.
//!
//! The graded piece `N_j` of the coordinate ring of `Γ` is realized inside the
//! function space `GF(p)^γ` as the span of the value vectors of degree-`j`
//! forms on fixed normalized representatives. With that realization,
//! multiplication by the coordinate `X_s` is the diagonal operator of the
//! values of `X_s`.

use crate::curves::{CurvePoints, EmbeddedPointSet};
use crate::ffla::{EchelonBasis, MatrixGF, PrimeModulus};
use crate::polyring::monomial_basis;

/// The `γ × C(n+t, n)` matrix of monomial values at the points.
pub fn evaluation_matrix(points: &EmbeddedPointSet, t: u32) -> MatrixGF {
    let p = points.modulus();
    let monos = monomial_basis(points.ambient_dim(), t);
    let mut m = MatrixGF::zeros(points.len(), monos.len(), p);
    for (k, pt) in points.points().iter().enumerate() {
        for (c, mono) in monos.iter().enumerate() {
            m.set(k, c, mono.evaluate(pt.coords(), p));
        }
    }
    m
}

/// `H_Γ(t)`, the rank of the evaluation matrix.
pub fn hilbert_function(points: &EmbeddedPointSet, t: u32) -> usize {
    quotient_bases(points, t).pop().map(|q| q.dim()).unwrap_or(0)
}

/// Diagonal operator of multiplication by `X_s` on value vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicationOperator {
    s: usize,
    diag: Vec<u32>,
    modulus: PrimeModulus,
}

impl MultiplicationOperator {
    pub fn new(points: &EmbeddedPointSet, s: usize) -> Self {
        MultiplicationOperator { s, diag: points.coordinate_values(s), modulus: points.modulus() }
    }

    pub fn variable(&self) -> usize {
        self.s
    }

    pub fn diagonal(&self) -> &[u32] {
        &self.diag
    }

    pub fn apply(&self, w: &[u32]) -> Vec<u32> {
        w.iter().zip(&self.diag).map(|(&a, &b)| self.modulus.mul(a, b)).collect()
    }
}

/// All multiplication operators `X_0, ..., X_n` of a point set.
pub fn multiplication_operators(points: &EmbeddedPointSet) -> Vec<MultiplicationOperator> {
    (0..=points.ambient_dim()).map(|s| MultiplicationOperator::new(points, s)).collect()
}

/// An echelonized basis of `N_j` inside `GF(p)^γ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientBasis {
    degree: u32,
    basis: EchelonBasis,
}

impl QuotientBasis {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn basis(&self) -> &EchelonBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn pivots(&self) -> &[usize] {
        self.basis.pivots()
    }

    pub fn into_basis(self) -> EchelonBasis {
        self.basis
    }
}

/// Iterates `N_{j+1} = span{ X_s w : w ∈ N_j }` starting from constants, over
/// an arbitrary family of diagonal operators.
pub(crate) fn closure_chain(operators: &[Vec<u32>], len: usize, modulus: PrimeModulus, top: u32) -> Vec<EchelonBasis> {
    let mut out = Vec::with_capacity(top as usize + 1);
    let ones = vec![1u32; len];
    let mut current = if len == 0 {
        EchelonBasis::empty(0, modulus)
    } else {
        EchelonBasis::from_vectors(&[ones], len, modulus).expect("length matches")
    };
    out.push(current.clone());
    for _ in 0..top {
        current = if current.dim() == len {
            current.clone()
        } else {
            let mut gens = Vec::with_capacity(current.dim() * operators.len());
            for w in current.vectors() {
                for d in operators {
                    gens.push(w.iter().zip(d).map(|(&a, &b)| modulus.mul(a, b)).collect());
                }
            }
            EchelonBasis::from_vectors(&gens, len, modulus).expect("length matches")
        };
        out.push(current.clone());
    }
    out
}

/// Quotient bases for degrees `0..=top`.
pub fn quotient_bases(points: &EmbeddedPointSet, top: u32) -> Vec<QuotientBasis> {
    let ops: Vec<Vec<u32>> = (0..=points.ambient_dim()).map(|s| points.coordinate_values(s)).collect();
    closure_chain(&ops, points.len(), points.modulus(), top)
        .into_iter()
        .enumerate()
        .map(|(j, basis)| QuotientBasis { degree: j as u32, basis })
        .collect()
}

pub fn quotient_basis(points: &EmbeddedPointSet, j: u32) -> QuotientBasis {
    quotient_bases(points, j).pop().expect("nonempty chain")
}

/// `H_X(t)` for a curve: the rank on all rational points when the degree
/// guard covers `t`, and `P_X(t)` for `t` at or above the regularity.
pub fn curve_hilbert_function(curve: &CurvePoints, t: u32) -> Option<i64> {
    if t <= curve.degree_guard() {
        Some(hilbert_function(curve.points(), t) as i64)
    } else if t >= curve.regularity() {
        Some(curve.hilbert().polynomial(t as i64))
    } else {
        None
    }
}
