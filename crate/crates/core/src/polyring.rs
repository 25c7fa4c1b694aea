//! Homogeneous polynomials in `X_0..X_n` over GF(p).
//!
//! Monomials of a fixed degree are ordered graded-lexicographically with
//! `X_0 > X_1 > ... > X_n`, so `X_0^t` comes first and `X_n^t` last. Every
//! evaluation matrix in the crate indexes its columns by this order.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ffla::{FieldElement, PrimeModulus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("expected {expected} exponents, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("term of degree {got} in a form of degree {expected}")]
    Inhomogeneous { expected: u32, got: u32 },
    #[error("mixed moduli {0} and {1}")]
    ModulusMismatch(u32, u32),
    #[error("point has {got} coordinates, expected {expected}")]
    PointArity { expected: usize, got: usize },
    #[error("partial derivatives of a constant form")]
    ConstantForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exponents: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        let degree = exponents.iter().sum();
        Monomial { exponents, degree }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Value at a point given as residues.
    pub fn evaluate(&self, point: &[u32], p: PrimeModulus) -> u32 {
        self.exponents
            .iter()
            .zip(point)
            .fold(1u32, |acc, (&e, &x)| if e == 0 { acc } else { p.mul(acc, p.pow(x, e as u64)) })
    }

    /// `X_s` times this monomial.
    pub fn times_variable(&self, s: usize) -> Monomial {
        let mut e = self.exponents.clone();
        e[s] += 1;
        Monomial { exponents: e, degree: self.degree + 1 }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.degree == 0 {
            return write!(f, "1");
        }
        let mut first = true;
        for (k, &e) in self.exponents.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "X{}", k)?;
            } else {
                write!(f, "X{}^{}", k, e)?;
            }
        }
        Ok(())
    }
}

/// All monomials of degree `t` in `n + 1` variables, graded-lex order.
pub fn monomial_basis(n: usize, t: u32) -> Vec<Monomial> {
    fn fill(var: usize, nvars: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if var + 1 == nvars {
            prefix.push(remaining);
            out.push(Monomial::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=remaining).rev() {
            prefix.push(e);
            fill(var + 1, nvars, remaining - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(0, n + 1, t, &mut Vec::with_capacity(n + 1), &mut out);
    out
}

/// Number of monomials of degree `t` in `n + 1` variables, `C(n + t, n)`.
pub fn monomial_count(n: usize, t: u32) -> usize {
    let mut c: u128 = 1;
    for k in 1..=n as u128 {
        c = c * (t as u128 + k) / k;
    }
    c as usize
}

/// A homogeneous form of fixed degree with nonzero coefficients only.
#[derive(Clone, PartialEq, Eq)]
pub struct HomogeneousForm {
    n: usize,
    degree: u32,
    terms: BTreeMap<Monomial, u32>,
    modulus: PrimeModulus,
}

impl fmt::Debug for HomogeneousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (deg {}, GF({}))", self, self.degree, self.modulus)
    }
}

impl fmt::Display for HomogeneousForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(m, c)| format!("{}*{}", c, m)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl HomogeneousForm {
    pub fn zero(n: usize, degree: u32, modulus: PrimeModulus) -> Self {
        HomogeneousForm { n, degree, terms: BTreeMap::new(), modulus }
    }

    /// Builds a form from `(exponents, coefficient)` pairs; repeated
    /// monomials are summed and zero coefficients dropped.
    pub fn from_terms<I, E>(n: usize, degree: u32, modulus: PrimeModulus, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (E, i64)>,
        E: Into<Vec<u32>>,
    {
        let mut f = Self::zero(n, degree, modulus);
        for (exps, c) in terms {
            let exps: Vec<u32> = exps.into();
            if exps.len() != n + 1 {
                return Err(PolyError::Arity { expected: n + 1, got: exps.len() });
            }
            let m = Monomial::new(exps);
            if m.degree != degree {
                return Err(PolyError::Inhomogeneous { expected: degree, got: m.degree });
            }
            f.add_term(m, modulus.reduce_signed(c));
        }
        Ok(f)
    }

    /// Form with the given coefficients against `monomial_basis(n, degree)`.
    pub fn from_coefficients(n: usize, degree: u32, modulus: PrimeModulus, coeffs: &[u32]) -> Self {
        let mut f = Self::zero(n, degree, modulus);
        for (m, &c) in monomial_basis(n, degree).into_iter().zip(coeffs) {
            f.add_term(m, c % modulus.value());
        }
        f
    }

    /// Coefficients against `monomial_basis(n, degree)`.
    pub fn coefficients(&self) -> Vec<u32> {
        monomial_basis(self.n, self.degree).iter().map(|m| self.terms.get(m).copied().unwrap_or(0)).collect()
    }

    fn add_term(&mut self, m: Monomial, c: u32) {
        let p = self.modulus;
        let slot = self.terms.entry(m).or_insert(0);
        *slot = p.add(*slot, c);
        if *slot == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, FieldElement)> {
        self.terms.iter().map(|(m, &c)| (m, FieldElement(c)))
    }

    pub fn evaluate(&self, point: &[u32]) -> Result<FieldElement, PolyError> {
        if point.len() != self.n + 1 {
            return Err(PolyError::PointArity { expected: self.n + 1, got: point.len() });
        }
        let p = self.modulus;
        let v = self.terms.iter().fold(0u32, |acc, (m, &c)| p.add(acc, p.mul(c, m.evaluate(point, p))));
        Ok(FieldElement(v))
    }

    /// Formal partial derivatives `d/dX_0, ..., d/dX_n`.
    pub fn partials(&self) -> Result<Vec<HomogeneousForm>, PolyError> {
        if self.degree == 0 {
            return Err(PolyError::ConstantForm);
        }
        let p = self.modulus;
        Ok((0..=self.n)
            .map(|k| {
                let mut d = Self::zero(self.n, self.degree - 1, p);
                for (m, &c) in &self.terms {
                    let e = m.exponents[k];
                    if e == 0 {
                        continue;
                    }
                    let mut exps = m.exponents.clone();
                    exps[k] -= 1;
                    d.add_term(Monomial::new(exps), p.mul(c, p.reduce(e as u64)));
                }
                d
            })
            .collect())
    }

    fn check(&self, other: &Self) -> Result<(), PolyError> {
        if self.modulus != other.modulus {
            return Err(PolyError::ModulusMismatch(self.modulus.value(), other.modulus.value()));
        }
        if self.n != other.n {
            return Err(PolyError::Arity { expected: self.n + 1, got: other.n + 1 });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(PolyError::Inhomogeneous { expected: self.degree, got: other.degree });
        }
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: u32) -> Self {
        let p = self.modulus;
        let mut out = Self::zero(self.n, self.degree, p);
        for (m, &a) in &self.terms {
            out.add_term(m.clone(), p.mul(a, c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check(other)?;
        let p = self.modulus;
        let mut out = Self::zero(self.n, self.degree + other.degree, p);
        for (ma, &a) in &self.terms {
            for (mb, &b) in &other.terms {
                let exps: Vec<u32> = ma.exponents.iter().zip(&mb.exponents).map(|(x, y)| x + y).collect();
                out.add_term(Monomial::new(exps), p.mul(a, b));
            }
        }
        Ok(out)
    }

    /// `X_k` as a form of degree 1.
    pub fn variable(n: usize, k: usize, modulus: PrimeModulus) -> Self {
        let mut e = vec![0u32; n + 1];
        e[k] = 1;
        Self::from_terms(n, 1, modulus, [(e, 1)]).expect("valid variable")
    }
}
