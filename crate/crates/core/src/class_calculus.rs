//! Exact rational verification of divisor-class and enumerative formulas on
//! moduli of pointed curves.
//!
//! Classes are coefficient vectors over the ordered basis
//! `(λ, Ψ_x, Ψ_y, Ψ_z)`. Everything here is exact: arbitrary-precision
//! integers and rationals, no tolerances.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use thiserror::Error;

use crate::seeding;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassError {
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("test-curve relations disagree at g = {g}, j = {j}")]
    InconsistentSystem { g: i64, j: i64 },
    #[error("identity violated: {0}")]
    IdentityViolation(String),
    #[error("class depends on n at g = {g}, i = {i}: n = {n1} and n = {n2} differ")]
    NIndependenceViolation { g: i64, i: i64, n1: i64, n2: i64 },
}

fn q(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

fn qi(x: BigInt) -> Rational {
    Rational::from_integer(x)
}

fn frac(a: i64, b: i64) -> Rational {
    Rational::new(BigInt::from(a), BigInt::from(b))
}

/// Binomial coefficient as a big integer, with `C(a, b) = 0` for `b < 0` or `b > a`.
pub fn binom_int(a: i64, b: i64) -> BigInt {
    assert!(a >= 0, "binomial with negative upper index {}", a);
    if b < 0 || b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for k in 0..b {
        acc = acc * BigInt::from(a - k) / BigInt::from(k + 1);
    }
    acc
}

pub fn binom(a: i64, b: i64) -> Rational {
    qi(binom_int(a, b))
}

/// Number of pencils of degree `d` on a general genus-`g` curve with a
/// fiber containing `(2d - g) q` for some point `q`.
pub fn b_count(d: i64, g: i64) -> Result<Rational, ClassError> {
    if 2 * d < g + 2 || d > g {
        return Err(ClassError::DomainViolation(format!("b({}, {}) needs (g + 2)/2 ≤ d ≤ g", d, g)));
    }
    let e = 2 * d - g;
    Ok(q((e - 1) * e * (e + 1)) * binom(g, d))
}

/// Number of pencils of degree `d` with `β p + γ q` in a fiber, `β + γ = 2d - g`.
pub fn c_count(d: i64, g: i64, gamma: i64) -> Result<Rational, ClassError> {
    let beta = 2 * d - g - gamma;
    if beta < 1 || gamma < 1 || d > g || d < 0 {
        return Err(ClassError::DomainViolation(format!("c({}, {}, {}) needs β, γ ≥ 1", d, g, gamma)));
    }
    Ok(q(gamma * gamma * (2 * d - g) - gamma) * binom(g, d))
}

fn check_gi(g: i64, i: i64) -> Result<(), ClassError> {
    if g < 4 || i < 1 || 2 * i > g - 1 {
        return Err(ClassError::DomainViolation(format!("(g, i) = ({}, {}) needs g ≥ 4 and 1 ≤ i ≤ (g - 1)/2", g, i)));
    }
    Ok(())
}

/// `c_j = b(g - j, g) / (2g - 2)`.
pub fn c_coefficient(g: i64, j: i64) -> Result<Rational, ClassError> {
    Ok(b_count(g - j, g)? / q(2 * g - 2))
}

/// `a_j = -(g - 2j)/g C(g, j) + 10 (g - 2j)/(g - 2) C(g - 2, j - 1)`.
pub fn a_coefficient(g: i64, j: i64) -> Rational {
    -frac(g - 2 * j, g) * binom(g, j) + frac(10 * (g - 2 * j), g - 2) * binom(g - 2, j - 1)
}

/// `b_{1j} = (g - 2j - 1)/(g - 1) C(g - 1, j)` for `j < i`, and 0 at `j = i`.
pub fn b1_coefficient(g: i64, i: i64, j: i64) -> Rational {
    if j == i {
        Rational::zero()
    } else {
        frac(g - 2 * j - 1, g - 1) * binom(g - 1, j)
    }
}

/// `b_{2i} = ((g - 2i)^3 - (g - 2i)) / (2g - 2) C(g, i)`.
pub fn b2_top_coefficient(g: i64, i: i64) -> Rational {
    let e = g - 2 * i;
    frac(e * e * e - e, 2 * g - 2) * binom(g, i)
}

/// The printed closed form for `b_{2j}`, `j < i`, under its two possible
/// readings of the denominator: `2 · j! · (g-1)!` and `(2j)! · (g-1)!`.
pub fn b2_printed_readings(g: i64, j: i64) -> (Rational, Rational) {
    let numerator = qi(BigInt::from((g - 2 * j - 1) * (g * g * g - g * g - 4 * g * g * j + 4 * j * j * g + 2 * j * g - 2 * j)) * factorial(g - 2));
    let single = numerator.clone() / qi(BigInt::from(2) * factorial(j) * factorial(g - 1));
    let double = numerator / qi(factorial(2 * j) * factorial(g - 1));
    (single, double)
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `b_{2j}` from the two test-curve relations
/// `(2g-1) b_{1j} + b_{2j} - c_j = c(g-j, g, 1)` and
/// `(2g-1) b_{2j} + b_{1j} - c_j = c(g-j, g, g-2j-1)`.
/// Both relations are solved for `b_{2j}` and must agree; the full 2×2
/// system must also return the closed-form `b_{1j}`.
pub fn b2j_from_relations(g: i64, j: i64) -> Result<Rational, ClassError> {
    if j < 0 || 2 * j > g - 3 {
        return Err(ClassError::DomainViolation(format!("b2j at (g, j) = ({}, {}) needs 0 ≤ j ≤ (g - 3)/2", g, j)));
    }
    let cj = c_coefficient(g, j)?;
    let r1 = c_count(g - j, g, 1)?;
    let r2 = c_count(g - j, g, g - 2 * j - 1)?;
    let b1 = frac(g - 2 * j - 1, g - 1) * binom(g - 1, j);
    let k = q(2 * g - 1);
    let from_first = r1.clone() + cj.clone() - k.clone() * b1.clone();
    let from_second = (r2.clone() + cj.clone() - b1.clone()) / k.clone();
    // Solve [[k, 1], [1, k]] (b1, b2) = (r1 + c_j, r2 + c_j) directly.
    let det = k.clone() * k.clone() - Rational::one();
    let s1 = r1 + cj.clone();
    let s2 = r2 + cj;
    let solved_b1 = (k.clone() * s1.clone() - s2.clone()) / det.clone();
    let solved_b2 = (k * s2 - s1) / det;
    if from_first != from_second || solved_b1 != b1 || solved_b2 != from_first {
        return Err(ClassError::InconsistentSystem { g, j });
    }
    Ok(from_first)
}

/// Relation-derived `b_{2j}` compared with the printed closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct B2Comparison {
    pub j: i64,
    pub system: Rational,
    pub printed_single: Rational,
    pub printed_double: Rational,
}

impl B2Comparison {
    pub fn is_discrepant(&self) -> bool {
        self.system != self.printed_single || self.system != self.printed_double
    }
}

/// Coefficients `a_j, b_{1j}, b_{2j}, c_j` for `0 ≤ j ≤ i`, and `A, B_1, B_2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    pub g: i64,
    pub i: i64,
    pub a: Vec<Rational>,
    pub b1: Vec<Rational>,
    pub b2: Vec<Rational>,
    /// `c_j`, absent where `b(g - j, g)` is outside its domain.
    pub c: Vec<Option<Rational>>,
    pub b2_comparisons: Vec<B2Comparison>,
    pub big_a: Rational,
    pub big_b1: Rational,
    pub big_b2: Rational,
}

impl CoefficientTable {
    pub fn discrepancies(&self) -> impl Iterator<Item = &B2Comparison> {
        self.b2_comparisons.iter().filter(|c| c.is_discrepant())
    }
}

fn compute_table(g: i64, i: i64) -> Result<CoefficientTable, ClassError> {
    check_gi(g, i)?;
    let a: Vec<Rational> = (0..=i).map(|j| a_coefficient(g, j)).collect();
    let b1: Vec<Rational> = (0..=i).map(|j| b1_coefficient(g, i, j)).collect();
    let mut b2 = Vec::with_capacity(i as usize + 1);
    let mut b2_comparisons = Vec::new();
    for j in 0..i {
        let system = b2j_from_relations(g, j)?;
        let (printed_single, printed_double) = b2_printed_readings(g, j);
        b2_comparisons.push(B2Comparison { j, system: system.clone(), printed_single, printed_double });
        b2.push(system);
    }
    b2.push(b2_top_coefficient(g, i));
    let c = (0..=i).map(|j| c_coefficient(g, j).ok()).collect();
    let big_a = a.iter().cloned().fold(Rational::zero(), |x, y| x + y);
    let big_b2 = b1.iter().cloned().fold(Rational::zero(), |x, y| x + y);
    Ok(CoefficientTable { g, i, a, b1, b2, c, b2_comparisons, big_a, big_b1: binom(g - 2, i), big_b2 })
}

/// Cached coefficient table for `(g, i)`.
pub fn coefficient_table(g: i64, i: i64) -> Result<Arc<CoefficientTable>, ClassError> {
    static CACHE: OnceLock<Mutex<HashMap<(i64, i64), Arc<CoefficientTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache lock").get(&(g, i)) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(compute_table(g, i)?);
    cache.lock().expect("cache lock").insert((g, i), Arc::clone(&table));
    Ok(table)
}

/// `(A, B_1, B_2)` with the summation identities
/// `Σ a_j = -C(g-1, i) + 10 C(g-3, i-1)` and `Σ b_{1j} = C(g-2, i-1)` checked.
pub fn summed_class_coefficients(g: i64, i: i64) -> Result<(Rational, Rational, Rational), ClassError> {
    let t = coefficient_table(g, i)?;
    let expected_a = -binom(g - 1, i) + q(10) * binom(g - 3, i - 1);
    if t.big_a != expected_a {
        return Err(ClassError::IdentityViolation(format!("Σ a_j = {} but expected {} at (g, i) = ({}, {})", t.big_a, expected_a, g, i)));
    }
    let expected_b2 = binom(g - 2, i - 1);
    if t.big_b2 != expected_b2 {
        return Err(ClassError::IdentityViolation(format!("Σ b_1j = {} but expected {} at (g, i) = ({}, {})", t.big_b2, expected_b2, g, i)));
    }
    Ok((t.big_a.clone(), t.big_b1.clone(), t.big_b2.clone()))
}

/// A class `c_λ λ + c_x Ψ_x + c_y Ψ_y + c_z Ψ_z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassVector(pub [Rational; 4]);

impl ClassVector {
    pub fn new(lambda: Rational, psi_x: Rational, psi_y: Rational, psi_z: Rational) -> Self {
        ClassVector([lambda, psi_x, psi_y, psi_z])
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn lambda(&self) -> &Rational {
        &self.0[0]
    }

    pub fn psi_x(&self) -> &Rational {
        &self.0[1]
    }

    pub fn psi_y(&self) -> &Rational {
        &self.0[2]
    }

    pub fn psi_z(&self) -> &Rational {
        &self.0[3]
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ClassVector(self.0.clone().map(|x| x * c))
    }
}

impl Add for ClassVector {
    type Output = ClassVector;
    fn add(self, o: ClassVector) -> ClassVector {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        ClassVector([a + e, b + f, c + g, d + h])
    }
}

impl Sub for ClassVector {
    type Output = ClassVector;
    fn sub(self, o: ClassVector) -> ClassVector {
        self + (-o)
    }
}

impl Neg for ClassVector {
    type Output = ClassVector;
    fn neg(self) -> ClassVector {
        ClassVector(self.0.map(|x| -x))
    }
}

impl fmt::Display for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} λ + {} Ψx + {} Ψy + {} Ψz", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// Pushforward terms entering `c_1(F)`, as stated classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrrTerms {
    pub half_c1_squared: ClassVector,
    pub c2: ClassVector,
    pub half_omega_c1: ClassVector,
    pub twelfth_omega_squared: ClassVector,
    pub c1_f_prime: ClassVector,
}

/// `Ψ_x - Ψ_y + Ψ_z` scaled by `s`, and `Ψ_x + Ψ_y + Ψ_z` scaled by `t`.
fn psi_blocks(s: Rational, t: Rational) -> ClassVector {
    ClassVector::new(Rational::zero(), s.clone() + t.clone(), t.clone() - s.clone(), s + t)
}

pub fn grr_terms(g: i64, i: i64, n: i64) -> GrrTerms {
    let a = binom(g - 2, i - 1);
    let b = binom(g - 1, i);
    let e = binom(g - 2, i);
    let c3 = binom(g - 3, i - 1);
    let one = Rational::one();
    let half = frac(1, 2);
    let lam = |x: Rational| ClassVector::new(x, Rational::zero(), Rational::zero(), Rational::zero());

    let half_c1_squared = lam(q(8 - 2 * g) * a.clone() * a.clone() - q(n - 2 * i - 2) * a.clone() * b.clone())
        + psi_blocks(a.clone() * b.clone(), -half.clone() * b.clone() * b.clone());
    let bm1 = b.clone() - one.clone();
    let c2 = lam(q(8 - 2 * g) * a.clone() * (a.clone() - one) + q(14 - 2 * g) * c3 - q(n - 2 * i - 2) * a.clone() * bm1.clone())
        + psi_blocks(a.clone() * bm1.clone(), -half.clone() * b.clone() * bm1);
    let half_omega_c1 = lam(q(g - 7) * a.clone()) + psi_blocks(-half * b.clone(), Rational::zero());
    let twelfth_omega_squared = lam(b);
    let c1_f_prime = ClassVector::new(-q(n - g - 1) * a, Rational::zero(), Rational::zero(), -e);
    GrrTerms { half_c1_squared, c2, half_omega_c1, twelfth_omega_squared, c1_f_prime }
}

/// `c_1(F) = q_*(c_1²/2 - c_2 - ω c_1 / 2 + C(g-1, i) ω² / 12)`.
pub fn c1_f(g: i64, i: i64, n: i64) -> ClassVector {
    let t = grr_terms(g, i, n);
    t.half_c1_squared - t.c2 + t.half_omega_c1 + t.twelfth_omega_squared
}

fn z_class(g: i64, i: i64, n: i64) -> ClassVector {
    grr_terms(g, i, n).c1_f_prime - c1_f(g, i, n)
}

/// The stated closed form of `[Z]`.
pub fn expected_z_class(g: i64, i: i64) -> ClassVector {
    ClassVector::new(
        -(binom(g - 1, i) - q(10) * binom(g - 3, i - 1)),
        binom(g - 2, i),
        binom(g - 2, i - 1),
        Rational::zero(),
    )
}

/// Assembles `[Z] = c_1(F') - c_1(F)` and checks it against its closed form,
/// against the value at a second `n`, and for a vanishing `Ψ_z` part.
pub fn grr_class_check(g: i64, i: i64, n: i64) -> Result<ClassVector, ClassError> {
    check_gi(g, i)?;
    if n < g + 2 {
        return Err(ClassError::DomainViolation(format!("n = {} needs n ≥ g + 2 = {}", n, g + 2)));
    }
    let z = z_class(g, i, n);
    let other_n = n + 7;
    if z != z_class(g, i, other_n) {
        return Err(ClassError::NIndependenceViolation { g, i, n1: n, n2: other_n });
    }
    if !z.psi_z().is_zero() {
        return Err(ClassError::IdentityViolation(format!("Ψz coefficient {} at (g, i) = ({}, {})", z.psi_z(), g, i)));
    }
    let expected = expected_z_class(g, i);
    if z != expected {
        return Err(ClassError::IdentityViolation(format!("[Z] = {} but expected {}", z, expected)));
    }
    Ok(z)
}

/// Class of the difference variety `C_a - C_b`: `C(a+b, a) θ^{g-a-b}`.
pub fn difference_class(a: i64, b: i64, g: i64) -> Result<(Rational, i64), ClassError> {
    let ordinary = 1 <= b && b <= a && 2 * a <= g - 1;
    let canonical = b >= 1 && 2 * b <= g - 1 && a == g - b - 1;
    if !ordinary && !canonical {
        return Err(ClassError::DomainViolation(format!("difference class ({}, {}) in genus {}", a, b, g)));
    }
    let coeff = binom(a + b, a);
    let power = g - a - b;
    if canonical && (coeff != binom(g - 1, b) || power != 1) {
        return Err(ClassError::IdentityViolation(format!("c_(g-i-1,i) at g = {}, i = {}", g, b)));
    }
    Ok((coeff, power))
}

/// Degree `C(a, b) 2^b` of the difference map in the hyperelliptic case.
pub fn hyperelliptic_difference_degree(a: i64, b: i64) -> BigInt {
    binom_int(a, b) * (BigInt::one() << b as usize)
}

/// Whether `2g - 2 ≥ g - 1 + d ⌊(g+1)/2⌋ / (d - g)`, evaluated exactly.
pub fn mrc_failure_gate(g: i64, d: i64) -> bool {
    if d <= g {
        return false;
    }
    let i = (g + 1) / 2;
    q(2 * g - 2) >= q(g - 1) + frac(d * i, d - g)
}

/// Integer polynomial in formal Chern roots `t_1, ..., t_n` (and extra
/// variables, e.g. the root of a line bundle, indexed past `n`).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SymmetricClassPoly {
    vars: usize,
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl SymmetricClassPoly {
    pub fn zero(vars: usize) -> Self {
        SymmetricClassPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: usize, c: i64) -> Self {
        let mut p = Self::zero(vars);
        if c != 0 {
            p.terms.insert(vec![0; vars], BigInt::from(c));
        }
        p
    }

    pub fn variable(vars: usize, k: usize) -> Self {
        let mut e = vec![0; vars];
        e[k] = 1;
        let mut p = Self::zero(vars);
        p.terms.insert(e, BigInt::one());
        p
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, BigInt> {
        &self.terms
    }

    fn insert(&mut self, e: Vec<u32>, c: BigInt) {
        let entry = self.terms.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = Self::zero(self.vars);
        if !c.is_zero() {
            out.terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect();
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&BigInt::from(-1)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.insert(e, c1 * c2);
            }
        }
        out
    }

    /// Value at a point modulo `modulus`.
    pub fn evaluate_mod(&self, point: &[u64], modulus: u64) -> u64 {
        let m = BigInt::from(modulus);
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (&x, &k) in point.iter().zip(e) {
                term = term * BigInt::from(x).modpow(&BigInt::from(k), &m);
            }
            acc = (acc + term) % &m;
        }
        let r = ((acc % &m) + &m) % &m;
        r.to_u64().expect("reduced below modulus")
    }

    /// Whether the polynomial is invariant under swapping variables `a` and `b`.
    pub fn symmetric_under(&self, a: usize, b: usize) -> bool {
        let swapped: BTreeMap<Vec<u32>, BigInt> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e = e.clone();
                e.swap(a, b);
                (e, c.clone())
            })
            .collect();
        swapped == self.terms
    }
}

/// Elementary symmetric polynomials `e_0, ..., e_upto` of a list of roots.
pub fn elementary_of_roots(roots: &[SymmetricClassPoly], vars: usize, upto: usize) -> Vec<SymmetricClassPoly> {
    let mut e = vec![SymmetricClassPoly::zero(vars); upto + 1];
    e[0] = SymmetricClassPoly::constant(vars, 1);
    for r in roots {
        for k in (1..=upto).rev() {
            e[k] = e[k].add(&e[k - 1].mul(r));
        }
    }
    e
}

/// Which Chern identity to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChernCase {
    /// `c_1(∧^i R) = C(n-1, i-1) c_1(R)`.
    WedgeC1,
    /// `c_2(∧^i R) = ½ C(n-1,i-1)(C(n-1,i-1) - 1) c_1(R)² + C(n-2, i-1) c_2(R)`.
    WedgeC2,
    /// `c_1(R ⊗ L) = c_1(R) + n c_1(L)`.
    TwistC1,
    /// `c_2(R ⊗ L) = c_2(R) + (n-1) c_1(R) c_1(L) + C(n,2) c_1(L)²`.
    TwistC2,
}

/// Both sides of a Chern identity as polynomials in the roots of `R`
/// (variables `0..n`) and of `L` (variable `n`).
pub fn chern_sides(rank: usize, i: usize, case: ChernCase) -> (SymmetricClassPoly, SymmetricClassPoly) {
    let vars = rank + 1;
    let roots: Vec<SymmetricClassPoly> = (0..rank).map(|k| SymmetricClassPoly::variable(vars, k)).collect();
    let e = elementary_of_roots(&roots, vars, 2);
    let (c1, c2) = (&e[1], &e[2]);
    match case {
        ChernCase::WedgeC1 | ChernCase::WedgeC2 => {
            let wedge_roots: Vec<SymmetricClassPoly> = crate::koszul::colex_subsets(rank, i)
                .iter()
                .map(|s| s.iter().fold(SymmetricClassPoly::zero(vars), |acc, &k| acc.add(&roots[k])))
                .collect();
            let w = elementary_of_roots(&wedge_roots, vars, 2);
            let m = binom_int(rank as i64 - 1, i as i64 - 1);
            if case == ChernCase::WedgeC1 {
                (w[1].clone(), c1.scale(&m))
            } else {
                let half_coeff = &m * (&m - BigInt::one()) / BigInt::from(2);
                let rhs = c1.mul(c1).scale(&half_coeff).add(&c2.scale(&binom_int(rank as i64 - 2, i as i64 - 1)));
                (w[2].clone(), rhs)
            }
        }
        ChernCase::TwistC1 | ChernCase::TwistC2 => {
            let l = SymmetricClassPoly::variable(vars, rank);
            let twisted: Vec<SymmetricClassPoly> = roots.iter().map(|r| r.add(&l)).collect();
            let w = elementary_of_roots(&twisted, vars, 2);
            if case == ChernCase::TwistC1 {
                (w[1].clone(), c1.add(&l.scale(&BigInt::from(rank))))
            } else {
                let rhs = c2
                    .add(&c1.mul(&l).scale(&BigInt::from(rank as i64 - 1)))
                    .add(&l.mul(&l).scale(&binom_int(rank as i64, 2)));
                (w[2].clone(), rhs)
            }
        }
    }
}

/// The prime `2^62 - 57` used for randomized identity testing.
pub const IDENTITY_PRIME: u64 = (1 << 62) - 57;

/// Checks a Chern identity by evaluation at random points modulo a 62-bit
/// prime and, for rank at most 5, by exact expansion. Also spot-checks the
/// symmetry of both sides under transpositions of the roots of `R`.
pub fn chern_wedge_identity(rank: usize, i: usize, case: ChernCase) -> Result<bool, ClassError> {
    let wedge = matches!(case, ChernCase::WedgeC1 | ChernCase::WedgeC2);
    if !(2..=8).contains(&rank) || (wedge && !(1..=rank).contains(&i)) {
        return Err(ClassError::DomainViolation(format!("rank {} and i = {}", rank, i)));
    }
    let (lhs, rhs) = chern_sides(rank, i, case);
    for k in 1..rank {
        if !lhs.symmetric_under(0, k) || !rhs.symmetric_under(0, k) {
            return Err(ClassError::IdentityViolation(format!("asymmetric side for rank {}", rank)));
        }
    }
    let mut rng = seeding::stream_rng(0x5EED_C4E2 ^ (rank as u64) << 8 ^ i as u64, 0);
    for _ in 0..24 {
        let point: Vec<u64> = (0..=rank).map(|_| rng.gen_range(0..IDENTITY_PRIME)).collect();
        if lhs.evaluate_mod(&point, IDENTITY_PRIME) != rhs.evaluate_mod(&point, IDENTITY_PRIME) {
            return Ok(false);
        }
    }
    if rank <= 5 && lhs != rhs {
        return Ok(false);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pascal(n: usize, k: usize) -> BigInt {
        let mut row = vec![BigInt::one()];
        for _ in 0..n {
            let mut next = vec![BigInt::one(); row.len() + 1];
            for j in 1..row.len() {
                next[j] = &row[j - 1] + &row[j];
            }
            row = next;
        }
        row[k].clone()
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2), q(6));
        assert_eq!(binom(3, -1), q(0));
        assert_eq!(binom(3, 5), q(0));
        assert_eq!(binom_int(40, 20), pascal(40, 20));
        for n in 0..30 {
            for k in 0..=n {
                assert_eq!(binom_int(n as i64, k as i64), pascal(n, k));
            }
        }
    }

    #[test]
    fn counts() {
        assert_eq!(b_count(2, 2).unwrap(), q(6));
        for g in 2..=10 {
            assert_eq!(b_count(g, g).unwrap(), q((g - 1) * g * (g + 1)));
        }
        assert_eq!(b_count(3, 4).unwrap(), q(24));
        assert!(matches!(b_count(2, 4), Err(ClassError::DomainViolation(_))));
        assert_eq!(c_count(2, 2, 1).unwrap(), q(1));
        assert_eq!(c_count(5, 5, 1).unwrap(), q(4));
        assert_eq!(c_count(5, 5, 4).unwrap(), q(76));
        assert!(c_count(5, 5, 5).is_err());
    }

    #[test]
    fn genus_five_table() {
        let t = coefficient_table(5, 2).unwrap();
        assert_eq!(t.c[0], Some(q(15)));
        assert_eq!(t.c[1], Some(q(15)));
        assert_eq!(t.b1, vec![q(1), q(2), q(0)]);
        assert_eq!(t.a, vec![q(-1), q(7), q(8)]);
        assert_eq!(t.b2[..2], [q(10), q(7)]);
        assert_eq!((t.big_a.clone(), t.big_b1.clone(), t.big_b2.clone()), (q(14), q(3), q(3)));
        let d: Vec<i64> = t.discrepancies().map(|c| c.j).collect();
        assert_eq!(d, vec![0]);
        assert_eq!(t.b2_comparisons[0].printed_single, q(50));
        assert_eq!(t.b2_comparisons[0].printed_double, q(100));
        assert_eq!(t.b2_comparisons[1].printed_single, q(7));
    }

    #[test]
    fn relation_solutions() {
        assert_eq!(b2j_from_relations(5, 0).unwrap(), q(10));
        assert_eq!(b2j_from_relations(5, 1).unwrap(), q(7));
        assert!(b2j_from_relations(5, 2).is_err());
    }

    #[test]
    fn summed_class_small_cases() {
        assert_eq!(summed_class_coefficients(5, 2).unwrap(), (q(14), q(3), q(3)));
        assert_eq!(summed_class_coefficients(4, 1).unwrap(), (q(7), q(2), q(1)));
        assert!(summed_class_coefficients(3, 1).is_err());
        assert!(summed_class_coefficients(6, 3).is_err());
    }

    #[test]
    fn grr_assembly() {
        let z = grr_class_check(5, 2, 8).unwrap();
        assert_eq!(z, ClassVector::new(q(14), q(3), q(3), q(0)));
        assert_eq!(z, grr_class_check(5, 2, 12).unwrap());
        assert!(grr_class_check(5, 2, 6).is_err());
        // c_1(F) has the stated shape.
        let (g, i, n) = (7, 2, 15);
        let f = c1_f(g, i, n);
        let a = binom(g - 2, i - 1);
        let expected_lambda = q(2 * g - 14) * binom(g - 3, i - 1) - q(n + g - 2 * i - 3) * a.clone() + binom(g - 1, i);
        assert_eq!(f, ClassVector::new(expected_lambda, -binom(g - 2, i), -a, -binom(g - 2, i)));
    }

    #[test]
    fn difference_classes() {
        assert_eq!(difference_class(1, 1, 5).unwrap(), (q(2), 3));
        assert_eq!(difference_class(2, 2, 5).unwrap(), (q(6), 1));
        assert_eq!(hyperelliptic_difference_degree(2, 1), BigInt::from(4));
        assert_eq!(difference_class(3, 1, 5).unwrap(), (q(4), 1));
        assert!(difference_class(3, 2, 5).is_err());
    }

    #[test]
    fn failure_gate() {
        assert!(mrc_failure_gate(4, 24));
        assert!(!mrc_failure_gate(4, 9));
    }

    #[test]
    fn chern_examples() {
        assert!(chern_wedge_identity(3, 2, ChernCase::WedgeC1).unwrap());
        for case in [ChernCase::WedgeC1, ChernCase::WedgeC2] {
            assert!(chern_wedge_identity(2, 1, case).unwrap());
        }
        let (l, r) = chern_sides(6, 3, ChernCase::WedgeC2);
        assert_eq!(l, r);
        assert!(chern_wedge_identity(1, 1, ChernCase::WedgeC1).is_err());
    }

    #[test]
    fn wrong_identity_detected() {
        // c_1(∧^2 R) for rank 4 is 3 c_1(R), not 2 c_1(R).
        let (lhs, _) = chern_sides(4, 2, ChernCase::WedgeC1);
        let roots: Vec<SymmetricClassPoly> = (0..4).map(|k| SymmetricClassPoly::variable(5, k)).collect();
        let e = elementary_of_roots(&roots, 5, 1);
        assert_ne!(lhs, e[1].scale(&BigInt::from(2)));
        assert_eq!(lhs, e[1].scale(&BigInt::from(3)));
    }

    #[test]
    fn identity_prime_is_prime() {
        // Deterministic Miller-Rabin for 64-bit inputs.
        let n = IDENTITY_PRIME as u128;
        let mulmod = |a: u128, b: u128| a * b % n;
        let powmod = |mut b: u128, mut e: u128| {
            let mut r = 1u128;
            while e > 0 {
                if e & 1 == 1 {
                    r = mulmod(r, b);
                }
                b = mulmod(b, b);
                e >>= 1;
            }
            r
        };
        let (mut d, mut s) = (n - 1, 0);
        while d % 2 == 0 {
            d /= 2;
            s += 1;
        }
        for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let mut x = powmod(a, d);
            if x == 1 || x == n - 1 {
                continue;
            }
            let mut witness = true;
            for _ in 1..s {
                x = mulmod(x, x);
                if x == n - 1 {
                    witness = false;
                    break;
                }
            }
            assert!(!witness, "composite");
        }
    }
}
