//! Prime-field arithmetic and dense exact linear algebra over GF(p).
//!
//! Entries are stored as canonical residues (`u32` in `[0, p)`), row-major.
//! Elimination is deterministic: the pivot in each column is the first
//! nonzero entry at or below the current row, so identical inputs always
//! produce identical echelon forms.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FflaError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} outside the supported range 2 < p < 2^31")]
    OutOfRange(u64),
    #[error("mixed moduli: {0} and {1}")]
    ModulusMismatch(u32, u32),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// An odd prime below 2^31.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeModulus(u32);

impl TryFrom<u64> for PrimeModulus {
    type Error = FflaError;
    fn try_from(p: u64) -> Result<Self, Self::Error> {
        PrimeModulus::new(p)
    }
}

impl From<PrimeModulus> for u64 {
    fn from(p: PrimeModulus) -> u64 {
        p.0 as u64
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self, FflaError> {
        if p <= 2 || p >= (1u64 << 31) {
            return Err(FflaError::OutOfRange(p));
        }
        if !is_prime(p) {
            return Err(FflaError::NotPrime(p));
        }
        Ok(PrimeModulus(p as u32))
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: u64) -> u32 {
        (x % self.0 as u64) as u32
    }

    #[inline]
    pub fn reduce_signed(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.0 as u64 {
            (s - self.0 as u64) as u32
        } else {
            s as u32
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + (self.0 - b)
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, base: u32, mut exp: u64) -> u32 {
        let mut acc = 1u32;
        let mut b = base % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(a % self.0 != 0, "inverse of zero in GF({})", self.0);
        self.pow(a, self.0 as u64 - 2)
    }

    pub fn element(self, x: i64) -> FieldElement {
        FieldElement(self.reduce_signed(x))
    }

    /// Square root by Tonelli-Shanks, if `a` is a square.
    pub fn sqrt(self, a: u32) -> Option<u32> {
        let p = self.0 as u64;
        let a = a % self.0;
        if a == 0 {
            return Some(0);
        }
        if self.pow(a, (p - 1) / 2) != 1 {
            return None;
        }
        if p % 4 == 3 {
            return Some(self.pow(a, (p + 1) / 4));
        }
        let mut q = p - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut z = 2u32;
        while self.pow(z, (p - 1) / 2) != self.0 - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(a, q);
        let mut r = self.pow(a, (q + 1) / 2);
        while t != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A canonical residue in `[0, p)`. Carries no modulus; arithmetic goes
/// through [`PrimeModulus`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Dense row-major matrix over GF(p).
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixGF {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
    modulus: PrimeModulus,
}

impl fmt::Debug for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixGF {}x{} over GF({})", self.rows, self.cols, self.modulus)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl MatrixGF {
    pub fn zeros(rows: usize, cols: usize, modulus: PrimeModulus) -> Self {
        MatrixGF { rows, cols, data: vec![0; rows * cols], modulus }
    }

    pub fn identity(n: usize, modulus: PrimeModulus) -> Self {
        let mut m = Self::zeros(n, n, modulus);
        for k in 0..n {
            m.data[k * n + k] = 1;
        }
        m
    }

    /// Builds a matrix from raw residues; entries are reduced mod p.
    pub fn from_raw(rows: usize, cols: usize, data: Vec<u32>, modulus: PrimeModulus) -> Result<Self, FflaError> {
        if data.len() != rows * cols {
            return Err(FflaError::Shape(format!("{} entries for {}x{}", data.len(), rows, cols)));
        }
        let p = modulus.value();
        let data = data.into_iter().map(|x| x % p).collect();
        Ok(MatrixGF { rows, cols, data, modulus })
    }

    /// Builds a matrix from signed integer rows. All rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], modulus: PrimeModulus) -> Result<Self, FflaError> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(FflaError::Shape("ragged rows".into()));
            }
            data.extend(r.iter().map(|&x| modulus.reduce_signed(x)));
        }
        Ok(MatrixGF { rows: rows.len(), cols, data, modulus })
    }

    /// Builds a matrix whose rows are the given residue vectors.
    pub fn from_row_vectors(vectors: &[Vec<u32>], cols: usize, modulus: PrimeModulus) -> Result<Self, FflaError> {
        let mut data = Vec::with_capacity(vectors.len() * cols);
        for v in vectors {
            if v.len() != cols {
                return Err(FflaError::Shape(format!("vector of length {} in {}-column matrix", v.len(), cols)));
            }
            data.extend(v.iter().map(|&x| x % modulus.value()));
        }
        Ok(MatrixGF { rows: vectors.len(), cols, data, modulus })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.modulus.value();
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vectors(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> MatrixGF {
        let mut t = MatrixGF::zeros(self.cols, self.rows, self.modulus);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    fn check_modulus(&self, other: &MatrixGF) -> Result<(), FflaError> {
        if self.modulus != other.modulus {
            return Err(FflaError::ModulusMismatch(self.modulus.value(), other.modulus.value()));
        }
        Ok(())
    }

    /// Vertical concatenation.
    pub fn stack(&self, other: &MatrixGF) -> Result<MatrixGF, FflaError> {
        self.check_modulus(other)?;
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(FflaError::Shape(format!("stacking {} and {} columns", self.cols, other.cols)));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(MatrixGF { rows: self.rows + other.rows, cols, data, modulus: self.modulus })
    }

    /// Matrix product. Products are accumulated in 128 bits and reduced once per entry.
    pub fn mul(&self, other: &MatrixGF) -> Result<MatrixGF, FflaError> {
        self.check_modulus(other)?;
        if self.cols != other.rows {
            return Err(FflaError::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let p = self.modulus.value() as u128;
        let mut out = MatrixGF::zeros(self.rows, other.cols, self.modulus);
        let mut acc = vec![0u128; other.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for (k, &a) in self.row(r).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot += a as u128 * b as u128;
                }
            }
            for (c, a) in acc.iter().enumerate() {
                out.data[r * other.cols + c] = (a % p) as u32;
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>, FflaError> {
        if v.len() != self.cols {
            return Err(FflaError::Shape(format!("{}x{} times vector of length {}", self.rows, self.cols, v.len())));
        }
        let p = self.modulus.value() as u128;
        Ok((0..self.rows)
            .map(|r| {
                let s: u128 = self.row(r).iter().zip(v).map(|(&a, &b)| a as u128 * b as u128).sum();
                (s % p) as u32
            })
            .collect())
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        let mut data = self.data.clone();
        echelon_in_place(&mut data, self.rows, self.cols, self.modulus, false).len()
    }

    /// Reduced row echelon form (same shape, zero rows at the bottom) and the
    /// strictly increasing list of pivot columns.
    pub fn reduced_echelon(&self) -> (MatrixGF, Vec<usize>) {
        let mut data = self.data.clone();
        let pivots = echelon_in_place(&mut data, self.rows, self.cols, self.modulus, true);
        (MatrixGF { rows: self.rows, cols: self.cols, data, modulus: self.modulus }, pivots)
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let (rref, pivots) = self.reduced_echelon();
        let p = self.modulus;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::with_capacity(self.cols - pivots.len());
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = p.neg(rref.get(k, free));
            }
            basis.push(v);
        }
        basis
    }
}

/// Gaussian elimination on a row-major buffer. With `full` set the result is
/// the reduced row echelon form; otherwise only the rows below each pivot are
/// cleared (enough for rank). Returns pivot columns in increasing order.
pub(crate) fn echelon_in_place(data: &mut [u32], rows: usize, cols: usize, modulus: PrimeModulus, full: bool) -> Vec<usize> {
    let p = modulus.value() as u64;
    let mut pivots = Vec::new();
    let mut prow = 0usize;
    for col in 0..cols {
        if prow == rows {
            break;
        }
        let Some(found) = (prow..rows).find(|&r| data[r * cols + col] != 0) else {
            continue;
        };
        if found != prow {
            for c in col..cols {
                data.swap(found * cols + c, prow * cols + c);
            }
        }
        let inv = modulus.inv(data[prow * cols + col]) as u64;
        if inv != 1 {
            for c in col..cols {
                let x = data[prow * cols + c] as u64;
                data[prow * cols + c] = (x * inv % p) as u32;
            }
        }
        let (before, rest) = data.split_at_mut(prow * cols);
        let (pivot_row, after) = rest.split_at_mut(cols);
        let eliminate = |row: &mut [u32]| {
            let f = row[col] as u64;
            if f == 0 {
                return;
            }
            let neg = p - f;
            for c in col..cols {
                let pv = pivot_row[c];
                if pv != 0 {
                    row[c] = ((row[c] as u64 + neg * pv as u64) % p) as u32;
                }
            }
        };
        for row in after.chunks_mut(cols) {
            eliminate(row);
        }
        if full {
            for row in before.chunks_mut(cols) {
                eliminate(row);
            }
        }
        pivots.push(col);
        prow += 1;
    }
    pivots
}

/// An echelonized basis of a subspace of GF(p)^len: rows in reduced echelon
/// form with strictly increasing pivots. Coordinates of a member vector are
/// read off at the pivot positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchelonBasis {
    len: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    modulus: PrimeModulus,
}

impl EchelonBasis {
    /// Echelonizes the span of `vectors` (each of length `len`).
    pub fn from_vectors(vectors: &[Vec<u32>], len: usize, modulus: PrimeModulus) -> Result<Self, FflaError> {
        let m = MatrixGF::from_row_vectors(vectors, len, modulus)?;
        Ok(Self::from_matrix_rows(&m))
    }

    pub fn from_matrix_rows(m: &MatrixGF) -> Self {
        let (rref, pivots) = m.reduced_echelon();
        let rows = (0..pivots.len()).map(|k| rref.row(k).to_vec()).collect();
        EchelonBasis { len: m.cols(), rows, pivots, modulus: m.modulus() }
    }

    pub fn empty(len: usize, modulus: PrimeModulus) -> Self {
        EchelonBasis { len, rows: Vec::new(), pivots: Vec::new(), modulus }
    }

    pub fn full(len: usize, modulus: PrimeModulus) -> Self {
        let rows = (0..len)
            .map(|k| {
                let mut v = vec![0; len];
                v[k] = 1;
                v
            })
            .collect();
        EchelonBasis { len, rows, pivots: (0..len).collect(), modulus }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_len(&self) -> usize {
        self.len
    }

    pub fn vectors(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    /// Coordinates of `v` against this basis, or `None` if `v` is outside the span.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let p = self.modulus;
        let coords: Vec<u32> = self.pivots.iter().map(|&c| v[c]).collect();
        let mut residual = v.to_vec();
        for (row, &a) in self.rows.iter().zip(&coords) {
            if a == 0 {
                continue;
            }
            for (r, &b) in residual.iter_mut().zip(row) {
                if b != 0 {
                    *r = p.sub(*r, p.mul(a, b));
                }
            }
        }
        residual.iter().all(|&x| x == 0).then_some(coords)
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn to_matrix(&self) -> MatrixGF {
        MatrixGF::from_row_vectors(&self.rows, self.len, self.modulus).expect("rows have ambient length")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    /// Fraction-free (Bareiss-style) elimination over the integers, reducing
    /// mod p only to test for zero. Independent of `echelon_in_place`.
    fn naive_rank(m: &MatrixGF) -> usize {
        let p = m.modulus().value() as i128;
        let mut a: Vec<Vec<i128>> = (0..m.rows()).map(|r| m.row(r).iter().map(|&x| x as i128).collect()).collect();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..m.cols() {
            let Some(piv) = (row..a.len()).find(|&r| a[r][col].rem_euclid(p) != 0) else {
                continue;
            };
            a.swap(row, piv);
            for r in row + 1..a.len() {
                let f = a[r][col];
                let g = a[row][col];
                for c in 0..m.cols() {
                    a[r][c] = (a[r][c] * g - a[row][c] * f).rem_euclid(p);
                }
            }
            row += 1;
            rank += 1;
        }
        rank
    }

    fn random_matrix(rows: usize, cols: usize, p: PrimeModulus, rng: &mut ChaCha8Rng, sparsity: f64) -> MatrixGF {
        let data = (0..rows * cols)
            .map(|_| if rng.gen_bool(sparsity) { 0 } else { rng.gen_range(0..p.value()) })
            .collect();
        MatrixGF::from_raw(rows, cols, data, p).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert!(PrimeModulus::new(7).is_ok());
        assert_eq!(PrimeModulus::new(2), Err(FflaError::OutOfRange(2)));
        assert_eq!(PrimeModulus::new(9), Err(FflaError::NotPrime(9)));
        assert_eq!(PrimeModulus::new(1 << 31), Err(FflaError::OutOfRange(1 << 31)));
        assert!(PrimeModulus::new(2_147_483_647).is_ok());
    }

    #[test]
    fn sqrt_covers_all_squares() {
        for p in [7u64, 13, 17, 41, 97, 101] {
            let m = gf(p);
            for x in 0..p as u32 {
                let sq = m.mul(x, x);
                let r = m.sqrt(sq).unwrap();
                assert_eq!(m.mul(r, r), sq);
            }
        }
    }

    #[test]
    fn rank_examples() {
        assert_eq!(MatrixGF::identity(3, gf(7)).rank(), 3);
        let m = MatrixGF::from_rows(&[[1, 2], [2, 4]], gf(5)).unwrap();
        assert_eq!(m.rank(), 1);
        assert_eq!(MatrixGF::zeros(0, 0, gf(5)).rank(), 0);
        assert_eq!(MatrixGF::zeros(0, 4, gf(5)).rank(), 0);
    }

    #[test]
    fn rank_matches_fraction_free_oracle() {
        let p = gf(101);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..40 {
            let sparsity = [0.0, 0.5, 0.85][trial % 3];
            let m = random_matrix(8, 8, p, &mut rng, sparsity);
            assert_eq!(m.rank(), naive_rank(&m));
        }
    }

    #[test]
    fn kernel_examples() {
        assert!(MatrixGF::identity(4, gf(7)).kernel_basis().is_empty());
        assert_eq!(MatrixGF::zeros(2, 3, gf(7)).kernel_basis().len(), 3);
        let m = MatrixGF::from_rows(&[[1, 1, 1]], gf(5)).unwrap();
        let k = m.kernel_basis();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(m.mul_vec(v).unwrap(), vec![0]);
        }
    }

    #[test]
    fn echelon_examples() {
        let (r, piv) = MatrixGF::identity(3, gf(11)).reduced_echelon();
        assert_eq!(r, MatrixGF::identity(3, gf(11)));
        assert_eq!(piv, vec![0, 1, 2]);
        let m = MatrixGF::from_rows(&[[2, 4], [1, 2]], gf(5)).unwrap();
        let (r, piv) = m.reduced_echelon();
        assert_eq!(r, MatrixGF::from_rows(&[[1, 2], [0, 0]], gf(5)).unwrap());
        assert_eq!(piv, vec![0]);
    }

    #[test]
    fn echelon_preserves_row_space() {
        let p = gf(31);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let m = random_matrix(6, 9, p, &mut rng, 0.6);
            let (r, piv) = m.reduced_echelon();
            assert!(piv.windows(2).all(|w| w[0] < w[1]));
            let k = m.rank();
            assert_eq!(r.rank(), k);
            assert_eq!(m.stack(&r).unwrap().rank(), k);
        }
    }

    #[test]
    fn echelon_basis_coordinates() {
        let p = gf(13);
        let b = EchelonBasis::from_vectors(&[vec![1, 2, 3, 4], vec![0, 1, 1, 0]], 4, p).unwrap();
        assert_eq!(b.dim(), 2);
        let v: Vec<u32> = (0..4).map(|k| p.add(p.mul(3, [1, 2, 3, 4][k]), p.mul(5, [0, 1, 1, 0][k]))).collect();
        let c = b.coordinates(&v).unwrap();
        let rebuilt: Vec<u32> = (0..4)
            .map(|k| b.vectors().iter().zip(&c).fold(0, |acc, (row, &a)| p.add(acc, p.mul(a, row[k]))))
            .collect();
        assert_eq!(rebuilt, v);
        assert!(!b.contains(&[0, 0, 0, 1]));
    }

    #[test]
    fn mul_rejects_mixed_moduli() {
        let a = MatrixGF::identity(2, gf(5));
        let b = MatrixGF::identity(2, gf(7));
        assert!(matches!(a.mul(&b), Err(FflaError::ModulusMismatch(5, 7))));
    }

    fn arb_matrix() -> impl Strategy<Value = MatrixGF> {
        (1usize..7, 1usize..7, any::<u64>()).prop_map(|(r, c, seed)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            random_matrix(r, c, gf(7), &mut rng, 0.5)
        })
    }

    proptest! {
        #[test]
        fn rank_equals_transpose_rank(m in arb_matrix()) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn stacked_rank_subadditive(a in arb_matrix(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let b = random_matrix(3, a.cols(), a.modulus(), &mut rng, 0.3);
            prop_assert!(a.stack(&b).unwrap().rank() <= a.rank() + b.rank());
        }

        #[test]
        fn kernel_vectors_are_annihilated(m in arb_matrix()) {
            let k = m.kernel_basis();
            prop_assert_eq!(k.len(), m.cols() - m.rank());
            for v in &k {
                prop_assert!(m.mul_vec(v).unwrap().iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn rank_invariant_under_row_ops(m in arb_matrix(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = m.modulus();
            let mut rows = m.row_vectors();
            let n = rows.len();
            rows.swap(0, rng.gen_range(0..n));
            let s = rng.gen_range(1..p.value());
            let k = rng.gen_range(0..n);
            rows[k].iter_mut().for_each(|x| *x = p.mul(*x, s));
            let m2 = MatrixGF::from_row_vectors(&rows, m.cols(), p).unwrap();
            prop_assert_eq!(m.rank(), m2.rank());
        }
    }
}
