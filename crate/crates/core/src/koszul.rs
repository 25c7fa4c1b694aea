//! Koszul complexes and graded Betti numbers.
//!
//! A [`FunctionModule`] is a graded module given by finite-dimensional pieces
//! inside a fixed function space `GF(p)^L`, on which the variables act as
//! diagonal operators. Two constructions are provided: the coordinate ring of
//! a point set (pieces `N_j`), and the quotient `I_Γ / I_X` of ideals of a
//! subset `Γ` of a curve's points (pieces: functions in `N_j(X)` vanishing on
//! `Γ`).
//!
//! For such a module `N`, `b_{i,j}(N)` is the cohomology of
//!
//! ```text
//! ∧^{i+1}V ⊗ N_{j-1} -> ∧^i V ⊗ N_j -> ∧^{i-1}V ⊗ N_{j+1}
//! ```
//!
//! with `δ(e_S ⊗ w) = Σ_k (-1)^k e_{S \ s_k} ⊗ X_{s_k} w`, where
//! `S = {s_0 < s_1 < ...}`. Basis vectors `e_S` of `∧^i V` are ordered
//! colexicographically: `S` precedes `T` when the largest element of the
//! symmetric difference lies in `T`. The position of `S` in that order is
//! `Σ_k C(s_k, k + 1)`.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{CurveError, CurvePoints, EmbeddedPointSet};
use crate::ffla::{echelon_in_place, EchelonBasis, MatrixGF, PrimeModulus};
use crate::pointsets::closure_chain;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KoszulError {
    #[error("Koszul image outside the target piece in degree {0}")]
    ImageOutsideTarget(i64),
    #[error("degree {requested} requested but pieces are computed only through {top}")]
    DegreeBeyondComputed { requested: i64, top: u32 },
    #[error("diagrams over different ambient spaces or shapes")]
    ShapeMismatch,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Binomial coefficient with `C(a, b) = 0` outside `0 ≤ b ≤ a`.
pub fn binomial(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    (0..b).fold(1usize, |acc, k| acc * (a - k) / (k + 1))
}

/// The `i`-subsets of `{0..vars}` in colex order.
pub fn colex_subsets(vars: usize, i: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(vars, i));
    if i > vars {
        return out;
    }
    let mut cur: Vec<usize> = (0..i).collect();
    loop {
        out.push(cur.clone());
        // Colex successor: bump the first element that can move up.
        let mut k = 0;
        while k < i && (if k + 1 < i { cur[k] + 1 == cur[k + 1] } else { cur[k] + 1 == vars }) {
            k += 1;
        }
        if k == i {
            break;
        }
        cur[k] += 1;
        for (slot, v) in cur.iter_mut().take(k).zip(0..) {
            *slot = v;
        }
    }
    out
}

/// Position of an increasing subset in colex order.
pub fn colex_rank(subset: &[usize]) -> usize {
    subset.iter().enumerate().map(|(k, &s)| binomial(s, k + 1)).sum()
}

/// A graded module realized inside a function space.
#[derive(Clone, Debug)]
pub struct FunctionModule {
    id: String,
    n: usize,
    modulus: PrimeModulus,
    operators: Vec<Vec<u32>>,
    pieces: Vec<EchelonBasis>,
}

impl FunctionModule {
    /// The coordinate ring of a point set, with pieces through degree `top`.
    pub fn coordinate_ring(points: &EmbeddedPointSet, top: u32) -> Self {
        let operators: Vec<Vec<u32>> = (0..=points.ambient_dim()).map(|s| points.coordinate_values(s)).collect();
        let pieces = closure_chain(&operators, points.len(), points.modulus(), top);
        FunctionModule {
            id: points.provenance().curve_id.clone(),
            n: points.ambient_dim(),
            modulus: points.modulus(),
            operators,
            pieces,
        }
    }

    /// The coordinate ring of a curve, from all of its rational points.
    pub fn curve_ring(curve: &CurvePoints, top: u32) -> Result<Self, KoszulError> {
        curve.check_guard(top)?;
        let mut m = Self::coordinate_ring(curve.points(), top);
        m.id = curve.id().to_string();
        Ok(m)
    }

    /// `I_Γ / I_X` for the points of `curve` at the indices `subset`.
    pub fn ideal_quotient(curve: &CurvePoints, subset: &[usize], top: u32) -> Result<Self, KoszulError> {
        Self::curve_ring(curve, top)?.vanishing_submodule(subset)
    }

    /// The submodule of functions vanishing at the function-space positions
    /// `subset`. Applied to a curve ring, this is `I_Γ / I_X`.
    pub fn vanishing_submodule(&self, subset: &[usize]) -> Result<Self, KoszulError> {
        let len = self.operators.first().map_or(0, |d| d.len());
        let mut in_subset = vec![false; len];
        for &k in subset {
            if k >= len || in_subset[k] {
                return Err(CurveError::InvalidPoints(format!("subset index {} repeated or out of range", k)).into());
            }
            in_subset[k] = true;
        }
        // Column order: subset first, then the rest; rows of the reduced
        // echelon form with pivots past the subset block vanish on it.
        let order: Vec<usize> = subset.iter().copied().chain((0..len).filter(|k| !in_subset[*k])).collect();
        let p = self.modulus;
        let pieces = self
            .pieces
            .iter()
            .map(|piece| {
                let rows = piece.dim();
                let mut data = Vec::with_capacity(rows * len);
                for v in piece.vectors() {
                    data.extend(order.iter().map(|&k| v[k]));
                }
                let pivots = echelon_in_place(&mut data, rows, len, p, true);
                let vanishing: Vec<Vec<u32>> = pivots
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c >= subset.len())
                    .map(|(r, _)| {
                        let permuted = &data[r * len..(r + 1) * len];
                        let mut w = vec![0u32; len];
                        for (pos, &k) in order.iter().enumerate() {
                            w[k] = permuted[pos];
                        }
                        w
                    })
                    .collect();
                EchelonBasis::from_vectors(&vanishing, len, p).expect("length matches")
            })
            .collect();
        Ok(FunctionModule {
            id: format!("{}|vanishing-{}", self.id, subset.len()),
            n: self.n,
            modulus: self.modulus,
            operators: self.operators.clone(),
            pieces,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn top_degree(&self) -> u32 {
        self.pieces.len() as u32 - 1
    }

    /// The degree-`j` piece; `None` for negative degrees.
    pub fn piece(&self, j: i64) -> Result<Option<&EchelonBasis>, KoszulError> {
        if j < 0 {
            return Ok(None);
        }
        self.pieces
            .get(j as usize)
            .map(Some)
            .ok_or(KoszulError::DegreeBeyondComputed { requested: j, top: self.top_degree() })
    }

    pub fn piece_dim(&self, j: i64) -> Result<usize, KoszulError> {
        Ok(self.piece(j)?.map_or(0, |b| b.dim()))
    }

    /// Coordinates of `X_s w_a` in the degree `j + 1` piece, for each basis
    /// vector `w_a` of the degree `j` piece: `blocks[s][a]`.
    fn multiplication_blocks(&self, j: i64) -> Result<Vec<Vec<Vec<u32>>>, KoszulError> {
        let (Some(src), Some(dst)) = (self.piece(j)?, self.piece(j + 1)?) else {
            return Ok(vec![Vec::new(); self.n + 1]);
        };
        let p = self.modulus;
        self.operators
            .iter()
            .map(|d| {
                src.vectors()
                    .iter()
                    .map(|w| {
                        let image: Vec<u32> = w.iter().zip(d).map(|(&a, &b)| p.mul(a, b)).collect();
                        dst.coordinates(&image).ok_or(KoszulError::ImageOutsideTarget(j + 1))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Matrix of `δ: ∧^i V ⊗ N_j -> ∧^{i-1} V ⊗ N_{j+1}`, target rows by source
/// columns. Rows are indexed by `(T, b)` as `rank(T) * dim N_{j+1} + b`, and
/// columns likewise.
pub fn koszul_differential(module: &FunctionModule, i: usize, j: i64) -> Result<MatrixGF, KoszulError> {
    let vars = module.n + 1;
    let p = module.modulus;
    let src_dim = module.piece_dim(j)?;
    let cols = binomial(vars, i) * src_dim;
    if i == 0 {
        return Ok(MatrixGF::zeros(0, cols, p));
    }
    let dst_dim = module.piece_dim(j + 1)?;
    let rows = binomial(vars, i - 1) * dst_dim;
    let mut m = MatrixGF::zeros(rows, cols, p);
    if rows == 0 || cols == 0 {
        return Ok(m);
    }
    let blocks = module.multiplication_blocks(j)?;
    for (si, subset) in colex_subsets(vars, i).iter().enumerate() {
        for (k, &s) in subset.iter().enumerate() {
            let mut face = subset.clone();
            face.remove(k);
            let row0 = colex_rank(&face) * dst_dim;
            for a in 0..src_dim {
                let col = si * src_dim + a;
                for (b, &c) in blocks[s][a].iter().enumerate() {
                    if c != 0 {
                        m.set(row0 + b, col, if k % 2 == 0 { c } else { p.neg(c) });
                    }
                }
            }
        }
    }
    Ok(m)
}

/// `dim ∧^i V ⊗ N_j`.
pub fn chain_dim(module: &FunctionModule, i: usize, j: i64) -> Result<usize, KoszulError> {
    Ok(binomial(module.n + 1, i) * module.piece_dim(j)?)
}

fn differential_rank(module: &FunctionModule, i: usize, j: i64) -> Result<usize, KoszulError> {
    if i == 0 || i > module.n + 1 || j < 0 {
        return Ok(0);
    }
    Ok(koszul_differential(module, i, j)?.rank())
}

/// `b_{i,j}` as `dim - rank(out) - rank(in)` at the cell `(i, j)`.
pub fn betti_number(module: &FunctionModule, i: usize, j: i64) -> Result<usize, KoszulError> {
    if i > module.n + 1 || j < 0 {
        return Ok(0);
    }
    let dim = chain_dim(module, i, j)?;
    let out = differential_rank(module, i, j)?;
    let inc = differential_rank(module, i + 1, j - 1)?;
    Ok(dim - out - inc)
}

/// `b_{i,j}(Γ)` for a point set.
pub fn point_betti_number(points: &EmbeddedPointSet, i: usize, j: u32) -> usize {
    let module = FunctionModule::coordinate_ring(points, j + 1);
    betti_number(&module, i, j as i64).expect("pieces computed through j + 1")
}

/// The full table for `0 ≤ i ≤ n + 1`, `0 ≤ j ≤ rows`. Needs pieces through `rows + 1`.
pub fn module_betti_diagram(module: &FunctionModule, rows: u32) -> Result<BettiDiagram, KoszulError> {
    let vars = module.n + 1;
    if module.top_degree() < rows + 1 {
        return Err(KoszulError::DegreeBeyondComputed { requested: rows as i64 + 1, top: module.top_degree() });
    }
    let cells: Vec<(usize, i64)> = (1..=vars).flat_map(|i| (0..=rows as i64).map(move |j| (i, j))).collect();
    let ranks: Vec<usize> = cells
        .par_iter()
        .map(|&(i, j)| differential_rank(module, i, j))
        .collect::<Result<_, _>>()?;
    let rank_of = |i: usize, j: i64| -> usize {
        if i == 0 || i > vars || j < 0 {
            0
        } else {
            ranks[(i - 1) * (rows as usize + 1) + j as usize]
        }
    };
    let mut table = Vec::with_capacity(rows as usize + 1);
    for j in 0..=rows as i64 {
        let mut row = Vec::with_capacity(vars + 1);
        for i in 0..=vars {
            let dim = chain_dim(module, i, j)?;
            row.push(dim - rank_of(i, j) - rank_of(i + 1, j - 1));
        }
        table.push(row);
    }
    Ok(BettiDiagram::new(module.n, table, module.id()))
}

/// Diagram of the coordinate ring of `Γ` through row `rows`.
pub fn betti_diagram(points: &EmbeddedPointSet, rows: u32) -> BettiDiagram {
    let module = FunctionModule::coordinate_ring(points, rows + 1);
    module_betti_diagram(&module, rows).expect("pieces computed through rows + 1")
}

/// Diagram of the coordinate ring of a curve through row `rows`.
pub fn curve_betti_diagram(curve: &CurvePoints, rows: u32) -> Result<BettiDiagram, KoszulError> {
    let module = FunctionModule::curve_ring(curve, rows + 1)?;
    module_betti_diagram(&module, rows)
}

/// A graded Betti table `b_{i,j}` stored by rows `j`, columns `0 ≤ i ≤ n + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiDiagram {
    n: usize,
    rows: Vec<Vec<usize>>,
    source: String,
}

impl BettiDiagram {
    pub fn new(n: usize, mut rows: Vec<Vec<usize>>, source: &str) -> Self {
        for row in rows.iter_mut() {
            row.resize(n + 2, 0);
        }
        BettiDiagram { n, rows, source: source.into() }
    }

    /// From rows listing columns `0..`, with missing trailing entries zero.
    pub fn from_rows(n: usize, rows: &[&[usize]], source: &str) -> Self {
        Self::new(n, rows.iter().map(|r| r.to_vec()).collect(), source)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Index of the last computed row.
    pub fn max_row(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// `b_{i,j}`, zero outside the computed range.
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.rows.get(j).and_then(|r| r.get(i)).copied().unwrap_or(0)
    }

    pub fn is_row_zero(&self, j: usize) -> bool {
        self.rows.get(j).map_or(true, |r| r.iter().all(|&x| x == 0))
    }

    /// First row with all entries zero, if any computed row is zero.
    pub fn first_zero_row(&self) -> Option<usize> {
        (0..self.rows.len()).find(|&j| self.is_row_zero(j))
    }

    /// Last nonzero row.
    pub fn last_nonzero_row(&self) -> Option<usize> {
        (0..self.rows.len()).rev().find(|&j| !self.is_row_zero(j))
    }

    /// The first `count` rows.
    pub fn truncated(&self, count: usize) -> BettiDiagram {
        BettiDiagram { n: self.n, rows: self.rows.iter().take(count).cloned().collect(), source: self.source.clone() }
    }

    /// Entrywise minimum over the common rows.
    pub fn min_with(&self, other: &BettiDiagram) -> Result<BettiDiagram, KoszulError> {
        if self.n != other.n || self.rows.len() != other.rows.len() {
            return Err(KoszulError::ShapeMismatch);
        }
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x.min(y)).collect()).collect();
        Ok(BettiDiagram { n: self.n, rows, source: self.source.clone() })
    }

    /// Rows truncated to the displayed columns `0..=max(n, last nonzero column)`.
    pub fn display_rows(&self) -> Vec<Vec<usize>> {
        let last_col = self
            .rows
            .iter()
            .flat_map(|r| r.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, _)| i))
            .max()
            .unwrap_or(0)
            .max(self.n);
        self.rows.iter().map(|r| r[..=last_col].to_vec()).collect()
    }

    /// Text layout with `--` for zero entries, one row per line: `j | b_0j b_1j ...`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let width = self.max_row().to_string().len();
        for (j, row) in self.display_rows().iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|&x| if x == 0 { "--".to_string() } else { x.to_string() }).collect();
            let _ = writeln!(s, "{:>width$} | {}", j, cells.join(" "), width = width);
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let rows = self.display_rows();
        let cols = rows.first().map_or(0, |r| r.len());
        let mut header = vec!["j".to_string()];
        header.extend((0..cols).map(|i| format!("b{}", i)));
        w.write_record(&header).expect("in-memory write");
        for (j, row) in rows.iter().enumerate() {
            let mut rec = vec![j.to_string()];
            rec.extend(row.iter().map(|x| x.to_string()));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{enumerate_points, quintics, CurvePoints, Provenance};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn gf(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    fn random_points(n: usize, count: usize, p: PrimeModulus, seed: u64) -> EmbeddedPointSet {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut seen = std::collections::HashSet::new();
        let mut pts = Vec::new();
        while pts.len() < count {
            let v: Vec<u32> = (0..=n).map(|_| rng.gen_range(0..p.value())).collect();
            if let Some(rep) = crate::curves::ProjectivePointRep::normalize(&v, p) {
                if seen.insert(rep.clone()) {
                    pts.push(rep);
                }
            }
        }
        EmbeddedPointSet::new(n, p, pts, Provenance::default()).unwrap()
    }

    #[test]
    fn colex_order_and_rank() {
        let s = colex_subsets(4, 2);
        assert_eq!(s, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]);
        for (k, sub) in s.iter().enumerate() {
            assert_eq!(colex_rank(sub), k);
        }
        assert_eq!(colex_subsets(5, 0), vec![Vec::<usize>::new()]);
        assert_eq!(colex_subsets(5, 5).len(), 1);
        for vars in 0..8 {
            for i in 0..=vars {
                let subs = colex_subsets(vars, i);
                assert_eq!(subs.len(), binomial(vars, i));
                assert!(subs.iter().enumerate().all(|(k, sub)| colex_rank(sub) == k));
            }
        }
    }

    #[test]
    fn single_point_in_plane_is_koszul() {
        let pts = EmbeddedPointSet::from_coordinates(2, gf(7), &[vec![1, 0, 0]], Provenance::default()).unwrap();
        let d = betti_diagram(&pts, 2);
        // (X_1, X_2): one row 0 entry, then C(2, i) linear syzygies in row 0 shifted: b_{i,0} = C(2, i).
        assert_eq!(d.rows()[0], vec![1, 2, 1, 0]);
        assert!(d.is_row_zero(1) && d.is_row_zero(2));
    }

    #[test]
    fn single_point_on_line() {
        let pts = EmbeddedPointSet::from_coordinates(1, gf(5), &[vec![1, 2]], Provenance::default()).unwrap();
        let d = betti_diagram(&pts, 1);
        assert_eq!(d.rows()[0], vec![1, 1, 0]);
        assert!(d.is_row_zero(1));
        assert_eq!(d.to_text(), "0 | 1 1\n1 | -- --\n");
    }

    #[test]
    fn degree_zero_and_index_zero() {
        let pts = random_points(3, 9, gf(53), 3);
        let module = FunctionModule::coordinate_ring(&pts, 4);
        assert_eq!(betti_number(&module, 0, 0).unwrap(), 1);
        let d0 = koszul_differential(&module, 0, 2).unwrap();
        assert_eq!(d0.rows(), 0);
    }

    #[test]
    fn quintic_curve_tables() {
        let p = gf(31);
        for (model, expected) in [
            (quintics::x(p).unwrap(), vec![vec![1, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 0, 0], vec![0, 4, 6, 2]]),
            (quintics::y(p).unwrap(), vec![vec![1, 0, 0, 0], vec![0, 0, 0, 0], vec![0, 4, 3, 0], vec![0, 1, 2, 1]]),
        ] {
            let curve = CurvePoints::from_model(&model).unwrap();
            let d = curve_betti_diagram(&curve, 3).unwrap();
            assert_eq!(d.display_rows(), expected, "{}", model.id());
        }
    }

    #[test]
    fn guard_enforced_for_curve_diagram() {
        let curve = CurvePoints::from_model(&quintics::x(gf(31)).unwrap()).unwrap();
        assert!(matches!(curve_betti_diagram(&curve, 6), Err(KoszulError::Curve(CurveError::DegreeGuardViolated { .. }))));
    }

    #[test]
    fn line_in_plane_curve_diagram() {
        let model = crate::curves::CurveModel::parametric("line", 2, 1, &[vec![1, 0], vec![0, 1], vec![0, 0]], gf(11), Some(1)).unwrap();
        let curve = CurvePoints::from_model(&model).unwrap();
        let d = curve_betti_diagram(&curve, 2).unwrap();
        assert_eq!(d.rows()[0], vec![1, 1, 0, 0]);
        assert!(d.is_row_zero(1) && d.is_row_zero(2));
        let _ = enumerate_points(&model).unwrap();
    }

    #[test]
    fn text_json_csv_layouts() {
        let d = BettiDiagram::from_rows(3, &[&[1], &[0, 1], &[], &[0, 4, 6, 2]], "x");
        assert_eq!(d.to_text(), "0 | 1 -- -- --\n1 | -- 1 -- --\n2 | -- -- -- --\n3 | -- 4 6 2\n");
        assert_eq!(d.to_csv().lines().next().unwrap(), "j,b0,b1,b2,b3");
        let back: BettiDiagram = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn differentials_compose_to_zero(seed in any::<u64>(), count in 2usize..12, i in 2usize..4, j in 0i64..3) {
            let pts = random_points(3, count, gf(101), seed);
            let module = FunctionModule::coordinate_ring(&pts, 5);
            let d1 = koszul_differential(&module, i, j).unwrap();
            let d2 = koszul_differential(&module, i - 1, j + 1).unwrap();
            prop_assert!(d2.mul(&d1).unwrap().is_zero());
        }

        #[test]
        fn hilbert_function_from_betti_numbers(seed in any::<u64>(), count in 1usize..12) {
            let n = 2;
            let pts = random_points(n, count, gf(101), seed);
            let rows = count as u32;
            let d = betti_diagram(&pts, rows);
            for t in 0..=rows as i64 {
                let mut h: i64 = 0;
                for i in 0..=n + 1 {
                    for j in 0..=rows as i64 {
                        let shift = t - i as i64 - j;
                        if shift >= 0 {
                            let sign = if i % 2 == 0 { 1 } else { -1 };
                            h += sign * d.get(i, j as usize) as i64 * binomial(n + shift as usize, n) as i64;
                        }
                    }
                }
                prop_assert_eq!(h, crate::pointsets::hilbert_function(&pts, t as u32) as i64);
            }
        }
    }
}
