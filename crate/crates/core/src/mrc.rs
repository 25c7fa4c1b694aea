//! Predictions for general points on a curve and their comparison with
//! computed Betti numbers.
//!
//! Points on a curve `X` with Hilbert polynomial `P` and regularity `m` are
//! studied for `P(r-1) ≤ γ < P(r)`, `r ≥ m + 1`. The last two rows of the
//! diagram of a general set `Γ` satisfy `b_{i+1,r-1} - b_{i,r} = Q_{i,r}(γ)`,
//! and the minimal resolution conjecture asks that one of the two vanish.
//!
//! "General" is approximated by the entrywise minimum over seeded random
//! subsets of the curve's rational points. Betti numbers are upper
//! semicontinuous, so every sample bounds the generic value from above and
//! the minimum can only move toward it.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{CurveError, CurvePoints, HilbertData, Provenance};
use crate::ffla::PrimeModulus;
use crate::koszul::{betti_number, binomial, module_betti_diagram, BettiDiagram, FunctionModule, KoszulError};
use crate::seeding::{self, streams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MrcError {
    #[error("γ = {gamma} is below the admissible minimum {minimum}")]
    GammaTooSmall { gamma: i64, minimum: i64 },
    #[error("{needed} points requested but the curve has only {available} rational points")]
    TooFewPoints { needed: usize, available: usize },
    #[error("at least one sample is required")]
    NoSamples,
    #[error("diagram computed only through row {computed}, row {needed} required")]
    DiagramTooShort { computed: usize, needed: usize },
    #[error("invalid targeted computation: {0}")]
    InvalidTarget(String),
    #[error(transparent)]
    Koszul(#[from] KoszulError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// The unique `r ≥ m + 1` with `P(r-1) ≤ γ < P(r)`.
pub fn index_r(gamma: i64, hilbert: HilbertData, m: u32) -> Result<u32, MrcError> {
    let minimum = hilbert.polynomial(m as i64);
    if gamma < minimum {
        return Err(MrcError::GammaTooSmall { gamma, minimum });
    }
    let mut r = m + 1;
    while hilbert.polynomial(r as i64) <= gamma {
        r += 1;
    }
    Ok(r)
}

fn signed_binomial(a: i64, b: i64) -> i64 {
    if a < 0 || b < 0 || b > a {
        0
    } else {
        binomial(a as usize, b as usize) as i64
    }
}

/// `Δ^k P(t)` with `ΔP(t) = P(t) - P(t-1)`.
fn finite_difference(hilbert: HilbertData, k: u32, t: i64) -> i64 {
    (0..=k as i64).map(|s| (if s % 2 == 0 { 1 } else { -1 }) * signed_binomial(k as i64, s) * hilbert.polynomial(t - s)).sum()
}

/// `Q_{i,r}(γ)` from the general finite-difference sum. For curves the
/// closed form `d C(n-1, i) - C(n, i)(γ - P(r-1))` is evaluated too and the
/// two are required to agree.
pub fn q_ir(gamma: i64, r: u32, i: usize, hilbert: HilbertData, n: usize) -> i64 {
    let (r, i, n) = (r as i64, i as i64, n as i64);
    let dim = hilbert.dimension() as i64;
    let sum: i64 = (0..dim)
        .map(|l| (if l % 2 == 0 { 1 } else { -1 }) * signed_binomial(n - l - 1, i - l) * finite_difference(hilbert, l as u32 + 1, r + l))
        .sum();
    let q = sum - signed_binomial(n, i) * (gamma - hilbert.polynomial(r - 1));
    if let HilbertData::Curve { degree, .. } = hilbert {
        let closed = degree as i64 * signed_binomial(n - 1, i) - (gamma - hilbert.polynomial(r - 1)) * signed_binomial(n, i);
        assert_eq!(q, closed, "finite-difference and closed-form values of Q disagree");
    }
    q
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailEntry {
    pub i: usize,
    pub q: i64,
    /// Predicted `b_{i+1,r-1}`.
    pub upper: i64,
    /// Predicted `b_{i,r}`.
    pub lower: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailPrediction {
    pub gamma: i64,
    pub r: u32,
    pub entries: Vec<TailEntry>,
}

impl TailPrediction {
    /// Predicted rows `r - 1` and `r`, columns `0..=n+1`.
    pub fn rows(&self) -> (Vec<i64>, Vec<i64>) {
        let cols = self.entries.len() + 1;
        let mut upper = vec![0; cols];
        let mut lower = vec![0; cols];
        for e in &self.entries {
            upper[e.i + 1] = e.upper;
            lower[e.i] = e.lower;
        }
        (upper, lower)
    }
}

/// Smallest admissible `γ` for a curve: `max(g, P(m))`.
pub fn minimum_gamma(curve: &CurvePoints) -> i64 {
    (curve.genus() as i64).max(curve.hilbert().polynomial(curve.regularity() as i64))
}

pub fn predicted_tail(gamma: i64, curve: &CurvePoints) -> Result<TailPrediction, MrcError> {
    let minimum = minimum_gamma(curve);
    if gamma < minimum {
        return Err(MrcError::GammaTooSmall { gamma, minimum });
    }
    let r = index_r(gamma, curve.hilbert(), curve.regularity())?;
    let n = curve.ambient_dim();
    let entries = (0..=n)
        .map(|i| {
            let q = q_ir(gamma, r, i, curve.hilbert(), n);
            TailEntry { i, q, upper: q.max(0), lower: (-q).max(0) }
        })
        .collect();
    Ok(TailPrediction { gamma, r, entries })
}

/// The `k`-th seeded `γ`-subset of `0..available`, sorted.
pub fn sample_subset(available: usize, gamma: usize, seed: u64, k: usize) -> Result<Vec<usize>, MrcError> {
    if gamma > available {
        return Err(MrcError::TooFewPoints { needed: gamma, available });
    }
    let mut rng = seeding::stream_rng(seed, streams::POINT_SAMPLE_BASE + k as u64);
    let mut idx = rand::seq::index::sample(&mut rng, available, gamma).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Diagrams (rows `0..=rows`) of `samples` seeded `γ`-subsets of the curve.
pub fn sample_diagrams(curve: &CurvePoints, gamma: usize, samples: usize, seed: u64, rows: u32) -> Result<Vec<BettiDiagram>, MrcError> {
    if samples == 0 {
        return Err(MrcError::NoSamples);
    }
    (0..samples)
        .into_par_iter()
        .map(|k| {
            let idx = sample_subset(curve.points().len(), gamma, seed, k)?;
            let provenance = Provenance {
                curve_id: curve.id().to_string(),
                prime: curve.modulus().value(),
                seed: Some(seed),
                sample_index: Some(k),
            };
            let subset = curve.points().subset(&idx, provenance)?;
            let module = FunctionModule::coordinate_ring(&subset, rows + 1);
            Ok(module_betti_diagram(&module, rows)?)
        })
        .collect()
}

/// Entrywise minimum over sample diagrams, rows `0..=rows`.
pub fn generic_diagram_rows(curve: &CurvePoints, gamma: usize, samples: usize, seed: u64, rows: u32) -> Result<BettiDiagram, MrcError> {
    let diagrams = sample_diagrams(curve, gamma, samples, seed, rows)?;
    let mut it = diagrams.into_iter();
    let first = it.next().ok_or(MrcError::NoSamples)?;
    let mut min = it.try_fold(first, |acc, d| acc.min_with(&d))?;
    min = BettiDiagram::new(min.ambient_dim(), min.rows().to_vec(), &format!("{}|gamma{}|min{}", curve.id(), gamma, samples));
    Ok(min)
}

/// Generic diagram through row `r + 1`.
pub fn generic_diagram(curve: &CurvePoints, gamma: usize, samples: usize, seed: u64) -> Result<BettiDiagram, MrcError> {
    let r = index_r(gamma as i64, curve.hilbert(), curve.regularity())?;
    generic_diagram_rows(curve, gamma, samples, seed, r + 1)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalReport {
    pub i: usize,
    pub q: i64,
    /// Observed `b_{i+1,r-1}`.
    pub upper: usize,
    /// Observed `b_{i,r}`.
    pub lower: usize,
    pub product: usize,
    pub q_consistent: bool,
    pub lower_bounds_hold: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MRCReport {
    pub curve_id: String,
    pub prime: u32,
    pub gamma: i64,
    pub r: u32,
    pub samples: usize,
    pub diagonals: Vec<DiagonalReport>,
    pub q_check: bool,
    pub lower_bounds: bool,
    pub mrc_holds: bool,
    pub igc_holds: bool,
    pub failing_diagonals: Vec<usize>,
}

impl MRCReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "curve {} over GF({}), gamma = {}, r = {}, samples = {}", self.curve_id, self.prime, self.gamma, self.r, self.samples);
        for d in &self.diagonals {
            let _ = writeln!(
                s,
                "  i = {}: b_{{{},{}}} = {}, b_{{{},{}}} = {}, Q = {}{}",
                d.i,
                d.i + 1,
                self.r - 1,
                d.upper,
                d.i,
                self.r,
                d.lower,
                d.q,
                if d.q_consistent { "" } else { "  (difference != Q)" }
            );
        }
        let verdict = |b: bool| if b { "holds" } else { "fails" };
        let _ = writeln!(s, "  Q check: {}", if self.q_check { "pass" } else { "FAIL" });
        let _ = writeln!(s, "  MRC {}, IGC {}", verdict(self.mrc_holds), verdict(self.igc_holds));
        if !self.failing_diagonals.is_empty() {
            let list: Vec<String> = self.failing_diagonals.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(s, "  failing diagonals: i = {}", list.join(", "));
        }
        s
    }
}

/// Compares the last two rows of `diagram` with the predictions.
pub fn mrc_verdict(diagram: &BettiDiagram, gamma: i64, curve: &CurvePoints, samples: usize) -> Result<MRCReport, MrcError> {
    let tail = predicted_tail(gamma, curve)?;
    let r = tail.r as usize;
    if diagram.max_row() < r {
        return Err(MrcError::DiagramTooShort { computed: diagram.max_row(), needed: r });
    }
    let diagonals: Vec<DiagonalReport> = tail
        .entries
        .iter()
        .map(|e| {
            let upper = diagram.get(e.i + 1, r - 1);
            let lower = diagram.get(e.i, r);
            DiagonalReport {
                i: e.i,
                q: e.q,
                upper,
                lower,
                product: upper * lower,
                q_consistent: upper as i64 - lower as i64 == e.q,
                lower_bounds_hold: upper as i64 >= e.upper && lower as i64 >= e.lower,
            }
        })
        .collect();
    let failing_diagonals: Vec<usize> = diagonals.iter().filter(|d| d.product != 0).map(|d| d.i).collect();
    Ok(MRCReport {
        curve_id: curve.id().to_string(),
        prime: curve.modulus().value(),
        gamma,
        r: tail.r,
        samples,
        q_check: diagonals.iter().all(|d| d.q_consistent),
        lower_bounds: diagonals.iter().all(|d| d.lower_bounds_hold),
        mrc_holds: failing_diagonals.is_empty(),
        igc_holds: diagonals.get(1).map_or(true, |d| d.product == 0),
        failing_diagonals,
        diagonals,
    })
}

/// Generic diagram and verdict in one step.
pub fn mrc_check(curve: &CurvePoints, gamma: usize, samples: usize, seed: u64) -> Result<(BettiDiagram, MRCReport), MrcError> {
    let diagram = generic_diagram(curve, gamma, samples, seed)?;
    let report = mrc_verdict(&diagram, gamma as i64, curve, samples)?;
    Ok((diagram, report))
}

/// Result of trying a computation along a ladder of primes.
#[derive(Clone, Debug)]
pub struct Escalation<T> {
    pub prime: PrimeModulus,
    pub value: T,
    /// Primes tried before the accepted (or last) one.
    pub rejected: Vec<u32>,
    pub accepted: bool,
}

/// Runs `attempt` at each prime of the ladder until it reports acceptance.
/// Returns the last attempt when none is accepted.
pub fn with_prime_ladder<T, E, F>(ladder: &[PrimeModulus], mut attempt: F) -> Result<Escalation<T>, E>
where
    F: FnMut(PrimeModulus) -> Result<(T, bool), E>,
{
    let mut rejected = Vec::new();
    let mut last = None;
    for &p in ladder {
        let (value, ok) = attempt(p)?;
        if ok {
            return Ok(Escalation { prime: p, value, rejected, accepted: true });
        }
        rejected.push(p.value());
        last = Some((p, value));
    }
    let (prime, value) = last.expect("nonempty prime ladder");
    rejected.pop();
    Ok(Escalation { prime, value, rejected, accepted: false })
}

/// Regularity of a curve of degree `d ≥ 2g + 1` embedded by a complete
/// linear series: such a curve is projectively normal with ideal generated
/// in degree at most 3, so its regularity is 3.
pub fn large_degree_regularity(genus: u32, degree: u32) -> Option<u32> {
    (degree > 2 * genus).then_some(3)
}

/// Regularity read off a computed curve diagram: one more than the last
/// nonzero row. Accepted only when at least two computed zero rows follow it,
/// since a single zero row can sit inside a diagram.
pub fn observed_regularity(curve: &CurvePoints, max_rows: u32) -> Result<Option<u32>, MrcError> {
    let rows = curve.degree_guard().saturating_sub(1).min(max_rows);
    if rows < 2 {
        return Ok(None);
    }
    let diagram = crate::koszul::curve_betti_diagram(curve, rows)?;
    Ok(match diagram.last_nonzero_row() {
        Some(j) if j + 2 <= rows as usize => Some(j as u32 + 1),
        _ => None,
    })
}

/// Diagonal `⌊(g + 1) / 2⌋` at which large-degree failures occur.
pub fn failure_diagonal(genus: u32) -> usize {
    (genus as usize + 1) / 2
}

/// The two cells `b_{i+1,r-1}` and `b_{i,r}` of one diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetedCells {
    pub gamma: i64,
    pub r: u32,
    pub i: usize,
    pub q: i64,
    pub upper: usize,
    pub lower: usize,
}

impl TargetedCells {
    pub fn product(&self) -> usize {
        self.upper * self.lower
    }
}

/// Betti numbers of `I_Γ / I_X` giving `b_{i+1,r-1}(Γ)` and `b_{i,r}(Γ)`:
/// for rows at or past the regularity, `b_{a,b}(Γ) = b_{a-1,b+1}(I_Γ/I_X)`.
/// `ring` is the curve's coordinate ring with pieces through `r + 2`.
pub fn targeted_cells_in(ring: &FunctionModule, subset: &[usize], i: usize, r: u32) -> Result<(usize, usize), MrcError> {
    if i == 0 {
        return Err(MrcError::InvalidTarget("diagonal 0 needs no targeted computation".into()));
    }
    let ideal = ring.vanishing_submodule(subset)?;
    let upper = betti_number(&ideal, i, r as i64)?;
    let lower = betti_number(&ideal, i - 1, r as i64 + 1)?;
    Ok((upper, lower))
}

/// Entrywise minimum of the two target cells over seeded `γ`-subsets.
pub fn generic_targeted_cells(
    curve: &CurvePoints,
    ring: &FunctionModule,
    gamma: usize,
    i: usize,
    samples: usize,
    seed: u64,
) -> Result<TargetedCells, MrcError> {
    if samples == 0 {
        return Err(MrcError::NoSamples);
    }
    let r = index_r(gamma as i64, curve.hilbert(), curve.regularity())?;
    if r - 1 < curve.regularity() {
        return Err(MrcError::InvalidTarget(format!("row {} lies above the regularity {}", r - 1, curve.regularity())));
    }
    if ring.top_degree() < r + 2 {
        return Err(KoszulError::DegreeBeyondComputed { requested: r as i64 + 2, top: ring.top_degree() }.into());
    }
    let cells: Vec<(usize, usize)> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let idx = sample_subset(curve.points().len(), gamma, seed, k)?;
            targeted_cells_in(ring, &idx, i, r)
        })
        .collect::<Result<_, _>>()?;
    let upper = cells.iter().map(|c| c.0).min().expect("samples > 0");
    let lower = cells.iter().map(|c| c.1).min().expect("samples > 0");
    let q = q_ir(gamma as i64, r, i, curve.hilbert(), curve.ambient_dim());
    Ok(TargetedCells { gamma: gamma as i64, r, i, q, upper, lower })
}

/// Scan of one diagonal over a `γ` window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureScan {
    pub curve_id: String,
    pub prime: u32,
    pub r: u32,
    pub i: usize,
    pub cells: Vec<TargetedCells>,
    pub failing_gamma: Option<i64>,
}

/// Scans `gammas` in order, stopping at the first `γ` whose generic cells
/// on diagonal `i` are both nonzero.
pub fn failure_scan(curve: &CurvePoints, i: usize, gammas: &[usize], samples: usize, seed: u64) -> Result<FailureScan, MrcError> {
    let rs: Vec<u32> = gammas.iter().map(|&g| index_r(g as i64, curve.hilbert(), curve.regularity())).collect::<Result<_, _>>()?;
    let top = rs.iter().max().copied().unwrap_or(curve.regularity() + 1) + 2;
    let ring = FunctionModule::curve_ring(curve, top)?;
    let mut cells = Vec::new();
    let mut failing_gamma = None;
    for &gamma in gammas {
        let c = generic_targeted_cells(curve, &ring, gamma, i, samples, seed)?;
        let fails = c.product() != 0;
        cells.push(c);
        if fails {
            failing_gamma = Some(gamma as i64);
            break;
        }
    }
    Ok(FailureScan {
        curve_id: curve.id().to_string(),
        prime: curve.modulus().value(),
        r: rs.first().copied().unwrap_or(0),
        i,
        cells,
        failing_gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{quintics, CurvePoints};

    fn gf(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    const QUINTIC: HilbertData = HilbertData::Curve { degree: 5, genus: 0 };
    const CANONICAL4: HilbertData = HilbertData::Curve { degree: 6, genus: 4 };

    #[test]
    fn index_r_examples() {
        assert_eq!(index_r(28, QUINTIC, 4).unwrap(), 6);
        assert_eq!(index_r(26, QUINTIC, 4).unwrap(), 6);
        assert_eq!(index_r(31, QUINTIC, 4).unwrap(), 7);
        assert_eq!(index_r(21, CANONICAL4, 4).unwrap(), 5);
        assert!(matches!(index_r(20, CANONICAL4, 4), Err(MrcError::GammaTooSmall { .. })));
    }

    #[test]
    fn q_examples() {
        assert_eq!(q_ir(28, 6, 1, QUINTIC, 3), 4);
        assert_eq!(q_ir(28, 6, 2, QUINTIC, 3), -1);
        assert_eq!(q_ir(28, 6, 0, QUINTIC, 3), 3);
        assert_eq!(q_ir(28, 6, 3, QUINTIC, 3), -2);
        for i in 0..=3 {
            assert_eq!(q_ir(26, 6, i, QUINTIC, 3), 5 * binomial(2, i) as i64);
        }
    }

    #[test]
    fn projective_space_q_uses_higher_differences() {
        // Six general points in the plane: four cubic generators, three
        // linear syzygies among them, so b_{2,2} - b_{1,3} = 3.
        let plane = HilbertData::Projective { n: 2 };
        let q = q_ir(6, 3, 1, plane, 2);
        assert_eq!(finite_difference(plane, 1, 3), 4);
        assert_eq!(finite_difference(plane, 2, 4), 1);
        assert_eq!(q, binomial(1, 1) as i64 * 4 - binomial(0, 0) as i64);
    }

    #[test]
    fn quintic_y_prediction() {
        let curve = CurvePoints::from_model(&quintics::y(gf(31)).unwrap()).unwrap();
        let tail = predicted_tail(28, &curve).unwrap();
        let (upper, lower) = tail.rows();
        assert_eq!(tail.r, 6);
        assert_eq!(upper, vec![0, 3, 4, 0, 0]);
        assert_eq!(lower, vec![0, 0, 1, 2, 0]);
        assert!(tail.entries.iter().all(|e| e.upper * e.lower == 0));
    }

    #[test]
    fn last_admissible_gamma_gives_single_generator() {
        let curve = CurvePoints::from_model(&quintics::x(gf(31)).unwrap()).unwrap();
        let tail = predicted_tail(30, &curve).unwrap();
        assert_eq!(tail.entries[0].upper, 1);
        assert!(tail.entries[1..].iter().all(|e| e.upper == 0));
    }

    #[test]
    fn observed_regularity_of_quintics() {
        for model in [quintics::x(gf(101)).unwrap(), quintics::y(gf(101)).unwrap()] {
            let curve = CurvePoints::from_model(&model).unwrap();
            assert_eq!(observed_regularity(&curve, 6).unwrap(), Some(4));
            assert_eq!(observed_regularity(&curve, 3).unwrap(), None);
        }
    }

    #[test]
    fn subsets_reproducible_and_distinct() {
        let a = sample_subset(40, 28, 7, 0).unwrap();
        assert_eq!(a, sample_subset(40, 28, 7, 0).unwrap());
        assert_ne!(a, sample_subset(40, 28, 7, 1).unwrap());
        assert_eq!(a.len(), 28);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(sample_subset(10, 11, 0, 0), Err(MrcError::TooFewPoints { .. })));
    }

    #[test]
    fn quintic_x_fails_and_targeted_route_agrees() {
        // Pieces through degree r + 2 = 8 need more than 40 points.
        let curve = CurvePoints::from_model(&quintics::x(gf(101)).unwrap()).unwrap();
        let (diagram, report) = mrc_check(&curve, 28, 5, 1).unwrap();
        assert_eq!((diagram.get(3, 5), diagram.get(2, 6)), (1, 2));
        assert!(report.q_check && !report.mrc_holds && report.igc_holds);
        assert_eq!(report.failing_diagonals, vec![2]);
        let ring = FunctionModule::curve_ring(&curve, 8).unwrap();
        let cells = generic_targeted_cells(&curve, &ring, 28, 2, 5, 1).unwrap();
        assert_eq!((cells.upper, cells.lower, cells.q), (1, 2, -1));
    }

    #[test]
    fn more_samples_never_increase_entries() {
        let curve = CurvePoints::from_model(&quintics::y(gf(31)).unwrap()).unwrap();
        let one = generic_diagram_rows(&curve, 27, 1, 3, 7).unwrap();
        let many = generic_diagram_rows(&curve, 27, 6, 3, 7).unwrap();
        for j in 0..=7 {
            for i in 0..=4 {
                assert!(many.get(i, j) <= one.get(i, j));
            }
        }
    }

    #[test]
    fn ladder_accepts_first_passing_prime() {
        let ladder = [gf(31), gf(53), gf(101)];
        let e = with_prime_ladder::<u32, (), _>(&ladder, |p| Ok((p.value(), p.value() > 40))).unwrap();
        assert!(e.accepted);
        assert_eq!((e.prime.value(), e.rejected.clone()), (53, vec![31]));
        let e = with_prime_ladder::<u32, (), _>(&ladder, |p| Ok((p.value(), false))).unwrap();
        assert!(!e.accepted);
        assert_eq!((e.prime.value(), e.rejected), (101, vec![31, 53]));
    }

    #[test]
    fn large_degree_helpers() {
        assert_eq!(large_degree_regularity(4, 24), Some(3));
        assert_eq!(large_degree_regularity(4, 8), None);
        assert_eq!(failure_diagonal(4), 2);
        assert_eq!(failure_diagonal(5), 3);
    }
}
