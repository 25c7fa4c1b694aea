//! Embedded curve models over GF(p) and their rational points.
//!
//! Two kinds of model are supported: curves parametrized by binary forms
//! (rational curves) and complete intersections (smooth plane curves and the
//! canonical models of genus 4 and 5). A model's full set of rational points
//! together with its Hilbert polynomial and regularity is a [`CurvePoints`];
//! all Betti computations on curves go through that type.
//!
//! The vanishing ideal of a curve in degree `j` is represented by the forms
//! vanishing on all enumerated rational points. For an integral curve of
//! degree `d` this is exact as soon as there are more than `d * j` points;
//! [`CurvePoints::degree_guard`] reports the largest such `j`.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffla::{EchelonBasis, FflaError, MatrixGF, PrimeModulus};
use crate::pointsets;
use crate::polyring::{monomial_count, HomogeneousForm, PolyError};
use crate::seeding::{self, streams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("parametrization is not injective on P^1(F_p): {0}")]
    NonInjectiveParametrization(String),
    #[error("parametrizing forms share a common factor")]
    CommonFactor,
    #[error("only {count} rational points, below the Weil window lower end {lower}")]
    TooFewPoints { count: usize, lower: i64 },
    #[error("inconsistent curve metadata: {0}")]
    InconsistentMetadata(String),
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error("no acceptable model after {0} attempts")]
    ExhaustedRetries(u32),
    #[error("linear series is not very ample: {0}")]
    NotVeryAmple(String),
    #[error("degree guard violated: {points} points do not determine forms of degree {degree} on a curve of degree {curve_degree}")]
    DegreeGuardViolated { points: usize, degree: u32, curve_degree: u32 },
    #[error("invalid point set: {0}")]
    InvalidPoints(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Ffla(#[from] FflaError),
}

/// Hilbert polynomial data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HilbertData {
    /// A curve of degree `degree` and arithmetic genus `genus`: `P(T) = dT + 1 - g`.
    Curve { degree: u32, genus: u32 },
    /// Projective space `P^n`: `P(T) = C(T + n, n)`.
    Projective { n: u32 },
}

impl HilbertData {
    pub fn polynomial(&self, t: i64) -> i64 {
        match *self {
            HilbertData::Curve { degree, genus } => degree as i64 * t + 1 - genus as i64,
            HilbertData::Projective { n } => {
                let mut num: i128 = 1;
                let mut den: i128 = 1;
                for k in 1..=n as i128 {
                    num *= t as i128 + k;
                    den *= k;
                }
                (num / den) as i64
            }
        }
    }

    pub fn dimension(&self) -> u32 {
        match *self {
            HilbertData::Curve { .. } => 1,
            HilbertData::Projective { n } => n,
        }
    }

    pub fn genus(&self) -> u32 {
        match *self {
            HilbertData::Curve { genus, .. } => genus,
            HilbertData::Projective { .. } => 0,
        }
    }

    pub fn degree(&self) -> u32 {
        match *self {
            HilbertData::Curve { degree, .. } => degree,
            HilbertData::Projective { .. } => 1,
        }
    }
}

/// A projective point with its first nonzero coordinate equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjectivePointRep(Vec<u32>);

impl ProjectivePointRep {
    /// Normalizes a coordinate vector; `None` for the zero vector.
    pub fn normalize(coords: &[u32], p: PrimeModulus) -> Option<Self> {
        let lead = coords.iter().copied().find(|&x| x % p.value() != 0)?;
        let inv = p.inv(lead);
        Some(ProjectivePointRep(coords.iter().map(|&x| p.mul(x % p.value(), inv)).collect()))
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for ProjectivePointRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(":"))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub curve_id: String,
    pub prime: u32,
    pub seed: Option<u64>,
    pub sample_index: Option<usize>,
}

/// Distinct normalized points of `P^n(F_p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedPointSet {
    n: usize,
    modulus: PrimeModulus,
    points: Vec<ProjectivePointRep>,
    provenance: Provenance,
}

impl EmbeddedPointSet {
    pub fn new(n: usize, modulus: PrimeModulus, points: Vec<ProjectivePointRep>, provenance: Provenance) -> Result<Self, CurveError> {
        let mut seen = HashSet::with_capacity(points.len());
        for pt in &points {
            if pt.0.len() != n + 1 {
                return Err(CurveError::InvalidPoints(format!("point {} in P^{}", pt, n)));
            }
            if !seen.insert(pt) {
                return Err(CurveError::InvalidPoints(format!("repeated point {}", pt)));
            }
        }
        Ok(EmbeddedPointSet { n, modulus, points, provenance })
    }

    /// Builds a point set from raw coordinates, normalizing each point.
    pub fn from_coordinates(n: usize, modulus: PrimeModulus, coords: &[Vec<i64>], provenance: Provenance) -> Result<Self, CurveError> {
        let pts = coords
            .iter()
            .map(|c| {
                let raw: Vec<u32> = c.iter().map(|&x| modulus.reduce_signed(x)).collect();
                ProjectivePointRep::normalize(&raw, modulus).ok_or_else(|| CurveError::InvalidPoints("zero vector".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, modulus, pts, provenance)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn points(&self) -> &[ProjectivePointRep] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The sub-configuration at the given indices.
    pub fn subset(&self, indices: &[usize], provenance: Provenance) -> Result<Self, CurveError> {
        let pts = indices
            .iter()
            .map(|&k| self.points.get(k).cloned().ok_or_else(|| CurveError::InvalidPoints(format!("index {} out of range", k))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.n, self.modulus, pts, provenance)
    }

    /// Values of the coordinate function `X_s` on the fixed representatives.
    pub fn coordinate_values(&self, s: usize) -> Vec<u32> {
        self.points.iter().map(|pt| pt.0[s]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveKind {
    /// `(u:v) -> (f_0(u,v) : ... : f_n(u,v))`; each form stores the
    /// coefficients of `u^d, u^(d-1) v, ..., v^d`.
    ParametricRational { forms: Vec<Vec<u32>> },
    CompleteIntersection { equations: Vec<HomogeneousForm> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveModel {
    id: String,
    n: usize,
    modulus: PrimeModulus,
    kind: CurveKind,
    genus: u32,
    degree: u32,
    regularity: Option<u32>,
}

impl CurveModel {
    /// A rational curve given by `n + 1` binary forms of degree `degree`.
    pub fn parametric(id: &str, n: usize, degree: u32, forms: &[Vec<i64>], modulus: PrimeModulus, regularity: Option<u32>) -> Result<Self, CurveError> {
        if forms.len() != n + 1 {
            return Err(CurveError::InconsistentMetadata(format!("{} forms for P^{}", forms.len(), n)));
        }
        let forms: Vec<Vec<u32>> = forms
            .iter()
            .map(|f| {
                if f.len() != degree as usize + 1 {
                    return Err(CurveError::InconsistentMetadata(format!("form with {} coefficients for degree {}", f.len(), degree)));
                }
                Ok(f.iter().map(|&c| modulus.reduce_signed(c)).collect())
            })
            .collect::<Result<_, _>>()?;
        if binary_forms_share_factor(&forms, modulus) {
            return Err(CurveError::CommonFactor);
        }
        Ok(CurveModel { id: id.into(), n, modulus, kind: CurveKind::ParametricRational { forms }, genus: 0, degree, regularity })
    }

    /// A complete intersection curve. Supported: plane curves (one equation
    /// in `P^2`), canonical genus 4 (quadric and cubic in `P^3`) and canonical
    /// genus 5 (three quadrics in `P^4`).
    pub fn complete_intersection(id: &str, equations: Vec<HomogeneousForm>) -> Result<Self, CurveError> {
        let first = equations.first().ok_or_else(|| CurveError::Unsupported("no equations".into()))?;
        let n = first.ambient_dim();
        let modulus = first.modulus();
        for e in &equations {
            if e.ambient_dim() != n {
                return Err(CurveError::InconsistentMetadata("equations in different ambient spaces".into()));
            }
            if e.modulus() != modulus {
                return Err(CurveError::Poly(PolyError::ModulusMismatch(modulus.value(), e.modulus().value())));
            }
            if e.is_zero() {
                return Err(CurveError::InconsistentMetadata("zero equation".into()));
            }
        }
        let mut degrees: Vec<u32> = equations.iter().map(|e| e.degree()).collect();
        degrees.sort_unstable();
        let (genus, degree, regularity) = match (n, degrees.as_slice()) {
            (2, [e]) if *e >= 1 => ((e - 1) * (e - 2) / 2, *e, *e),
            (3, [2, 3]) => (4, 6, 4),
            (4, [2, 2, 2]) => (5, 8, 4),
            _ => {
                return Err(CurveError::Unsupported(format!("complete intersection of degrees {:?} in P^{}", degrees, n)));
            }
        };
        let mut equations = equations;
        equations.sort_by_key(|e| e.degree());
        Ok(CurveModel {
            id: id.into(),
            n,
            modulus,
            kind: CurveKind::CompleteIntersection { equations },
            genus,
            degree,
            regularity: Some(regularity),
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

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn regularity(&self) -> Option<u32> {
        self.regularity
    }

    pub fn hilbert(&self) -> HilbertData {
        HilbertData::Curve { degree: self.degree, genus: self.genus }
    }

    /// Lower end of the Weil window `p + 1 - 2g ceil(sqrt p)`.
    pub fn weil_lower(&self) -> i64 {
        weil_window(self.modulus, self.genus).0
    }
}

/// `[p + 1 - 2g ceil(sqrt p), p + 1 + 2g ceil(sqrt p)]`.
pub fn weil_window(p: PrimeModulus, genus: u32) -> (i64, i64) {
    let p = p.value() as i64;
    let mut s = (p as f64).sqrt() as i64;
    while s * s < p {
        s += 1;
    }
    while (s - 1) * (s - 1) >= p {
        s -= 1;
    }
    (p + 1 - 2 * genus as i64 * s, p + 1 + 2 * genus as i64 * s)
}

// Univariate polynomials over GF(p), coefficients low degree first.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], b: &[u32], p: PrimeModulus) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let lead_inv = p.inv(*b.last().expect("nonzero divisor"));
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = p.mul(*r.last().unwrap(), lead_inv);
        for (k, &c) in b.iter().enumerate() {
            r[shift + k] = p.sub(r[shift + k], p.mul(f, c));
        }
        r = trim(r);
    }
    r
}

fn poly_gcd(a: &[u32], b: &[u32], p: PrimeModulus) -> Vec<u32> {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Whether binary forms (coefficients of `u^d, ..., v^d`) have a common factor.
fn binary_forms_share_factor(forms: &[Vec<u32>], p: PrimeModulus) -> bool {
    if forms.iter().all(|f| f.iter().all(|&c| c == 0)) {
        return true;
    }
    // v divides every form iff every u^d coefficient vanishes.
    if forms.iter().all(|f| f[0] == 0) {
        return true;
    }
    // Otherwise compare the dehomogenizations f(u, 1), whose u^(d-k) coefficient is c_k.
    let mut g: Vec<u32> = Vec::new();
    for f in forms {
        let dehom: Vec<u32> = f.iter().rev().copied().collect();
        g = poly_gcd(&g, &dehom, p);
        if g.len() <= 1 {
            return false;
        }
    }
    g.len() > 1
}

fn binary_form_value(coeffs: &[u32], u: u32, v: u32, p: PrimeModulus) -> u32 {
    let d = coeffs.len() as u64 - 1;
    coeffs.iter().enumerate().fold(0, |acc, (k, &c)| {
        if c == 0 {
            acc
        } else {
            p.add(acc, p.mul(c, p.mul(p.pow(u, d - k as u64), p.pow(v, k as u64))))
        }
    })
}

/// Normalized points of `P^(len-1)(F_p)`, in lexicographic order of the
/// position of the leading 1 and then the remaining coordinates.
fn projective_points(len: usize, p: PrimeModulus) -> Vec<Vec<u32>> {
    let q = p.value();
    let mut out = Vec::new();
    for lead in 0..len {
        let free = len - lead - 1;
        let total = (q as u64).pow(free as u32);
        for mut code in 0..total {
            let mut v = vec![0u32; len];
            v[lead] = 1;
            for slot in v[lead + 1..].iter_mut().rev() {
                *slot = (code % q as u64) as u32;
                code /= q as u64;
            }
            out.push(v);
        }
    }
    out
}

/// Roots in GF(p) of a univariate polynomial (low degree first). `None`
/// means the polynomial is identically zero.
fn univariate_roots(c: &[u32], p: PrimeModulus) -> Option<Vec<u32>> {
    let c = trim(c.to_vec());
    match c.len() {
        0 => None,
        1 => Some(Vec::new()),
        2 => Some(vec![p.mul(p.neg(c[0]), p.inv(c[1]))]),
        3 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = p.sub(p.mul(b, b), p.mul(4, p.mul(a, cc)));
            let Some(s) = p.sqrt(disc) else {
                return Some(Vec::new());
            };
            let inv2a = p.inv(p.mul(2, a));
            let r1 = p.mul(p.sub(s, b), inv2a);
            let r2 = p.mul(p.sub(p.neg(s), b), inv2a);
            Some(if r1 == r2 { vec![r1] } else { vec![r1, r2] })
        }
        _ => Some(
            (0..p.value())
                .filter(|&t| c.iter().rev().fold(0u32, |acc, &k| p.add(p.mul(acc, t), k)) == 0)
                .collect(),
        ),
    }
}

/// Coefficients in the last variable of `f(prefix, t)`.
fn restrict_to_last(f: &HomogeneousForm, prefix: &[u32]) -> Vec<u32> {
    let p = f.modulus();
    let last = prefix.len();
    let mut out = vec![0u32; f.degree() as usize + 1];
    for (m, c) in f.terms() {
        let e = m.exponents();
        let mut v = c.value();
        for (k, &x) in prefix.iter().enumerate() {
            if e[k] > 0 {
                v = p.mul(v, p.pow(x, e[k] as u64));
            }
        }
        out[e[last] as usize] = p.add(out[e[last] as usize], v);
    }
    out
}

fn all_vanish(eqs: &[HomogeneousForm], pt: &[u32]) -> bool {
    eqs.iter().all(|e| e.evaluate(pt).map(|v| v.is_zero()).unwrap_or(false))
}

/// All GF(p)-rational points of the model, normalized and distinct.
pub fn enumerate_points(model: &CurveModel) -> Result<EmbeddedPointSet, CurveError> {
    let p = model.modulus;
    let provenance = Provenance { curve_id: model.id.clone(), prime: p.value(), seed: None, sample_index: None };
    match &model.kind {
        CurveKind::ParametricRational { forms } => {
            let mut params: Vec<(u32, u32)> = (0..p.value()).map(|t| (1, t)).collect();
            params.push((0, 1));
            let mut seen = HashSet::with_capacity(params.len());
            let mut pts = Vec::with_capacity(params.len());
            for (u, v) in params {
                let raw: Vec<u32> = forms.iter().map(|f| binary_form_value(f, u, v, p)).collect();
                let pt = ProjectivePointRep::normalize(&raw, p)
                    .ok_or_else(|| CurveError::NonInjectiveParametrization(format!("base point at ({}:{})", u, v)))?;
                if !seen.insert(pt.clone()) {
                    return Err(CurveError::NonInjectiveParametrization(format!("{} has two preimages", pt)));
                }
                pts.push(pt);
            }
            EmbeddedPointSet::new(model.n, p, pts, provenance)
        }
        CurveKind::CompleteIntersection { equations } => {
            if model.n > 4 {
                return Err(CurveError::Unsupported(format!("enumeration in P^{}", model.n)));
            }
            let n = model.n;
            let solver = &equations[0];
            let mut pts = Vec::new();
            let mut cone = vec![0u32; n + 1];
            cone[n] = 1;
            if all_vanish(equations, &cone) {
                pts.push(ProjectivePointRep(cone));
            }
            for prefix in projective_points(n, p) {
                let coeffs = restrict_to_last(solver, &prefix);
                let candidates = univariate_roots(&coeffs, p).unwrap_or_else(|| (0..p.value()).collect());
                for t in candidates {
                    let mut pt = prefix.clone();
                    pt.push(t);
                    if all_vanish(&equations[1..], &pt) {
                        pts.push(ProjectivePointRep(pt));
                    }
                }
            }
            pts.sort();
            let lower = model.weil_lower();
            if (pts.len() as i64) < lower {
                return Err(CurveError::TooFewPoints { count: pts.len(), lower });
            }
            EmbeddedPointSet::new(n, p, pts, provenance)
        }
    }
}

/// Whether the Jacobian of the defining equations has rank `n - 1` at every
/// rational point. Only meaningful for complete intersections.
pub fn is_smooth(model: &CurveModel, points: &EmbeddedPointSet) -> Result<bool, CurveError> {
    let CurveKind::CompleteIntersection { equations } = &model.kind else {
        return Err(CurveError::Unsupported("smoothness check needs defining equations".into()));
    };
    let p = model.modulus;
    let partials: Vec<Vec<HomogeneousForm>> = equations.iter().map(|e| e.partials()).collect::<Result<_, _>>()?;
    for pt in points.points() {
        let mut rows = Vec::with_capacity(equations.len());
        for grads in &partials {
            rows.push(grads.iter().map(|g| g.evaluate(pt.coords()).map(|v| v.value())).collect::<Result<Vec<u32>, _>>()?);
        }
        let jac = MatrixGF::from_row_vectors(&rows, model.n + 1, p)?;
        if jac.rank() != model.n - 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn random_form<R: Rng>(n: usize, degree: u32, p: PrimeModulus, rng: &mut R) -> HomogeneousForm {
    let coeffs: Vec<u32> = (0..monomial_count(n, degree)).map(|_| rng.gen_range(0..p.value())).collect();
    HomogeneousForm::from_coefficients(n, degree, p, &coeffs)
}

/// Default resampling budget for random models.
pub const DEFAULT_RETRIES: u32 = 200;

fn sample_smooth<F>(p: PrimeModulus, seed: u64, retries: u32, min_points: usize, mut make: F) -> Result<(CurveModel, EmbeddedPointSet), CurveError>
where
    F: FnMut(&mut rand_chacha::ChaCha8Rng, u32) -> Result<CurveModel, CurveError>,
{
    let mut rng = seeding::stream_rng(seed, streams::CURVE_MODEL);
    for attempt in 0..retries {
        let model = match make(&mut rng, attempt) {
            Ok(m) => m,
            Err(CurveError::Poly(_)) | Err(CurveError::InconsistentMetadata(_)) => continue,
            Err(e) => return Err(e),
        };
        let pts = match enumerate_points(&model) {
            Ok(pts) => pts,
            Err(CurveError::TooFewPoints { .. }) => continue,
            Err(e) => return Err(e),
        };
        let (lo, hi) = weil_window(p, model.genus);
        let count = pts.len() as i64;
        if count < lo || count > hi || pts.len() < min_points {
            continue;
        }
        if is_smooth(&model, &pts)? {
            return Ok((model, pts));
        }
    }
    Err(CurveError::ExhaustedRetries(retries))
}

/// A random smooth canonical curve: quadric and cubic in `P^3` for genus 4,
/// three quadrics in `P^4` for genus 5. Deterministic in `(genus, p, seed)`.
pub fn random_canonical_curve(genus: u32, p: PrimeModulus, seed: u64) -> Result<CurveModel, CurveError> {
    random_canonical_curve_with(genus, p, seed, DEFAULT_RETRIES, 0).map(|(m, _)| m)
}

/// As [`random_canonical_curve`], with an explicit retry budget and a
/// minimum number of rational points; returns the enumerated points too.
pub fn random_canonical_curve_with(genus: u32, p: PrimeModulus, seed: u64, retries: u32, min_points: usize) -> Result<(CurveModel, EmbeddedPointSet), CurveError> {
    let degrees: &[u32] = match genus {
        4 => &[2, 3],
        5 => &[2, 2, 2],
        _ => return Err(CurveError::Unsupported(format!("random canonical curve of genus {} (use an explicit model)", genus))),
    };
    let n = genus as usize - 1;
    sample_smooth(p, seed, retries, min_points, |rng, attempt| {
        let eqs = degrees.iter().map(|&d| random_form(n, d, p, rng)).collect();
        CurveModel::complete_intersection(&format!("canonical-g{}-p{}-s{}-a{}", genus, p, seed, attempt), eqs)
    })
}

/// A random smooth plane curve of the given degree.
pub fn random_plane_curve(degree: u32, p: PrimeModulus, seed: u64) -> Result<(CurveModel, EmbeddedPointSet), CurveError> {
    sample_smooth(p, seed, DEFAULT_RETRIES, 0, |rng, attempt| {
        CurveModel::complete_intersection(&format!("plane-deg{}-p{}-s{}-a{}", degree, p, seed, attempt), vec![random_form(2, degree, p, rng)])
    })
}

/// A curve's complete set of rational points with its numerical data.
#[derive(Clone, Debug)]
pub struct CurvePoints {
    id: String,
    points: EmbeddedPointSet,
    hilbert: HilbertData,
    regularity: u32,
}

impl CurvePoints {
    pub fn new(id: &str, points: EmbeddedPointSet, hilbert: HilbertData, regularity: u32) -> Self {
        CurvePoints { id: id.into(), points, hilbert, regularity }
    }

    /// Enumerates a model's points. The model must carry a regularity.
    pub fn from_model(model: &CurveModel) -> Result<Self, CurveError> {
        let regularity = model
            .regularity
            .ok_or_else(|| CurveError::InconsistentMetadata(format!("model {} has no regularity", model.id)))?;
        Ok(CurvePoints { id: model.id.clone(), points: enumerate_points(model)?, hilbert: model.hilbert(), regularity })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &EmbeddedPointSet {
        &self.points
    }

    pub fn hilbert(&self) -> HilbertData {
        self.hilbert
    }

    pub fn regularity(&self) -> u32 {
        self.regularity
    }

    pub fn with_regularity(mut self, regularity: u32) -> Self {
        self.regularity = regularity;
        self
    }

    pub fn ambient_dim(&self) -> usize {
        self.points.ambient_dim()
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.points.modulus()
    }

    pub fn genus(&self) -> u32 {
        self.hilbert.genus()
    }

    pub fn degree(&self) -> u32 {
        self.hilbert.degree()
    }

    /// Largest `j` with `#points > degree * j`: forms of degree at most `j`
    /// vanishing on every rational point vanish on the curve.
    pub fn degree_guard(&self) -> u32 {
        let n = self.points.len() as u64;
        let d = self.degree().max(1) as u64;
        ((n.saturating_sub(1)) / d) as u32
    }

    pub fn check_guard(&self, degree: u32) -> Result<(), CurveError> {
        if degree > self.degree_guard() {
            return Err(CurveError::DegreeGuardViolated { points: self.points.len(), degree, curve_degree: self.degree() });
        }
        Ok(())
    }
}

/// Image of a curve under the complete linear series of degree-`k` forms
/// vanishing on a base divisor `D` of rational points.
#[derive(Clone, Debug)]
pub struct Reembedding {
    pub points: EmbeddedPointSet,
    /// `k * d - |D|`.
    pub degree: u32,
    /// Dimension `m` of the new ambient space `P^m`.
    pub ambient_dim: usize,
    pub base_points: Vec<usize>,
    pub genus: u32,
    pub source_id: String,
}

impl Reembedding {
    pub fn into_curve(self, regularity: u32) -> CurvePoints {
        let id = format!("{}|deg{}", self.source_id, self.degree);
        CurvePoints::new(&id, self.points, HilbertData::Curve { degree: self.degree, genus: self.genus }, regularity)
    }
}

/// Re-embeds `curve` by degree-`k` forms vanishing on the points indexed by
/// `base`, taken modulo the forms vanishing on all rational points.
pub fn reembed(curve: &CurvePoints, k: u32, base: &[usize]) -> Result<Reembedding, CurveError> {
    curve.check_guard(k)?;
    let all = curve.points();
    let p = all.modulus();
    let mut is_base = vec![false; all.len()];
    for &b in base {
        if b >= all.len() || is_base[b] {
            return Err(CurveError::InvalidPoints(format!("base point index {} repeated or out of range", b)));
        }
        is_base[b] = true;
    }
    let forms = pointsets::quotient_basis(all, k);
    let sections = if base.is_empty() {
        forms.basis().clone()
    } else {
        // Combinations of the basis vanishing at the base points.
        let restricted: Vec<Vec<u32>> = forms.basis().vectors().iter().map(|v| base.iter().map(|&b| v[b]).collect()).collect();
        let r = MatrixGF::from_row_vectors(&restricted, base.len(), p)?;
        let combos = r.transpose().kernel_basis();
        let vectors: Vec<Vec<u32>> = combos
            .iter()
            .map(|c| {
                let mut w = vec![0u32; all.len()];
                for (row, &a) in forms.basis().vectors().iter().zip(c) {
                    if a != 0 {
                        for (x, &y) in w.iter_mut().zip(row) {
                            *x = p.add(*x, p.mul(a, y));
                        }
                    }
                }
                w
            })
            .collect();
        EchelonBasis::from_vectors(&vectors, all.len(), p)?
    };
    if sections.dim() < 2 {
        return Err(CurveError::NotVeryAmple(format!("only {} sections", sections.dim())));
    }
    let m = sections.dim() - 1;
    let mut seen = HashSet::new();
    let mut images = Vec::new();
    for (idx, _) in all.points().iter().enumerate().filter(|(i, _)| !is_base[*i]) {
        let raw: Vec<u32> = sections.vectors().iter().map(|g| g[idx]).collect();
        let pt = ProjectivePointRep::normalize(&raw, p)
            .ok_or_else(|| CurveError::NotVeryAmple(format!("point {} is a base point of the series", all.points()[idx])))?;
        if !seen.insert(pt.clone()) {
            return Err(CurveError::NotVeryAmple(format!("two points map to {}", pt)));
        }
        images.push(pt);
    }
    let degree = (k * curve.degree()) as i64 - base.len() as i64;
    if degree <= 0 {
        return Err(CurveError::NotVeryAmple(format!("degree {}", degree)));
    }
    let provenance = Provenance { curve_id: format!("{}|k{}|D{}", curve.id(), k, base.len()), prime: p.value(), seed: None, sample_index: None };
    Ok(Reembedding {
        points: EmbeddedPointSet::new(m, p, images, provenance)?,
        degree: degree as u32,
        ambient_dim: m,
        base_points: base.to_vec(),
        genus: curve.genus(),
        source_id: curve.id().to_string(),
    })
}

/// `count` distinct point indices drawn from the base-divisor stream of `seed`.
pub fn random_base_divisor(curve: &CurvePoints, count: usize, seed: u64) -> Result<Vec<usize>, CurveError> {
    if count > curve.points().len() {
        return Err(CurveError::InvalidPoints(format!("{} base points from {} points", count, curve.points().len())));
    }
    let mut rng = seeding::stream_rng(seed, streams::BASE_DIVISOR);
    let mut idx = rand::seq::index::sample(&mut rng, curve.points().len(), count).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// The two rational quintics in `P^3` used as reference examples: `X` lies on
/// the quadric `X_0 X_3 = X_1 X_2`, `Y` lies on no quadric.
pub mod quintics {
    use super::*;

    pub const X_FORMS: [[i64; 6]; 4] = [[1, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]];
    pub const Y_FORMS: [[i64; 6]; 4] = [[1, 0, 1, 0, 0, 0], [0, 1, 0, -1, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]];
    pub const REGULARITY: u32 = 4;

    fn build(id: &str, forms: &[[i64; 6]; 4], p: PrimeModulus) -> Result<CurveModel, CurveError> {
        let forms: Vec<Vec<i64>> = forms.iter().map(|f| f.to_vec()).collect();
        CurveModel::parametric(id, 3, 5, &forms, p, Some(REGULARITY))
    }

    pub fn x(p: PrimeModulus) -> Result<CurveModel, CurveError> {
        build("quintic-X", &X_FORMS, p)
    }

    pub fn y(p: PrimeModulus) -> Result<CurveModel, CurveError> {
        build("quintic-Y", &Y_FORMS, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffla::MatrixGF;
    use crate::polyring::monomial_basis;

    fn gf(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn quintic_x_points_lie_on_quadric() {
        let p = gf(31);
        let model = quintics::x(p).unwrap();
        let pts = enumerate_points(&model).unwrap();
        assert_eq!(pts.len(), 32);
        let q = HomogeneousForm::from_terms(3, 2, p, [(vec![1, 0, 0, 1], 1), (vec![0, 1, 1, 0], -1)]).unwrap();
        for pt in pts.points() {
            assert!(q.evaluate(pt.coords()).unwrap().is_zero());
        }
    }

    #[test]
    fn line_in_plane_has_six_points_over_f5() {
        let model = CurveModel::parametric("line", 2, 1, &[vec![1, 0], vec![0, 1], vec![0, 0]], gf(5), Some(1)).unwrap();
        assert_eq!(enumerate_points(&model).unwrap().len(), 6);
    }

    #[test]
    fn common_factor_and_noninjective_parametrizations_rejected() {
        // u*(u, v) has the common factor u.
        let r = CurveModel::parametric("bad", 1, 2, &[vec![1, 0, 0], vec![0, 1, 0]], gf(7), None);
        assert_eq!(r.unwrap_err(), CurveError::CommonFactor);
        // (u^2 : v^2) identifies (1:t) with (1:-t).
        let m = CurveModel::parametric("sq", 1, 2, &[vec![1, 0, 0], vec![0, 0, 1]], gf(7), None).unwrap();
        assert!(matches!(enumerate_points(&m), Err(CurveError::NonInjectiveParametrization(_))));
    }

    #[test]
    fn random_plane_quartic_in_weil_window() {
        let p = gf(101);
        let (model, pts) = random_plane_curve(4, p, 7).unwrap();
        assert_eq!(model.genus(), 3);
        let (lo, hi) = weil_window(p, 3);
        assert_eq!((lo, hi), (101 + 1 - 6 * 11, 101 + 1 + 6 * 11));
        assert!((lo..=hi).contains(&(pts.len() as i64)));
        assert!(is_smooth(&model, &pts).unwrap());
    }

    #[test]
    fn smoothness_examples() {
        let p = gf(101);
        let fermat = HomogeneousForm::from_terms(2, 4, p, [(vec![4, 0, 0], 1), (vec![0, 4, 0], 1), (vec![0, 0, 4], 1)]).unwrap();
        let m = CurveModel::complete_intersection("fermat", vec![fermat]).unwrap();
        assert!(is_smooth(&m, &enumerate_points(&m).unwrap()).unwrap());
        // X_1^2 X_2 - X_0^2 (X_0 + X_2): node at (0:0:1).
        let nodal =
            HomogeneousForm::from_terms(2, 3, p, [(vec![0, 2, 1], 1), (vec![3, 0, 0], -1), (vec![2, 0, 1], -1)]).unwrap();
        let m = CurveModel::complete_intersection("nodal", vec![nodal]).unwrap();
        let pts = enumerate_points(&m).unwrap();
        assert!(pts.points().iter().any(|pt| pt.coords() == [0, 0, 1]));
        assert!(!is_smooth(&m, &pts).unwrap());
        let conic = HomogeneousForm::from_terms(2, 2, p, [(vec![2, 0, 0], 1), (vec![0, 2, 0], 1), (vec![0, 0, 2], -1)]).unwrap();
        let m = CurveModel::complete_intersection("conic", vec![conic]).unwrap();
        assert!(is_smooth(&m, &enumerate_points(&m).unwrap()).unwrap());
    }

    #[test]
    fn enumeration_matches_full_scan() {
        let p = gf(13);
        let (model, pts) = random_canonical_curve_with(4, p, 3, DEFAULT_RETRIES, 0).unwrap();
        let CurveKind::CompleteIntersection { equations } = model.kind() else { unreachable!() };
        let brute: Vec<Vec<u32>> = projective_points(4, p).into_iter().filter(|pt| all_vanish(equations, pt)).collect();
        let mut found: Vec<Vec<u32>> = pts.points().iter().map(|pt| pt.coords().to_vec()).collect();
        found.sort();
        let mut brute = brute;
        brute.sort();
        assert_eq!(found, brute);
    }

    #[test]
    fn random_canonical_models() {
        let m4 = random_canonical_curve(4, gf(53), 1).unwrap();
        assert_eq!((m4.genus(), m4.degree(), m4.ambient_dim()), (4, 6, 3));
        let CurveKind::CompleteIntersection { equations } = m4.kind() else { unreachable!() };
        assert_eq!(equations.iter().map(|e| e.degree()).collect::<Vec<_>>(), vec![2, 3]);
        assert!(is_smooth(&m4, &enumerate_points(&m4).unwrap()).unwrap());

        let m5 = random_canonical_curve(5, gf(31), 1).unwrap();
        assert_eq!((m5.genus(), m5.degree(), m5.ambient_dim()), (5, 8, 4));
        assert!(is_smooth(&m5, &enumerate_points(&m5).unwrap()).unwrap());

        assert!(matches!(random_canonical_curve(3, gf(31), 1), Err(CurveError::Unsupported(_))));
        assert_eq!(random_canonical_curve(4, gf(53), 1).unwrap(), m4);
    }

    #[test]
    fn reembedding_dimensions() {
        let p = gf(53);
        let model = random_canonical_curve(4, p, 2).unwrap();
        let curve = CurvePoints::from_model(&model).unwrap();
        let same = reembed(&curve, 1, &[]).unwrap();
        assert_eq!((same.ambient_dim, same.degree), (3, 6));

        let base = random_base_divisor(&curve, 6, 2).unwrap();
        let r = reembed(&curve, 4, &base).unwrap();
        assert_eq!(r.degree, 18);
        assert_eq!(r.ambient_dim + 1, 18 - 4 + 1);
        // Nondegenerate: linear forms separate into full rank m + 1.
        assert_eq!(pointsets::hilbert_function(&r.points, 1), r.ambient_dim + 1);

        let (quartic, _) = random_plane_curve(4, gf(101), 5).unwrap();
        let curve = CurvePoints::from_model(&quartic).unwrap();
        let base = random_base_divisor(&curve, 2, 5).unwrap();
        let r = reembed(&curve, 2, &base).unwrap();
        assert_eq!((r.degree, r.ambient_dim), (6, 3));
    }

    #[test]
    fn reembedding_guard() {
        let model = quintics::x(gf(31)).unwrap();
        let curve = CurvePoints::from_model(&model).unwrap();
        assert_eq!(curve.degree_guard(), 6);
        assert!(matches!(reembed(&curve, 7, &[]), Err(CurveError::DegreeGuardViolated { .. })));
    }

    /// Multiplies binary forms stored as coefficient vectors of u^(d-k) v^k.
    fn binary_mul(a: &[u32], b: &[u32], p: PrimeModulus) -> Vec<u32> {
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = p.add(out[i + j], p.mul(x, y));
            }
        }
        out
    }

    #[test]
    fn vanishing_forms_pull_back_to_zero() {
        let p = gf(31);
        let model = quintics::y(p).unwrap();
        let CurveKind::ParametricRational { forms } = model.kind() else { unreachable!() };
        let pts = enumerate_points(&model).unwrap();
        for j in 1..=5u32 {
            assert!(32 > 5 * j);
            let ev = pointsets::evaluation_matrix(&pts, j);
            for kernel_vec in ev.kernel_basis() {
                let mut pullback = vec![0u32; 5 * j as usize + 1];
                for (m, &c) in monomial_basis(3, j).iter().zip(&kernel_vec) {
                    if c == 0 {
                        continue;
                    }
                    let mut term = vec![c];
                    for (k, &e) in m.exponents().iter().enumerate() {
                        for _ in 0..e {
                            term = binary_mul(&term, &forms[k], p);
                        }
                    }
                    for (slot, t) in pullback.iter_mut().zip(term) {
                        *slot = p.add(*slot, t);
                    }
                }
                assert!(pullback.iter().all(|&x| x == 0), "degree {} form does not vanish on Y", j);
            }
        }
        let _ = MatrixGF::zeros(0, 0, p);
    }
}
