//! Experiment configuration files.
//!
//! A config is a JSON object. The curve is given inline or as a path to a
//! JSON file holding only the curve object:
//!
//! ```json
//! {
//!   "curve": {"model": "parametric_rational", "n": 3, "degree": 5,
//!             "forms": [[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,0,0,1,0],[0,0,0,0,0,1]],
//!             "regularity": 4},
//!   "prime": 31,
//!   "gamma": 28,
//!   "samples": 5,
//!   "seed": 42,
//!   "expected": "fails"
//! }
//! ```
//!
//! Complete intersections list their equations as term lists,
//! `{"model": "complete_intersection", "n": 2, "equations": [[{"exps": [4,0,0], "c": 1}, ...]]}`.
//! Random models are `{"model": "random_canonical", "genus": 5}` and
//! `{"model": "random_plane", "degree": 4}`; the built-in quintics are
//! `{"model": "builtin", "name": "quintic-x"}`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::curves::{
    self, quintics, random_base_divisor, random_canonical_curve_with, random_plane_curve, reembed, CurveModel, CurvePoints,
    DEFAULT_RETRIES,
};
use crate::ffla::PrimeModulus;
use crate::mrc::{large_degree_regularity, observed_regularity};
use crate::pointsets::hilbert_function;
use crate::polyring::HomogeneousForm;

use super::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub exps: Vec<u32>,
    pub c: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    ParametricRational {
        n: usize,
        degree: u32,
        forms: Vec<Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        regularity: Option<u32>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
    },
    CompleteIntersection {
        n: usize,
        equations: Vec<Vec<Term>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
    },
    RandomCanonical {
        genus: u32,
    },
    RandomPlane {
        degree: u32,
    },
    Builtin {
        name: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveRef {
    Path(PathBuf),
    Inline(CurveSpec),
}

/// Re-embedding by degree-`k` forms through `base_points` seeded points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReembedSpec {
    pub k: u32,
    #[serde(default)]
    pub base_points: usize,
    /// Regularity of the new model. When absent it is taken from degree
    /// (`d ≥ 2g + 1`) or read off the computed curve diagram.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regularity: Option<u32>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Holds,
    Fails,
    #[default]
    ReportOnly,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub curve: CurveRef,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prime_ladder: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<usize>,
    /// Half-open `[start, end)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_range: Option<(usize, usize)>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<u32>,
    #[serde(default)]
    pub expected: Expected,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reembed: Option<ReembedSpec>,
    /// Restricts an MRC check to the two cells of one diagonal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn default_samples() -> usize {
    5
}

impl ExperimentConfig {
    pub fn builtin(name: &str) -> Self {
        ExperimentConfig {
            curve: CurveRef::Inline(CurveSpec::Builtin { name: name.to_string() }),
            prime: None,
            prime_ladder: Vec::new(),
            gamma: None,
            gamma_range: None,
            samples: default_samples(),
            seed: 0,
            rows: None,
            expected: Expected::ReportOnly,
            reembed: None,
            diagonal: None,
            format: None,
            output: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))?;
        let mut cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))?;
        if let CurveRef::Path(p) = &cfg.curve {
            let resolved = if p.is_relative() { path.parent().unwrap_or(Path::new(".")).join(p) } else { p.clone() };
            cfg.curve = CurveRef::Inline(read_curve(&resolved)?);
        }
        Ok(cfg)
    }

    /// A report-only experiment on the curve described in a JSON file.
    pub fn curve_file(path: &Path) -> Result<Self, CliError> {
        let mut cfg = Self::builtin("");
        cfg.curve = CurveRef::Inline(read_curve(path)?);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.samples == 0 {
            return Err(CliError::Input("samples must be at least 1".into()));
        }
        if let (Some(p), false) = (self.prime, self.prime_ladder.is_empty()) {
            if !self.prime_ladder.contains(&p) {
                return Err(CliError::Input(format!("prime {} is not in the prime ladder {:?}", p, self.prime_ladder)));
            }
        }
        if let Some((a, b)) = self.gamma_range {
            if a >= b {
                return Err(CliError::Input(format!("empty γ range [{}, {})", a, b)));
            }
        }
        if self.gamma.is_some() && self.gamma_range.is_some() {
            return Err(CliError::Input("give either gamma or gamma_range, not both".into()));
        }
        Ok(())
    }

    /// The primes to try, in order, starting at `prime`.
    pub fn ladder(&self) -> Result<Vec<PrimeModulus>, CliError> {
        let raw: Vec<u64> = match (self.prime, self.prime_ladder.is_empty()) {
            (Some(p), true) => vec![p],
            (None, true) => vec![31],
            (None, false) => self.prime_ladder.clone(),
            (Some(p), false) => self.prime_ladder.iter().copied().skip_while(|&q| q != p).collect(),
        };
        raw.into_iter()
            .map(|p| PrimeModulus::new(p).map_err(|e| CliError::Input(e.to_string())))
            .collect()
    }

    /// Explicit `γ` values, or `None` when the config names none.
    pub fn gammas(&self) -> Option<Vec<usize>> {
        match (self.gamma, self.gamma_range) {
            (Some(g), _) => Some(vec![g]),
            (None, Some((a, b))) => Some((a..b).collect()),
            (None, None) => None,
        }
    }

    fn spec(&self) -> &CurveSpec {
        match &self.curve {
            CurveRef::Inline(s) => s,
            CurveRef::Path(_) => unreachable!("paths are resolved on load"),
        }
    }

    /// Builds the curve at prime `p`. `min_points` filters random models.
    pub fn build_curve(&self, p: PrimeModulus, min_points: usize) -> Result<CurvePoints, CliError> {
        let base = build_spec(self.spec(), p, self.seed, min_points)?;
        match &self.reembed {
            None => Ok(base),
            Some(spec) => reembedded(&base, spec, self.seed),
        }
    }
}

fn read_curve(path: &Path) -> Result<CurveSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {}", path.display(), e)))
}

fn build_spec(spec: &CurveSpec, p: PrimeModulus, seed: u64, min_points: usize) -> Result<CurvePoints, CliError> {
    let from_model = |m: &CurveModel| CurvePoints::from_model(m).map_err(CliError::from);
    match spec {
        CurveSpec::ParametricRational { n, degree, forms, regularity, id } => {
            let id = id.clone().unwrap_or_else(|| format!("parametric-n{}-d{}", n, degree));
            let model = CurveModel::parametric(&id, *n, *degree, forms, p, *regularity)?;
            if model.regularity().is_none() {
                return Err(CliError::Input("parametric models need a \"regularity\" field".into()));
            }
            from_model(&model)
        }
        CurveSpec::CompleteIntersection { n, equations, id } => {
            let id = id.clone().unwrap_or_else(|| format!("ci-n{}", n));
            let forms = equations
                .iter()
                .map(|terms| {
                    let degree = terms
                        .first()
                        .map(|t| t.exps.iter().sum::<u32>())
                        .ok_or_else(|| CliError::Input("empty equation".into()))?;
                    HomogeneousForm::from_terms(*n, degree, p, terms.iter().map(|t| (t.exps.clone(), t.c)))
                        .map_err(|e| CliError::Input(e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            from_model(&CurveModel::complete_intersection(&id, forms)?)
        }
        CurveSpec::RandomCanonical { genus } => {
            let (model, pts) = random_canonical_curve_with(*genus, p, seed, DEFAULT_RETRIES, min_points)?;
            let reg = model.regularity().expect("canonical models carry a regularity");
            Ok(CurvePoints::new(model.id(), pts, model.hilbert(), reg))
        }
        CurveSpec::RandomPlane { degree } => {
            let (model, pts) = random_plane_curve(*degree, p, seed)?;
            let reg = model.regularity().expect("plane models carry a regularity");
            Ok(CurvePoints::new(model.id(), pts, model.hilbert(), reg))
        }
        CurveSpec::Builtin { name } => match name.as_str() {
            "quintic-x" => from_model(&quintics::x(p)?),
            "quintic-y" => from_model(&quintics::y(p)?),
            other => Err(CliError::Input(format!("unknown built-in curve {:?} (quintic-x, quintic-y)", other))),
        },
    }
}

fn reembedded(base: &CurvePoints, spec: &ReembedSpec, seed: u64) -> Result<CurvePoints, CliError> {
    let divisor = random_base_divisor(base, spec.base_points, seed)?;
    let image = reembed(base, spec.k, &divisor)?;
    let (genus, degree) = (image.genus, image.degree);
    let provisional = image.into_curve(0);
    let regularity = match spec.regularity.or_else(|| large_degree_regularity(genus, degree)) {
        Some(m) => m,
        None => observed_regularity(&provisional, 8)?
            .ok_or_else(|| CliError::Input("could not determine the regularity of the re-embedded curve".into()))?,
    };
    let curve = provisional.with_regularity(regularity);
    // An image that is not embedded (two points glued, possibly a conjugate
    // pair) has larger arithmetic genus and its Hilbert function falls short.
    for t in regularity..=curve.degree_guard().min(regularity + 2) {
        let h = hilbert_function(curve.points(), t) as i64;
        let expected = curve.hilbert().polynomial(t as i64);
        if h != expected {
            return Err(CliError::Input(format!(
                "re-embedded curve has H({}) = {} but P({}) = {}; the series is not a projectively normal embedding",
                t, h, t, expected
            )));
        }
    }
    Ok(curve)
}

impl From<curves::CurveError> for CliError {
    fn from(e: curves::CurveError) -> Self {
        CliError::Input(e.to_string())
    }
}
