use mrclab_core::class_calculus::{self, ChernCase, Rational};
use mrclab_core::cli::{self, ExperimentConfig};
use mrclab_core::curves::{self, quintics, CurvePoints, EmbeddedPointSet};
use mrclab_core::ffla::PrimeModulus;
use mrclab_core::{koszul, mrc};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn modulus(p: u64) -> PyResult<PrimeModulus> {
    PrimeModulus::new(p).map_err(err)
}

/// Converts a JSON value into the matching Python object.
fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    let int = py.import("builtins")?.getattr("int")?;
    let num = int.call1((q.numer().to_string(),))?;
    let den = int.call1((q.denom().to_string(),))?;
    py.import("fractions")?.getattr("Fraction")?.call1((num, den))
}

#[pyclass(name = "BettiDiagram", module = "mrclab", frozen)]
struct PyBettiDiagram(koszul::BettiDiagram);

#[pymethods]
impl PyBettiDiagram {
    /// Rows `j`, each with columns `i = 0..=n+1`.
    #[getter]
    fn rows(&self) -> Vec<Vec<usize>> {
        self.0.rows().to_vec()
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim()
    }

    fn get(&self, i: usize, j: usize) -> usize {
        self.0.get(i, j)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn to_csv(&self) -> String {
        self.0.to_csv()
    }

    fn __repr__(&self) -> String {
        format!("BettiDiagram(n={}, rows={:?})", self.0.ambient_dim(), self.0.display_rows())
    }
}

#[pyclass(name = "Curve", module = "mrclab", frozen)]
struct PyCurve(CurvePoints);

#[pymethods]
impl PyCurve {
    #[staticmethod]
    fn quintic_x(p: u64) -> PyResult<Self> {
        Ok(PyCurve(CurvePoints::from_model(&quintics::x(modulus(p)?).map_err(err)?).map_err(err)?))
    }

    #[staticmethod]
    fn quintic_y(p: u64) -> PyResult<Self> {
        Ok(PyCurve(CurvePoints::from_model(&quintics::y(modulus(p)?).map_err(err)?).map_err(err)?))
    }

    #[staticmethod]
    #[pyo3(signature = (genus, p, seed, min_points = 0))]
    fn random_canonical(genus: u32, p: u64, seed: u64, min_points: usize) -> PyResult<Self> {
        let (model, pts) =
            curves::random_canonical_curve_with(genus, modulus(p)?, seed, curves::DEFAULT_RETRIES, min_points).map_err(err)?;
        Ok(PyCurve(CurvePoints::new(model.id(), pts, model.hilbert(), model.regularity().unwrap_or(4))))
    }

    #[staticmethod]
    fn random_plane(degree: u32, p: u64, seed: u64) -> PyResult<Self> {
        let (model, pts) = curves::random_plane_curve(degree, modulus(p)?, seed).map_err(err)?;
        Ok(PyCurve(CurvePoints::new(model.id(), pts, model.hilbert(), model.regularity().unwrap_or(degree))))
    }

    /// Builds the curve described by an experiment config (JSON text).
    #[staticmethod]
    #[pyo3(signature = (config, p = None))]
    fn from_config(config: &str, p: Option<u64>) -> PyResult<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(config).map_err(err)?;
        cfg.validate().map_err(err)?;
        let prime = match p {
            Some(p) => modulus(p)?,
            None => cfg.ladder().map_err(err)?[0],
        };
        Ok(PyCurve(cfg.build_curve(prime, 0).map_err(err)?))
    }

    #[getter]
    fn id(&self) -> String {
        self.0.id().to_string()
    }

    #[getter]
    fn prime(&self) -> u32 {
        self.0.modulus().value()
    }

    #[getter]
    fn genus(&self) -> u32 {
        self.0.genus()
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.0.degree()
    }

    #[getter]
    fn regularity(&self) -> u32 {
        self.0.regularity()
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim()
    }

    fn __len__(&self) -> usize {
        self.0.points().len()
    }

    fn points(&self) -> Vec<Vec<u32>> {
        self.0.points().points().iter().map(|p| p.coords().to_vec()).collect()
    }

    /// Diagram of the curve's coordinate ring through row `rows`.
    fn betti(&self, py: Python<'_>, rows: u32) -> PyResult<PyBettiDiagram> {
        py.detach(|| koszul::curve_betti_diagram(&self.0, rows)).map(PyBettiDiagram).map_err(err)
    }

    /// Entrywise minimum over seeded `γ`-subsets, through row `r + 1` by default.
    #[pyo3(signature = (gamma, samples = 5, seed = 0, rows = None))]
    fn generic_diagram(&self, py: Python<'_>, gamma: usize, samples: usize, seed: u64, rows: Option<u32>) -> PyResult<PyBettiDiagram> {
        py.detach(|| match rows {
            Some(r) => mrc::generic_diagram_rows(&self.0, gamma, samples, seed, r),
            None => mrc::generic_diagram(&self.0, gamma, samples, seed),
        })
        .map(PyBettiDiagram)
        .map_err(err)
    }

    fn predict<'py>(&self, py: Python<'py>, gamma: i64) -> PyResult<Bound<'py, PyAny>> {
        let tail = mrc::predicted_tail(gamma, &self.0).map_err(err)?;
        to_py(py, &serde_json::to_value(tail).map_err(err)?)
    }

    #[pyo3(signature = (gamma, samples = 5, seed = 0))]
    fn mrc_check<'py>(&self, py: Python<'py>, gamma: usize, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let (_, report) = py.detach(|| mrc::mrc_check(&self.0, gamma, samples, seed)).map_err(err)?;
        to_py(py, &serde_json::to_value(report).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("Curve({:?}, p={}, points={})", self.0.id(), self.0.modulus().value(), self.0.points().len())
    }
}

/// Betti diagram of explicit points of `P^n` over `GF(p)`.
#[pyfunction]
fn betti_diagram(py: Python<'_>, points: Vec<Vec<i64>>, n: usize, p: u64, rows: u32) -> PyResult<PyBettiDiagram> {
    let set = EmbeddedPointSet::from_coordinates(n, modulus(p)?, &points, Default::default()).map_err(err)?;
    Ok(PyBettiDiagram(py.detach(|| koszul::betti_diagram(&set, rows))))
}

/// `(A, B_1, B_2)` as fractions.
#[pyfunction]
fn summed_class_coefficients<'py>(py: Python<'py>, g: i64, i: i64) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let (a, b1, b2) = class_calculus::summed_class_coefficients(g, i).map_err(err)?;
    Ok((fraction(py, &a)?, fraction(py, &b1)?, fraction(py, &b2)?))
}

/// `[Z]` on the basis `(λ, Ψx, Ψy, Ψz)`.
#[pyfunction]
#[pyo3(signature = (g, i, n = None))]
fn grr_class_check<'py>(py: Python<'py>, g: i64, i: i64, n: Option<i64>) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let z = class_calculus::grr_class_check(g, i, n.unwrap_or(g + 2)).map_err(err)?;
    z.0.iter().map(|q| fraction(py, q)).collect()
}

#[pyfunction]
fn chern_wedge_identity(rank: usize, i: usize, case: &str) -> PyResult<bool> {
    let case = match case {
        "wedge-c1" => ChernCase::WedgeC1,
        "wedge-c2" => ChernCase::WedgeC2,
        "twist-c1" => ChernCase::TwistC1,
        "twist-c2" => ChernCase::TwistC2,
        other => return Err(PyValueError::new_err(format!("unknown case {:?}", other))),
    };
    class_calculus::chern_wedge_identity(rank, i, case).map_err(err)
}

/// Runs the command line with `args` (without the program name); returns the exit status.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> i32 {
    let argv: Vec<String> = std::iter::once("mrclab".to_string()).chain(args).collect();
    py.detach(|| cli::run(argv))
}

#[pymodule]
fn mrclab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBettiDiagram>()?;
    m.add_class::<PyCurve>()?;
    m.add_function(wrap_pyfunction!(betti_diagram, m)?)?;
    m.add_function(wrap_pyfunction!(summed_class_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(grr_class_check, m)?)?;
    m.add_function(wrap_pyfunction!(chern_wedge_identity, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
