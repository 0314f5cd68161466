//! Python bindings: domains, spectra, Weyl predictions, boundary geometry,
//! the cone experiment and the acceptance checks.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use weyl_lab::brown::{self, ConeParams};
use weyl_lab::cone::{self as cone_mod, ConeExperiment, ConeSide};
use weyl_lab::geometry::{self, format_domain, parse_domain, ConvexPolygon};
use weyl_lab::localization;
use weyl_lab::spectral::{self, SolveMode};
use weyl_lab::suite::{self, SuiteConfig};
use weyl_lab::{weyl, Error, Point};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Solver(_) | Error::Resource(_) | Error::UndefinedNormal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A planar domain: rectangle, disk or convex polygon.
#[pyclass(name = "Domain", module = "weyl_lab", frozen)]
struct PyDomain {
    inner: geometry::Domain,
}

#[pymethods]
impl PyDomain {
    /// Parse a record such as `"rect 1 2"`, `"disk 0.5"`, `"poly 0 0 1 0 0 1"` or `"random 6 3"`.
    #[new]
    fn new(record: &str) -> PyResult<Self> {
        Ok(Self { inner: parse_domain(record).map_err(py_err)? })
    }

    #[staticmethod]
    fn rectangle(a: f64, b: f64) -> PyResult<Self> {
        Ok(Self { inner: geometry::Domain::rectangle(a, b).map_err(py_err)? })
    }

    #[staticmethod]
    fn disk(radius: f64) -> PyResult<Self> {
        Ok(Self { inner: geometry::Domain::disk(radius).map_err(py_err)? })
    }

    #[staticmethod]
    fn polygon(vertices: Vec<(f64, f64)>) -> PyResult<Self> {
        let v = vertices.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        Ok(Self { inner: geometry::Domain::polygon(v).map_err(py_err)? })
    }

    /// Convex polygon with `k` vertices on the circle of radius 1/2 about (1/2, 1/2).
    #[staticmethod]
    fn random_polygon(k: usize, seed: u64) -> PyResult<Self> {
        let p = ConvexPolygon::random_inscribed(k, seed).map_err(py_err)?;
        Ok(Self { inner: geometry::Domain::ConvexPolygon(p) })
    }

    #[getter]
    fn area(&self) -> f64 {
        self.inner.area()
    }

    #[getter]
    fn perimeter(&self) -> f64 {
        self.inner.perimeter()
    }

    #[getter]
    fn inradius(&self) -> f64 {
        self.inner.inradius()
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        self.inner.contains(Point::new(x, y))
    }

    /// Positive inside, negative outside.
    fn signed_distance(&self, x: f64, y: f64) -> f64 {
        self.inner.signed_distance(Point::new(x, y))
    }

    /// `(theta_inner, theta_outer, theta_bar)` at distance `t`.
    fn theta(&self, t: f64) -> PyResult<(f64, f64, f64)> {
        let r = geometry::theta(&self.inner, t).map_err(py_err)?;
        Ok((r.theta_inner, r.theta_outer, r.theta_bar))
    }

    fn inner_parallel_set(&self, t: f64) -> PyResult<Self> {
        Ok(Self { inner: geometry::inner_parallel_set(&self.inner, t).map_err(py_err)? })
    }

    /// Length of the good boundary part for the cone of aperture `epsilon` and height `r`.
    fn mu(&self, epsilon: f64, r: f64) -> PyResult<f64> {
        Ok(brown::mu(&self.inner, ConeParams::new(epsilon, r).map_err(py_err)?))
    }

    /// Whether `(x, y)` lies in a cone from a good boundary point.
    fn in_good_region(&self, x: f64, y: f64, epsilon: f64, r: f64) -> PyResult<bool> {
        let c = ConeParams::new(epsilon, r).map_err(py_err)?;
        Ok(brown::in_good_region(&self.inner, Point::new(x, y), c).is_some())
    }

    /// Monte Carlo volumes of the bulk, good and bad regions of the collar.
    fn region_volumes<'py>(
        &self,
        py: Python<'py>,
        epsilon: f64,
        r: f64,
        l0: f64,
        samples: u64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let c = ConeParams::new(epsilon, r).map_err(py_err)?;
        let v = localization::region_volumes(&self.inner, c, l0, samples, seed).map_err(py_err)?;
        let d = PyDict::new(py);
        for (k, e) in [("bulk", v.bulk), ("good", v.good), ("bad", v.bad), ("collar", v.collar)] {
            d.set_item(k, (e.value, e.stderr))?;
        }
        d.set_item("collar_exact", v.collar_exact)?;
        d.set_item("collar_bound", v.collar_bound)?;
        d.set_item("within_bound", v.within_bound)?;
        Ok(d)
    }

    fn __str__(&self) -> String {
        format_domain(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Domain({:?})", format_domain(&self.inner))
    }
}

/// Dirichlet eigenvalues below a cutoff.
#[pyclass(name = "Spectrum", module = "weyl_lab", frozen)]
struct PySpectrum {
    inner: spectral::Spectrum,
}

#[pymethods]
impl PySpectrum {
    /// Closed-form spectrum of a rectangle or disk.
    #[staticmethod]
    fn exact(domain: &PyDomain, cutoff: f64) -> PyResult<Self> {
        Ok(Self { inner: spectral::exact_spectrum(&domain.inner, cutoff).map_err(py_err)? })
    }

    /// Five-point finite-difference spectrum on an `n`-per-side grid.
    #[staticmethod]
    fn finite_difference(py: Python<'_>, domain: &PyDomain, n: usize, cutoff: f64) -> PyResult<Self> {
        let d = domain.inner.clone();
        let spec = py.detach(move || {
            let op = spectral::discretize(&d, n)?;
            spectral::eigen_below(&op, cutoff, SolveMode::Auto)
        });
        Ok(Self { inner: spec.map_err(py_err)? })
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues.clone()
    }

    #[getter]
    fn cutoff(&self) -> f64 {
        self.inner.cutoff
    }

    fn counting(&self, lam: f64) -> PyResult<usize> {
        self.inner.counting(lam).map_err(py_err)
    }

    fn riesz_mean(&self, lam: f64, gamma: f64) -> PyResult<f64> {
        self.inner.riesz_mean(lam, gamma).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Spectrum({} eigenvalues below {})", self.inner.len(), self.inner.cutoff)
    }
}

/// `(omega_d, L_d)` for dimension `d`.
#[pyfunction]
fn weyl_constants(d: usize) -> PyResult<(f64, f64)> {
    let c = weyl::constants(d).map_err(py_err)?;
    Ok((c.omega_d, c.l_d))
}

/// Two-term prediction for the Riesz mean `sum (lam - lam_k)_+`.
#[pyfunction]
fn two_term_riesz(domain: &PyDomain, lam: f64) -> PyResult<f64> {
    weyl::two_term_riesz(&domain.inner.summary(), lam).map_err(py_err)
}

/// Two-term prediction for the counting function.
#[pyfunction]
fn two_term_counting(domain: &PyDomain, lam: f64) -> PyResult<f64> {
    weyl::two_term_counting(&domain.inner.summary(), lam).map_err(py_err)
}

/// Riesz-mean remainders on a log grid: `(lambdas, remainders, slope)`.
#[pyfunction]
#[pyo3(signature = (spectrum, domain, lo, hi, per_decade = 20))]
fn remainder_series(
    spectrum: &PySpectrum,
    domain: &PyDomain,
    lo: f64,
    hi: f64,
    per_decade: usize,
) -> PyResult<(Vec<f64>, Vec<f64>, f64)> {
    let grid = weyl::midpoint_grid(&spectrum.inner, lo, hi, per_decade).map_err(py_err)?;
    let s = weyl::remainder_series(&spectrum.inner, &domain.inner.summary(), &grid).map_err(py_err)?;
    Ok((s.lambdas, s.remainders, s.slope))
}

/// Localized trace near a cone vertex against its two-term prediction, one dict per `h`.
#[pyfunction]
#[pyo3(signature = (epsilon, hs, side = "cone", center = (0.0, 0.0), l = 1.0, grid_ratio = 8.0))]
fn cone_trace<'py>(
    py: Python<'py>,
    epsilon: f64,
    hs: Vec<f64>,
    side: &str,
    center: (f64, f64),
    l: f64,
    grid_ratio: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let side = match side {
        "cone" => ConeSide::Cone,
        "complement" => ConeSide::Complement,
        other => return Err(PyValueError::new_err(format!("side must be cone or complement, got {other:?}"))),
    };
    let mut exp = ConeExperiment::new(epsilon, side, Point::new(center.0, center.1), l, hs).map_err(py_err)?;
    exp.grid_ratio = grid_ratio;
    let table = py.detach(move || cone_mod::cone_trace_experiment(&exp)).map_err(py_err)?;
    table
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("h", r.h)?;
            d.set_item("h_grid", r.h_grid)?;
            d.set_item("measured", r.measured)?;
            d.set_item("predicted", r.predicted)?;
            d.set_item("remainder", r.remainder)?;
            d.set_item("normalized", r.normalized)?;
            d.set_item("contaminated", r.contaminated)?;
            Ok(d)
        })
        .collect()
}

/// Run acceptance criteria by number with default settings: `(id, status, title, detail)`.
#[pyfunction]
fn run_checks(py: Python<'_>, ids: Vec<u8>) -> Vec<(u8, String, String, String)> {
    let out = py.detach(move || suite::run_suite(&ids, &SuiteConfig::default()));
    out.into_iter()
        .map(|c| (c.id, c.status.as_str().to_string(), c.title.to_string(), c.detail))
        .collect()
}

#[pymodule]
#[pyo3(name = "weyl_lab")]
fn weyl_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDomain>()?;
    m.add_class::<PySpectrum>()?;
    m.add_function(wrap_pyfunction!(weyl_constants, m)?)?;
    m.add_function(wrap_pyfunction!(two_term_riesz, m)?)?;
    m.add_function(wrap_pyfunction!(two_term_counting, m)?)?;
    m.add_function(wrap_pyfunction!(remainder_series, m)?)?;
    m.add_function(wrap_pyfunction!(cone_trace, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
