//! Python bindings: mesh generation, benchmark runs, error estimation and
//! element stiffness.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyTuple};

use topopt::bench::{self, BenchmarkPreset, Problem, RunConfig, RunReport};
use topopt::estimator::ErrorBreakdown;
use topopt::fem::{element_stiffness as stiffness, ElementFamily, ElementGeometry, Material, MaterialModel};
use topopt::mesh::{generate_mesh, refine_uniform, DomainSpec, Triangulation};
use topopt::Error;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_)
        | Error::InvalidDomain(_)
        | Error::InvalidLoadCase(_)
        | Error::UnsupportedFamily { .. }
        | Error::DimensionMismatch { .. }
        | Error::DensityOutOfRange { .. } => PyValueError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn value_string(v: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(b) = v.extract::<bool>() {
        return Ok(b.to_string());
    }
    Ok(v.str()?.to_string())
}

fn config_from(problem: &str, elem: &str, options: Option<&Bound<'_, PyDict>>) -> PyResult<RunConfig> {
    let problem: Problem = problem.parse().map_err(to_py)?;
    let family: ElementFamily = elem.parse().map_err(to_py)?;
    let mut cfg = RunConfig::for_problem(problem, family);
    if let Some(opts) = options {
        for (k, v) in opts.iter() {
            let key: String = k.extract()?;
            cfg.set(&key, &value_string(&v)?).map_err(to_py)?;
        }
    }
    Ok(cfg)
}

fn breakdown_dict<'py>(py: Python<'py>, e: &ErrorBreakdown) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("bulk", e.bulk_total)?;
    d.set_item("jump", e.jump_total)?;
    d.set_item("neumann", e.neumann_total)?;
    d.set_item("local_eta_sq", e.local_sum())?;
    d.set_item("eta", e.eta_global)?;
    d.set_item("eta_sq", e.local.iter().map(|l| l.eta_sq).collect::<Vec<_>>())?;
    Ok(d)
}

#[pyclass(name = "Mesh", module = "topopt_py")]
struct PyMesh {
    inner: topopt::Mesh,
}

#[pymethods]
impl PyMesh {
    #[new]
    #[pyo3(signature = (elem, width, height, nx, ny, triangulation = "cross", refine = 0, right_height = None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        elem: &str,
        width: f64,
        height: f64,
        nx: usize,
        ny: usize,
        triangulation: &str,
        refine: usize,
        right_height: Option<f64>,
    ) -> PyResult<Self> {
        let family: ElementFamily = elem.parse().map_err(to_py)?;
        let tri: Triangulation = triangulation.parse().map_err(to_py)?;
        let domain = match right_height {
            Some(r) => DomainSpec::trapezoid(width, height, r, nx, ny),
            None => DomainSpec::rectangle(width, height, nx, ny),
        }
        .with_triangulation(tri)
        .with_refinement(refine);
        Ok(Self {
            inner: generate_mesh(&domain, family).map_err(to_py)?,
        })
    }

    /// Mesh of a benchmark problem.
    #[staticmethod]
    #[pyo3(signature = (problem, elem, **options))]
    fn preset(problem: &str, elem: &str, options: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let cfg = config_from(problem, elem, options)?;
        let (inner, _) = bench::build(&cfg).map_err(to_py)?;
        Ok(Self { inner })
    }

    /// One level of red refinement (triangles only).
    fn refine(&self) -> PyResult<Self> {
        Ok(Self {
            inner: refine_uniform(&self.inner).map_err(to_py)?,
        })
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family.as_str()
    }

    #[getter]
    fn n_elements(&self) -> usize {
        self.inner.n_elements()
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.inner.n_nodes()
    }

    #[getter]
    fn n_dofs(&self) -> usize {
        self.inner.n_dofs()
    }

    fn nodes(&self) -> Vec<(f64, f64)> {
        self.inner.nodes.iter().map(|n| (n.x, n.y)).collect()
    }

    fn elements(&self) -> Vec<Vec<usize>> {
        self.inner.elements.iter().map(|e| e.nodes.clone()).collect()
    }

    fn centroids(&self) -> Vec<(f64, f64)> {
        self.inner.centroids().into_iter().map(|c| (c[0], c[1])).collect()
    }

    fn areas(&self) -> Vec<f64> {
        self.inner.element_areas()
    }

    fn passive(&self) -> Vec<bool> {
        self.inner.passive_mask()
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh({}, elements={}, nodes={})",
            self.inner.family,
            self.inner.n_elements(),
            self.inner.n_nodes()
        )
    }
}

#[pyclass(name = "Report", module = "topopt_py")]
struct PyReport {
    inner: RunReport,
}

#[pymethods]
impl PyReport {
    #[getter]
    fn compliance(&self) -> f64 {
        self.inner.compliance
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn n_elements(&self) -> usize {
        self.inner.n_elements
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family.as_str()
    }

    #[getter]
    fn density(&self) -> Vec<f64> {
        self.inner.density.x.clone()
    }

    /// `(iteration, compliance, rchange, volume)` per iteration.
    #[getter]
    fn history(&self) -> Vec<(usize, f64, f64, f64)> {
        self.inner
            .history
            .iter()
            .map(|r| (r.iteration, r.compliance, r.rchange, r.volume))
            .collect()
    }

    #[getter]
    fn error<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        self.inner.error.as_ref().map(|e| breakdown_dict(py, e)).transpose()
    }

    #[getter]
    fn files(&self) -> Vec<String> {
        self.inner.files.iter().map(|p| p.display().to_string()).collect()
    }

    /// The `report.csv` row.
    fn row<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyTuple>> {
        PyTuple::new(py, self.inner.row())
    }

    fn __repr__(&self) -> String {
        format!("Report({})", self.inner.summary())
    }
}

/// Runs a benchmark. Options use the CLI flag names, e.g.
/// `run("bridge", "p1", grid=32, refine=1, estimate_error=True)`.
#[pyfunction]
#[pyo3(signature = (problem, elem, **options))]
fn run(py: Python<'_>, problem: &str, elem: &str, options: Option<&Bound<'_, PyDict>>) -> PyResult<PyReport> {
    let cfg = config_from(problem, elem, options)?;
    let inner = py.detach(|| bench::run(&cfg)).map_err(to_py)?;
    Ok(PyReport { inner })
}

/// Error estimate of the solid benchmark design.
#[pyfunction]
#[pyo3(signature = (problem, elem, **options))]
fn estimate<'py>(
    py: Python<'py>,
    problem: &str,
    elem: &str,
    options: Option<&Bound<'_, PyDict>>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config_from(problem, elem, options)?;
    let result = py.detach(|| -> topopt::Result<ErrorBreakdown> {
        let (mesh, BenchmarkPreset { case, .. }) = bench::build(&cfg)?;
        bench::estimate_solid(&mesh, &case, &bench::material_of(&cfg)?, &cfg.simp_config())
    });
    breakdown_dict(py, &result.map_err(to_py)?)
}

/// Element stiffness matrix for nodal coordinates in connectivity order.
#[pyfunction]
#[pyo3(signature = (elem, coords, youngs = 1.0, poisson = 0.3, model = "lame"))]
fn element_stiffness(elem: &str, coords: Vec<(f64, f64)>, youngs: f64, poisson: f64, model: &str) -> PyResult<Vec<Vec<f64>>> {
    let family: ElementFamily = elem.parse().map_err(to_py)?;
    let model: MaterialModel = model.parse().map_err(to_py)?;
    let material = Material::new(youngs, poisson, model).map_err(to_py)?;
    let pts: Vec<[f64; 2]> = coords.into_iter().map(|(x, y)| [x, y]).collect();
    let geom = ElementGeometry::new(0, family, &pts).map_err(to_py)?;
    let k = stiffness(&geom, &material).map_err(to_py)?.matrix;
    Ok((0..k.nrows()).map(|i| k.row(i).iter().copied().collect()).collect())
}

#[pymodule]
fn topopt_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMesh>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(element_stiffness, m)?)?;
    Ok(())
}
