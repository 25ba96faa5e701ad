//! Python extension module exposing the main types and operations: the
//! polynomial/delta families and ladder actions, the test-function catalog,
//! pairings, bi-coherent functionals, displacement series and the
//! verification suites.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use wpb::bicoherent as bc;
use wpb::displacement as disp;
use wpb::grid;
use wpb::ladder;
use wpb::pairing;
use wpb::verify;
use wpb::{DeltaComb, GridSpec, Polynomial, QuadratureSpec, StateKind, TestFunction};

fn err(e: wpb::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_op(op: &str) -> PyResult<ladder::LadderOp> {
    match op {
        "a" => Ok(ladder::LadderOp::A),
        "b" => Ok(ladder::LadderOp::B),
        "a_dagger" => Ok(ladder::LadderOp::ADagger),
        "b_dagger" => Ok(ladder::LadderOp::BDagger),
        other => Err(PyValueError::new_err(format!(
            "unknown ladder operator '{other}' (expected a, b, a_dagger or b_dagger)"
        ))),
    }
}

fn parse_state(state: &str) -> PyResult<StateKind> {
    state.parse().map_err(err)
}

fn make_grid(window: (f64, f64, f64, f64), nodes: (usize, usize)) -> PyResult<GridSpec> {
    GridSpec::new(window.0, window.1, window.2, window.3, nodes.0, nodes.1).map_err(err)
}

/// Polynomial in x with complex coefficients.
#[pyclass(name = "Polynomial", skip_from_py_object)]
#[derive(Clone)]
struct PyPolynomial {
    inner: Polynomial<Complex64>,
}

#[pymethods]
impl PyPolynomial {
    #[new]
    fn new(coeffs: Vec<Complex64>) -> Self {
        Self {
            inner: Polynomial::from_coeffs(coeffs),
        }
    }

    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    fn degree(&self) -> Option<usize> {
        self.inner.degree()
    }

    fn eval(&self, x: Complex64) -> Complex64 {
        self.inner.eval(&x)
    }

    fn apply(&self, op: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_op(op)?.apply_to_poly(&self.inner),
        })
    }

    fn taylor_shift(&self, c: Complex64) -> Self {
        Self {
            inner: self.inner.taylor_shift(&c),
        }
    }

    fn __repr__(&self) -> String {
        format!("Polynomial(degree={:?})", self.inner.degree())
    }
}

/// Finite combination of delta derivatives, sparse by derivative order.
#[pyclass(name = "DeltaComb", skip_from_py_object)]
#[derive(Clone)]
struct PyDeltaComb {
    inner: DeltaComb<Complex64>,
}

#[pymethods]
impl PyDeltaComb {
    #[new]
    fn new(terms: Vec<(u32, Complex64)>) -> Self {
        Self {
            inner: DeltaComb::from_terms(terms),
        }
    }

    fn terms(&self) -> Vec<(u32, Complex64)> {
        self.inner.terms().map(|(m, c)| (m, *c)).collect()
    }

    fn coeff(&self, order: u32) -> Complex64 {
        self.inner.coeff(order)
    }

    fn apply(&self, op: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_op(op)?.apply_to_delta(&self.inner),
        })
    }

    fn __repr__(&self) -> String {
        format!("DeltaComb(terms={})", self.inner.terms().count())
    }
}

/// Catalog entry with its oracles (evaluation, derivatives at zero,
/// analytic continuation, exponential moments) and membership flags.
#[pyclass(name = "TestFunction", skip_from_py_object)]
#[derive(Clone)]
struct PyTestFunction {
    inner: TestFunction,
}

#[pymethods]
impl PyTestFunction {
    #[staticmethod]
    fn gaussian(sigma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: TestFunction::gaussian(sigma).map_err(err)?,
        })
    }

    #[staticmethod]
    fn hermite(n: u32) -> PyResult<Self> {
        Ok(Self {
            inner: TestFunction::hermite(n).map_err(err)?,
        })
    }

    #[staticmethod]
    fn non_analytic() -> Self {
        Self {
            inner: TestFunction::non_analytic(),
        }
    }

    #[staticmethod]
    fn monomial(n: u32) -> PyResult<Self> {
        Ok(Self {
            inner: TestFunction::monomial(n).map_err(err)?,
        })
    }

    fn scaled(&self, c: Complex64) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.scaled(c).map_err(err)?,
        })
    }

    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    fn eval(&self, x: f64) -> Complex64 {
        self.inner.eval_real(x)
    }

    fn deriv(&self, x: f64) -> Complex64 {
        self.inner.deriv_real(x)
    }

    fn deriv_at_zero(&self, order: u32) -> PyResult<Complex64> {
        self.inner.deriv_at_zero(order).map_err(err)
    }

    fn eval_complex(&self, w: Complex64) -> PyResult<Complex64> {
        self.inner.eval_complex(w).map_err(err)
    }

    fn mgf(&self, w: Complex64) -> PyResult<Complex64> {
        self.inner.mgf(w).map_err(err)
    }

    #[getter]
    fn in_schwartz(&self) -> bool {
        self.inner.in_schwartz()
    }

    #[getter]
    fn in_analytic_schwartz(&self) -> bool {
        self.inner.in_analytic_schwartz()
    }

    #[getter]
    fn in_exp_stable(&self) -> bool {
        self.inner.in_exp_stable()
    }

    fn __repr__(&self) -> String {
        format!("TestFunction({})", self.inner.name())
    }
}

#[pyfunction]
fn phi_n(n: u32) -> PyResult<PyPolynomial> {
    Ok(PyPolynomial {
        inner: ladder::phi_n(n).map_err(err)?,
    })
}

#[pyfunction]
fn psi_n(n: u32) -> PyResult<PyDeltaComb> {
    Ok(PyDeltaComb {
        inner: ladder::psi_n(n).map_err(err)?,
    })
}

#[pyfunction]
fn pair_phi_psi(n: u32, m: u32) -> PyResult<Complex64> {
    Ok(pairing::pair_phi_psi::<Complex64>(n, m).map_err(err)?.value)
}

#[pyfunction]
fn conv_poly_delta(n: u32, m: u32, x: f64) -> PyResult<Complex64> {
    pairing::conv_poly_delta(n, m, &Complex64::new(x, 0.0)).map_err(err)
}

#[pyfunction]
fn pair_fn_poly(f: &PyTestFunction, p: &PyPolynomial) -> PyResult<Complex64> {
    Ok(pairing::pair_fn_poly(&f.inner, &p.inner, &QuadratureSpec::default())
        .map_err(err)?
        .value)
}

#[pyfunction]
fn pair_fn_delta(f: &PyTestFunction, d: &PyDeltaComb) -> PyResult<Complex64> {
    Ok(pairing::pair_fn_delta(&f.inner, &d.inner).map_err(err)?.value)
}

#[pyfunction]
#[pyo3(signature = (f, g, n_max, mirrored = false))]
fn quasi_basis_partial_sum(
    f: &PyTestFunction,
    g: &PyTestFunction,
    n_max: u32,
    mirrored: bool,
) -> PyResult<Complex64> {
    let ordering = if mirrored {
        pairing::QuasiBasisOrdering::PhiThenPsi
    } else {
        pairing::QuasiBasisOrdering::PsiThenPhi
    };
    Ok(
        pairing::quasi_basis_partial_sum(&f.inner, &g.inner, n_max, ordering, &QuadratureSpec::default())
            .map_err(err)?
            .value,
    )
}

#[pyfunction]
fn f_phi(f: &PyTestFunction, z: Complex64) -> PyResult<Complex64> {
    Ok(bc::f_phi(&f.inner, z, &QuadratureSpec::default())
        .map_err(err)?
        .value)
}

#[pyfunction]
fn f_phi_series(f: &PyTestFunction, z: Complex64, n_terms: u32) -> PyResult<Complex64> {
    Ok(bc::f_phi_series(&f.inner, z, n_terms, &QuadratureSpec::default())
        .map_err(err)?
        .value)
}

#[pyfunction]
fn f_psi(g: &PyTestFunction, z: Complex64) -> PyResult<Complex64> {
    Ok(bc::f_psi(&g.inner, z).map_err(err)?.value)
}

#[pyfunction]
fn f_psi_series(g: &PyTestFunction, z: Complex64, n_terms: u32) -> PyResult<Complex64> {
    Ok(bc::f_psi_series(&g.inner, z, n_terms).map_err(err)?.value)
}

#[pyfunction]
fn f_ordinary_cs(f: &PyTestFunction, z: Complex64) -> PyResult<Complex64> {
    Ok(bc::f_ordinary_cs(&f.inner, z, &QuadratureSpec::default())
        .map_err(err)?
        .value)
}

#[pyfunction]
fn weak_eigen_phi_residual(f: &PyTestFunction, z: Complex64) -> PyResult<f64> {
    bc::weak_eigen_phi_residual(&f.inner, z, &QuadratureSpec::default()).map_err(err)
}

#[pyfunction]
fn weak_eigen_psi_residual(g: &PyTestFunction, z: Complex64) -> PyResult<f64> {
    bc::weak_eigen_psi_residual(&g.inner, z).map_err(err)
}

/// Returns (phi_psi_ordering, psi_phi_ordering, reference_overlap).
#[pyfunction]
fn resolution_identity(
    f: &PyTestFunction,
    g: &PyTestFunction,
) -> PyResult<(Complex64, Complex64, Complex64)> {
    let r = bc::check_resolution_identity(&f.inner, &g.inner, &QuadratureSpec::default())
        .map_err(err)?;
    Ok((r.phi_psi_ordering, r.psi_phi_ordering, r.reference))
}

#[pyfunction]
#[pyo3(signature = (g, x, wide_angle = false))]
fn complex_delta_transform(g: &PyTestFunction, x: f64, wide_angle: bool) -> PyResult<Complex64> {
    let quad = if wide_angle {
        QuadratureSpec::wide_angle()
    } else {
        QuadratureSpec::default()
    };
    bc::complex_delta_transform(&g.inner, x, &quad).map_err(err)
}

#[pyfunction]
fn h_closed(n: u32, z: Complex64) -> PyResult<PyPolynomial> {
    Ok(PyPolynomial {
        inner: disp::h_closed(n, &z).map_err(err)?.poly,
    })
}

#[pyfunction]
fn h_recursive(n: u32, z: Complex64) -> PyPolynomial {
    PyPolynomial {
        inner: disp::h_recursive(n, &z).poly,
    }
}

#[pyfunction]
#[pyo3(signature = (z, x, n_terms = 80))]
fn v_on_vacuum(z: Complex64, x: f64, n_terms: u32) -> PyResult<Complex64> {
    disp::v_on_vacuum(z, x, n_terms).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (l, z, x, n_terms = 80))]
fn v_on_monomial(l: u32, z: Complex64, x: f64, n_terms: u32) -> PyResult<Complex64> {
    disp::v_on_monomial(l, z, x, n_terms).map_err(err)
}

#[pyfunction]
fn w_closed(f: &PyTestFunction, n: u32, z: Complex64) -> PyResult<Complex64> {
    Ok(disp::w_closed(&f.inner, n, z).map_err(err)?.value)
}

#[pyfunction]
fn w_recursive(f: &PyTestFunction, n: u32, z: Complex64) -> PyResult<Complex64> {
    Ok(disp::w_recursive(&f.inner, n, z).map_err(err)?.value)
}

#[pyfunction]
#[pyo3(signature = (f, z, n_terms = 60))]
fn w_weak_action(f: &PyTestFunction, z: Complex64, n_terms: u32) -> PyResult<Complex64> {
    disp::w_weak_action(&f.inner, z, n_terms).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (z, x, n_terms = 80))]
fn bch_check_v(z: Complex64, x: f64, n_terms: u32) -> PyResult<(Complex64, Complex64, Complex64)> {
    disp::bch_check_v(z, x, n_terms).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (f, z, n_terms = 80))]
fn bch_check_w(
    f: &PyTestFunction,
    z: Complex64,
    n_terms: u32,
) -> PyResult<(Complex64, Complex64, Complex64)> {
    disp::bch_check_w(&f.inner, z, n_terms).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (state, f, window = (-3.0, 3.0, -3.0, 3.0), nodes = (121, 121)))]
fn grid_eval(
    py: Python<'_>,
    state: &str,
    f: &PyTestFunction,
    window: (f64, f64, f64, f64),
    nodes: (usize, usize),
) -> PyResult<Py<PyList>> {
    let values = grid::grid_eval(
        parse_state(state)?,
        &f.inner,
        &make_grid(window, nodes)?,
        &QuadratureSpec::default(),
    )
    .map_err(err)?;
    let rows = PyList::empty(py);
    for row in values {
        rows.append(PyList::new(py, row)?)?;
    }
    Ok(rows.into())
}

#[pyfunction]
#[pyo3(signature = (state, f, window = (-3.0, 3.0, -3.0, 3.0), nodes = (121, 121)))]
fn grid_csv(
    state: &str,
    f: &PyTestFunction,
    window: (f64, f64, f64, f64),
    nodes: (usize, usize),
) -> PyResult<String> {
    grid::grid_csv(
        parse_state(state)?,
        &f.inner,
        &make_grid(window, nodes)?,
        &QuadratureSpec::default(),
    )
    .map_err(err)
}

/// Run a named verification suite; returns a dict with the per-check rows.
#[pyfunction]
fn run_suite(py: Python<'_>, suite: &str) -> PyResult<Py<PyDict>> {
    let suite: verify::Suite = suite.parse().map_err(err)?;
    let report = verify::run_suite(suite, &verify::Tolerances::default());
    let out = PyDict::new(py);
    out.set_item("suite", &report.suite)?;
    out.set_item("overall", report.overall)?;
    let checks = PyList::empty(py);
    for c in &report.checks {
        let row = PyDict::new(py);
        row.set_item("name", &c.name)?;
        row.set_item("measured_error", c.measured_error)?;
        row.set_item("tolerance", c.tolerance)?;
        row.set_item("passed", c.passed)?;
        row.set_item("runtime_s", c.runtime_s)?;
        if let Some(detail) = &c.detail {
            row.set_item("detail", detail)?;
        }
        checks.append(row)?;
    }
    out.set_item("checks", checks)?;
    Ok(out.into())
}

#[pymodule]
fn wpb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolynomial>()?;
    m.add_class::<PyDeltaComb>()?;
    m.add_class::<PyTestFunction>()?;
    m.add_function(wrap_pyfunction!(phi_n, m)?)?;
    m.add_function(wrap_pyfunction!(psi_n, m)?)?;
    m.add_function(wrap_pyfunction!(pair_phi_psi, m)?)?;
    m.add_function(wrap_pyfunction!(conv_poly_delta, m)?)?;
    m.add_function(wrap_pyfunction!(pair_fn_poly, m)?)?;
    m.add_function(wrap_pyfunction!(pair_fn_delta, m)?)?;
    m.add_function(wrap_pyfunction!(quasi_basis_partial_sum, m)?)?;
    m.add_function(wrap_pyfunction!(f_phi, m)?)?;
    m.add_function(wrap_pyfunction!(f_phi_series, m)?)?;
    m.add_function(wrap_pyfunction!(f_psi, m)?)?;
    m.add_function(wrap_pyfunction!(f_psi_series, m)?)?;
    m.add_function(wrap_pyfunction!(f_ordinary_cs, m)?)?;
    m.add_function(wrap_pyfunction!(weak_eigen_phi_residual, m)?)?;
    m.add_function(wrap_pyfunction!(weak_eigen_psi_residual, m)?)?;
    m.add_function(wrap_pyfunction!(resolution_identity, m)?)?;
    m.add_function(wrap_pyfunction!(complex_delta_transform, m)?)?;
    m.add_function(wrap_pyfunction!(h_closed, m)?)?;
    m.add_function(wrap_pyfunction!(h_recursive, m)?)?;
    m.add_function(wrap_pyfunction!(v_on_vacuum, m)?)?;
    m.add_function(wrap_pyfunction!(v_on_monomial, m)?)?;
    m.add_function(wrap_pyfunction!(w_closed, m)?)?;
    m.add_function(wrap_pyfunction!(w_recursive, m)?)?;
    m.add_function(wrap_pyfunction!(w_weak_action, m)?)?;
    m.add_function(wrap_pyfunction!(bch_check_v, m)?)?;
    m.add_function(wrap_pyfunction!(bch_check_w, m)?)?;
    m.add_function(wrap_pyfunction!(grid_eval, m)?)?;
    m.add_function(wrap_pyfunction!(grid_csv, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add("SIGMA_BAND_UPPER", bc::SIGMA_BAND_UPPER)?;
    m.add("SIGMA_BAND_LOWER", bc::SIGMA_BAND_LOWER)?;
    Ok(())
}
