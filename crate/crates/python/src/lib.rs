//! Python bindings. Matrices cross the boundary as nested lists of complex
//! numbers (row-major, square); structured reports come back as plain dicts
//! with the same field names as the CLI JSON output.

use mdpave::budget::{DEFAULT_ENUMERATION_BUDGET, EnumerationBudget};
use mdpave::commutator::{commutator_norm_report, recursive_commutator};
use mdpave::constructions::{
    self, SimpleGraph, fourier_matrix as core_fourier, paley_conference_matrix,
    signed_mdp_identity_check, tightness_tuple as core_tightness, verify_singleton_necessity,
};
use mdpave::io;
use mdpave::linalg::{
    self, ComplexMatrix, HermitianMatrix, HermitianTuple as CoreTuple, operator_norm,
};
use mdpave::mdp as mdp_ops;
use mdpave::polynomial::{self, RealPolynomial};
use mdpave::selection;
use mdpave::verify::{VerifyOptions, run_suite};
use mdpave::{Complex64, MdpError};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList};
use serde_json::Value;

/// Validation failures become ValueError; exhausted budgets and violated
/// numerical certificates become RuntimeError.
fn to_py_err(e: MdpError) -> PyErr {
    match e {
        MdpError::BudgetExceeded { .. }
        | MdpError::BoundViolation { .. }
        | MdpError::MonotonicityViolation { .. }
        | MdpError::NoAdmissibleIndex { .. }
        | MdpError::RootNonConvergence { .. }
        | MdpError::NotRealRooted { .. }
        | MdpError::SpectralCollision { .. }
        | MdpError::DegreeZero
        | MdpError::DegreeMismatch(..) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn budget_from(limit: Option<u64>) -> EnumerationBudget {
    EnumerationBudget::new(limit.unwrap_or(DEFAULT_ENUMERATION_BUDGET))
}

fn matrix_from_py(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(rows).map_err(to_py_err)
}

fn matrix_to_py(a: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    let n = a.dim();
    (0..n).map(|i| (0..n).map(|j| a.get(i, j)).collect()).collect()
}

fn json_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any().unbind(),
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else if let Some(u) = num.as_u64() {
                u.into_pyobject(py)?.into_any().unbind()
            } else {
                num.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, val) in map {
                dict.set_item(key, json_to_py(py, val)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

/// A tuple of same-sized Hermitian matrices; the entry point for the
/// characteristic-polynomial, paving, and subset-selection operations.
#[pyclass(name = "HermitianTuple", frozen)]
struct PyHermitianTuple {
    inner: CoreTuple,
}

#[pymethods]
impl PyHermitianTuple {
    /// Build from `k` square matrices given as nested lists of complex
    /// numbers; each must be Hermitian to within 1e-12 entrywise.
    #[new]
    fn new(matrices: Vec<Vec<Vec<Complex64>>>) -> PyResult<Self> {
        let ms = matrices.into_iter().map(matrix_from_py).collect::<PyResult<Vec<_>>>()?;
        let inner = CoreTuple::from_matrices(ms).map_err(to_py_err)?;
        Ok(PyHermitianTuple { inner })
    }

    /// Number of members.
    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    /// Common matrix dimension.
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn zero_diagonal(&self) -> bool {
        self.inner.zero_diagonal()
    }

    #[getter]
    fn contraction(&self) -> bool {
        self.inner.contraction()
    }

    fn matrices(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.inner.matrices().iter().map(|m| matrix_to_py(m.matrix())).collect()
    }

    /// Coefficients (ascending) of the averaged characteristic polynomial
    /// over all kⁿ ways of splitting the index set among the members.
    #[pyo3(signature = (budget=None))]
    fn mdp(&self, budget: Option<u64>) -> PyResult<Vec<f64>> {
        let p = mdp_ops::mdp(&self.inner, budget_from(budget)).map_err(to_py_err)?;
        Ok(p.coeffs().to_vec())
    }

    /// Largest root of the averaged characteristic polynomial.
    #[pyo3(signature = (budget=None))]
    fn mdp_largest_root(&self, budget: Option<u64>) -> PyResult<f64> {
        let p = mdp_ops::mdp(&self.inner, budget_from(budget)).map_err(to_py_err)?;
        polynomial::largest_root(&p).map_err(to_py_err)
    }

    /// Greedy joint paving; dict mirrors the CLI paving report.
    #[pyo3(signature = (epsilon=None, r=None, budget=None))]
    fn multipave(
        &self,
        py: Python<'_>,
        epsilon: Option<f64>,
        r: Option<usize>,
        budget: Option<u64>,
    ) -> PyResult<Py<PyAny>> {
        if epsilon.is_none() && r.is_none() {
            return Err(PyValueError::new_err("need epsilon, r, or both"));
        }
        let report = selection::multipave(&self.inner, epsilon.unwrap_or(1.0), r, budget_from(budget))
            .map_err(to_py_err)?;
        json_to_py(py, &io::paving_report_to_json(&report))
    }

    /// Subset selection keeping ⌊n·eps²/(6k)⌋ indices with all compressions
    /// below eps; dict mirrors the CLI selection report.
    #[pyo3(signature = (epsilon, budget=None))]
    fn restrict(&self, py: Python<'_>, epsilon: f64, budget: Option<u64>) -> PyResult<Py<PyAny>> {
        let report = selection::joint_restricted_invertibility(&self.inner, epsilon, budget_from(budget))
            .map_err(to_py_err)?;
        json_to_py(py, &io::selection_report_to_json(&report))
    }
}

/// Average of det(Σᵢ Aᵢ(Sᵢ-block)) over nothing — the fully expanded mixed
/// determinant of the given square matrices (all of one size).
#[pyfunction]
#[pyo3(signature = (matrices, budget=None))]
fn mixed_determinant(matrices: Vec<Vec<Vec<Complex64>>>, budget: Option<u64>) -> PyResult<Complex64> {
    let ms = matrices.into_iter().map(matrix_from_py).collect::<PyResult<Vec<_>>>()?;
    mdp_ops::mixed_determinant(&ms, budget_from(budget)).map_err(to_py_err)
}

/// Decompose a zero-trace matrix as A = U(BC − CB)U*; returns b, c, u and
/// the certified norms.
#[pyfunction]
#[pyo3(signature = (matrix, base_threshold=6, budget=None))]
fn commutator(
    py: Python<'_>,
    matrix: Vec<Vec<Complex64>>,
    base_threshold: usize,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let a = matrix_from_py(matrix)?;
    let result = recursive_commutator(&a, base_threshold, budget_from(budget)).map_err(to_py_err)?;
    let (product, factor) = commutator_norm_report(&result, a.dim());
    let dict = PyDict::new(py);
    dict.set_item("b", matrix_to_py(&result.b))?;
    dict.set_item("c", matrix_to_py(&result.c))?;
    dict.set_item("u", matrix_to_py(&result.u))?;
    dict.set_item("residual", result.residual)?;
    dict.set_item("norm_b", result.norm_b)?;
    dict.set_item("norm_c", result.norm_c)?;
    dict.set_item("norm_product", product)?;
    dict.set_item("norm_product_envelope", factor * operator_norm(&a))?;
    Ok(dict.into_any().unbind())
}

/// Two-sided paving of a single zero-diagonal contraction matrix into r
/// blocks with ‖A(X)‖ < 12√2/√r each.
#[pyfunction]
#[pyo3(signature = (matrix, r, budget=None))]
fn two_sided_pave(
    py: Python<'_>,
    matrix: Vec<Vec<Complex64>>,
    r: usize,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let a = matrix_from_py(matrix)?;
    let report = selection::two_sided_pave(&a, r, budget_from(budget)).map_err(to_py_err)?;
    json_to_py(py, &io::paving_report_to_json(&report))
}

/// Unitary Fourier matrix of order m.
#[pyfunction]
fn fourier_matrix(m: usize) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(matrix_to_py(&core_fourier(m).map_err(to_py_err)?))
}

/// Symmetric conference matrix of order m (m = q+1, q prime ≡ 1 mod 4).
#[pyfunction]
fn conference_matrix(m: usize) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(matrix_to_py(&paley_conference_matrix(m).map_err(to_py_err)?))
}

/// Order-optimal paving instance at level epsilon: k+1 zero-diagonal unit
/// norm matrices on dimension k·⌊eps⁻²⌋ where any paving below epsilon must
/// use singleton blocks. Returns {"matrices", "k", "block_size", "dim",
/// "epsilon", "certificate"}.
#[pyfunction]
fn tightness_tuple(py: Python<'_>, k: usize, epsilon: f64) -> PyResult<Py<PyAny>> {
    let tt = core_tightness(k, epsilon).map_err(to_py_err)?;
    let cert = verify_singleton_necessity(tt.matrices(), epsilon).map_err(to_py_err)?;
    let dict = PyDict::new(py);
    dict.set_item("matrices", tt.matrices().iter().map(matrix_to_py).collect::<Vec<_>>())?;
    dict.set_item("k", tt.k())?;
    dict.set_item("block_size", tt.block_size())?;
    dict.set_item("dim", tt.dim())?;
    dict.set_item("epsilon", tt.epsilon())?;
    dict.set_item("certificate", json_to_py(py, &io::singleton_certificate_to_json(&cert))?)?;
    Ok(dict.into_any().unbind())
}

/// Certificate that every 2×2 compression of some member stays at or above
/// epsilon (forcing singleton blocks in any paving below epsilon).
#[pyfunction]
fn singleton_certificate(
    py: Python<'_>,
    matrices: Vec<Vec<Vec<Complex64>>>,
    epsilon: f64,
) -> PyResult<Py<PyAny>> {
    let ms = matrices.into_iter().map(matrix_from_py).collect::<PyResult<Vec<_>>>()?;
    let cert = verify_singleton_necessity(&ms, epsilon).map_err(to_py_err)?;
    json_to_py(py, &io::singleton_certificate_to_json(&cert))
}

/// Matching polynomial of the graph on n vertices with the given 1-based
/// edge list; coefficients ascending.
#[pyfunction]
fn matching_polynomial(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Vec<f64>> {
    let g = SimpleGraph::new(n, &edges).map_err(to_py_err)?;
    Ok(constructions::matching_polynomial(&g).coeffs().to_vec())
}

/// Check that averaging the signed two-member polynomials over all edge
/// signings reproduces the matching polynomial with rescaled argument.
#[pyfunction]
#[pyo3(signature = (n, edges, budget=None))]
fn signed_identity_check(
    py: Python<'_>,
    n: usize,
    edges: Vec<(usize, usize)>,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let g = SimpleGraph::new(n, &edges).map_err(to_py_err)?;
    let report = signed_mdp_identity_check(&g, budget_from(budget)).map_err(to_py_err)?;
    json_to_py(py, &io::signed_identity_report_to_json(&report))
}

/// Run a named verification suite ("all" for every suite); returns a list
/// of {"name", "passed", "checks", "max_deviation", "threshold", "detail"}.
#[pyfunction]
#[pyo3(signature = (suite="all", seed=1, budget=None))]
fn verify_suite(
    py: Python<'_>,
    suite: &str,
    seed: u64,
    budget: Option<u64>,
) -> PyResult<Py<PyAny>> {
    let opts = VerifyOptions { seed, budget: budget_from(budget) };
    let outcomes = run_suite(suite, &opts).map_err(to_py_err)?;
    let list = PyList::empty(py);
    for o in outcomes {
        let dict = PyDict::new(py);
        dict.set_item("name", o.name)?;
        dict.set_item("passed", o.passed)?;
        dict.set_item("checks", o.checks)?;
        dict.set_item("max_deviation", o.max_deviation)?;
        dict.set_item("threshold", o.threshold)?;
        dict.set_item("detail", o.detail)?;
        list.append(dict)?;
    }
    Ok(list.into_any().unbind())
}

/// Largest real root of the polynomial with the given ascending
/// coefficients (which must be real-rooted).
#[pyfunction]
fn largest_root(coeffs: Vec<f64>) -> PyResult<f64> {
    polynomial::largest_root(&RealPolynomial::new(coeffs)).map_err(to_py_err)
}

/// Ascending eigenvalues of a Hermitian matrix.
#[pyfunction]
fn hermitian_eigenvalues(matrix: Vec<Vec<Complex64>>) -> PyResult<Vec<f64>> {
    let a = matrix_from_py(matrix)?;
    let h = HermitianMatrix::new(a).map_err(to_py_err)?;
    Ok(linalg::hermitian_eigenvalues(&h))
}

/// Characteristic polynomial det(xI − A), coefficients ascending; requires
/// (numerically) real coefficients.
#[pyfunction]
fn char_poly(matrix: Vec<Vec<Complex64>>) -> PyResult<Vec<f64>> {
    let a = matrix_from_py(matrix)?;
    Ok(linalg::char_poly(&a).map_err(to_py_err)?.coeffs().to_vec())
}

/// Operator (spectral) norm of a square complex matrix.
#[pyfunction]
fn matrix_operator_norm(matrix: Vec<Vec<Complex64>>) -> PyResult<f64> {
    Ok(operator_norm(&matrix_from_py(matrix)?))
}

#[pymodule]
fn mdpave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHermitianTuple>()?;
    m.add_function(wrap_pyfunction!(mixed_determinant, m)?)?;
    m.add_function(wrap_pyfunction!(commutator, m)?)?;
    m.add_function(wrap_pyfunction!(two_sided_pave, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(conference_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(tightness_tuple, m)?)?;
    m.add_function(wrap_pyfunction!(singleton_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(matching_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(signed_identity_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    m.add_function(wrap_pyfunction!(largest_root, m)?)?;
    m.add_function(wrap_pyfunction!(hermitian_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(char_poly, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_operator_norm, m)?)?;
    m.add("DEFAULT_BUDGET", DEFAULT_ENUMERATION_BUDGET)?;
    Ok(())
}
