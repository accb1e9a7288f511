//! Python bindings: exact rationals, Farey approximation, discrepancy,
//! level-of-distribution sums, and the Gowers recursion graph.

use num_bigint::BigInt;
use pyo3::basic::CompareOp;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use tmlod_core::gowers::{self, GowersGraph, OffsetFamily};
use tmlod_core::lod::{self, AStrategy};
use tmlod_core::{digits, farey, metrics, DyadicRational, Error};

create_exception!(tmlod, BudgetExceeded, PyException, "Projected cost exceeds the budget.");

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(m) => PyValueError::new_err(m),
        Error::Internal(m) => PyRuntimeError::new_err(format!("internal invariant violated: {m}")),
        b @ Error::BudgetExceeded { .. } => BudgetExceeded::new_err(b.to_string()),
    }
}

/// Exact rational number in lowest terms.
#[pyclass(name = "Rational", frozen, skip_from_py_object, module = "tmlod")]
#[derive(Clone)]
struct PyRational(tmlod_core::Rational);

/// Accepts a `Rational`, an `int`, or text such as `"355/113"` or `"0.25"`.
fn rational_arg(obj: &Bound<'_, PyAny>) -> PyResult<tmlod_core::Rational> {
    if let Ok(r) = obj.cast::<PyRational>() {
        return Ok(r.get().0.clone());
    }
    if let Ok(n) = obj.extract::<BigInt>() {
        return Ok(tmlod_core::Rational::from(n));
    }
    if let Ok(s) = obj.extract::<String>() {
        return s.parse().map_err(py_err);
    }
    Err(PyValueError::new_err("expected Rational, int or str"))
}

#[pymethods]
impl PyRational {
    #[new]
    #[pyo3(signature = (value, denominator = None))]
    fn new(value: &Bound<'_, PyAny>, denominator: Option<BigInt>) -> PyResult<Self> {
        match denominator {
            Some(d) => {
                let n: BigInt = value.extract()?;
                tmlod_core::Rational::new(n, d).map(PyRational).map_err(py_err)
            }
            None => rational_arg(value).map(PyRational),
        }
    }

    #[getter]
    fn numerator(&self) -> BigInt {
        self.0.numer().clone()
    }

    #[getter]
    fn denominator(&self) -> BigInt {
        self.0.denom().clone()
    }

    fn floor(&self) -> BigInt {
        self.0.floor()
    }

    fn fract(&self) -> Self {
        PyRational(self.0.fract())
    }

    /// Distance to the nearest integer.
    fn dist_to_integer(&self) -> Self {
        PyRational(self.0.dist_to_integer())
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Rational('{}')", self.0)
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.0.hash(&mut h);
        h.finish()
    }

    fn __richcmp__(&self, other: &Bound<'_, PyAny>, op: CompareOp) -> PyResult<bool> {
        let o = rational_arg(other)?;
        Ok(op.matches(self.0.cmp(&o)))
    }

    fn __neg__(&self) -> Self {
        PyRational(-self.0.clone())
    }

    fn __add__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyRational(self.0.clone() + rational_arg(other)?))
    }

    fn __radd__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.__add__(other)
    }

    fn __sub__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyRational(self.0.clone() - rational_arg(other)?))
    }

    fn __rsub__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyRational(rational_arg(other)? - self.0.clone()))
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyRational(self.0.clone() * rational_arg(other)?))
    }

    fn __rmul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        self.__mul__(other)
    }

    fn __truediv__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        let o = rational_arg(other)?.recip().map_err(py_err)?;
        Ok(PyRational(self.0.clone() * o))
    }
}

/// `numerator / 2^exponent`, printed as `num/2^k`.
#[pyclass(name = "DyadicRational", frozen, skip_from_py_object, module = "tmlod")]
#[derive(Clone)]
struct PyDyadic(DyadicRational);

#[pymethods]
impl PyDyadic {
    #[new]
    fn new(numerator: BigInt, exponent: u32) -> Self {
        PyDyadic(DyadicRational::new(numerator, exponent))
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(PyDyadic).map_err(py_err)
    }

    #[getter]
    fn numerator(&self) -> BigInt {
        self.0.numerator().clone()
    }

    #[getter]
    fn exponent(&self) -> u32 {
        self.0.exponent()
    }

    fn to_rational(&self) -> PyRational {
        PyRational(self.0.to_rational())
    }

    fn __float__(&self) -> f64 {
        self.0.to_f64()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("DyadicRational('{}')", self.0)
    }

    fn __richcmp__(&self, other: &Self, op: CompareOp) -> bool {
        op.matches(self.0.cmp(&other.0))
    }
}

/// Integer vector `a in Z^m` indexing the uniformity sums `A_rho(a)`.
#[pyclass(name = "OffsetFamily", frozen, skip_from_py_object, module = "tmlod")]
#[derive(Clone)]
struct PyOffsetFamily(OffsetFamily);

#[pymethods]
impl PyOffsetFamily {
    #[new]
    fn new(entries: Vec<i64>) -> PyResult<Self> {
        let m = u32::try_from(entries.len()).map_err(|_| PyValueError::new_err("too many entries"))?;
        OffsetFamily::new(m, entries).map(PyOffsetFamily).map_err(py_err)
    }

    #[staticmethod]
    fn zero(m: u32) -> PyResult<Self> {
        OffsetFamily::zero(m).map(PyOffsetFamily).map_err(py_err)
    }

    #[getter]
    fn entries(&self) -> Vec<i64> {
        self.0.entries().to_vec()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("OffsetFamily({:?})", self.0.entries())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

/// The weighted graph on offset families reachable from zero.
#[pyclass(name = "GowersGraph", frozen, skip_from_py_object, module = "tmlod")]
struct PyGowersGraph(GowersGraph);

#[pymethods]
impl PyGowersGraph {
    #[new]
    fn new(py: Python<'_>, m: u32) -> PyResult<Self> {
        py.detach(|| gowers::build_graph(m)).map(PyGowersGraph).map_err(py_err)
    }

    #[getter]
    fn m(&self) -> u32 {
        self.0.m()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn vertices(&self) -> Vec<PyOffsetFamily> {
        self.0.vertices().iter().cloned().map(PyOffsetFamily).collect()
    }

    fn index_of(&self, a: &PyOffsetFamily) -> Option<usize> {
        self.0.index_of(&a.0)
    }

    fn weight(&self, i: usize, j: usize) -> PyResult<PyDyadic> {
        if i >= self.0.len() || j >= self.0.len() {
            return Err(PyValueError::new_err("vertex index out of range"));
        }
        Ok(PyDyadic(self.0.weight(i, j)))
    }

    fn export_adjacency(&self) -> String {
        self.0.export_adjacency()
    }

    /// `A_rho(a)` through the recursion.
    fn recursion_value(&self, rho: u32, a: &PyOffsetFamily) -> PyResult<PyDyadic> {
        gowers::recursion_value(rho, &a.0, &self.0).map(PyDyadic).map_err(py_err)
    }

    /// Returns `(k_star, c_star, row_sums)`; `k_star` is `None` when no
    /// path length up to `k_max` contracts.
    #[pyo3(signature = (k_max = gowers::DEFAULT_K_MAX))]
    fn contraction(&self, py: Python<'_>, k_max: u32) -> PyResult<(Option<u32>, PyDyadic, Vec<PyDyadic>)> {
        let c = py.detach(|| gowers::contraction_check(&self.0, k_max)).map_err(py_err)?;
        Ok((c.k_star, PyDyadic(c.c_star), c.row_sums.into_iter().map(PyDyadic).collect()))
    }
}

/// `A_rho(a)` by direct summation.
#[pyfunction]
#[pyo3(signature = (rho, a, budget = 1e10))]
fn gowers_bruteforce(py: Python<'_>, rho: u32, a: &PyOffsetFamily, budget: f64) -> PyResult<PyDyadic> {
    let m = a.0.m();
    py.detach(|| gowers::gowers_bruteforce(m, rho, &a.0, budget)).map(PyDyadic).map_err(py_err)
}

/// `log2(1/c) / k`, the guaranteed decay exponent.
#[pyfunction]
fn decay_rate(k_star: u32, c_star: &PyDyadic) -> PyResult<f64> {
    gowers::decay_rate(k_star, &c_star.0).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n, base = 2))]
fn sum_of_digits(n: u64, base: u64) -> PyResult<u64> {
    digits::sum_of_digits(n, base).map_err(py_err)
}

/// Thue–Morse bits `t(n)` for `start <= n < end`.
#[pyfunction]
fn tm_bits(start: u64, end: u64) -> PyResult<Vec<u32>> {
    if end < start {
        return Err(PyValueError::new_err("end < start"));
    }
    Ok(digits::tm_bits(start, end).into_iter().map(u32::from).collect())
}

/// Best approximation `p/q` with `q <= order` from the Farey dissection.
#[pyfunction]
fn farey_approx(alpha: &Bound<'_, PyAny>, order: u64) -> PyResult<PyRational> {
    let a = rational_arg(alpha)?;
    farey::farey_approx(&a, order).map(|f| PyRational(f.as_rational())).map_err(py_err)
}

/// Consecutive Farey fractions of the given order around `alpha`.
#[pyfunction]
fn farey_bracket(alpha: &Bound<'_, PyAny>, order: u64) -> PyResult<(PyRational, PyRational)> {
    let a = rational_arg(alpha)?;
    let (l, r) = farey::farey_bracket(&a, order).map_err(py_err)?;
    Ok((PyRational(l), PyRational(r)))
}

/// Extreme discrepancy of `{n alpha}`, `0 <= n < count`, exactly.
#[pyfunction]
fn discrepancy(py: Python<'_>, alpha: &Bound<'_, PyAny>, count: u64) -> PyResult<PyRational> {
    let a = rational_arg(alpha)?;
    py.detach(|| metrics::discrepancy(&a, count)).map(PyRational).map_err(py_err)
}

/// Exact count of `alpha n + beta` floors in `[y, z)`.
#[pyfunction]
fn beatty_count(y: u64, z: u64, alpha: &Bound<'_, PyAny>, beta: &Bound<'_, PyAny>) -> PyResult<u64> {
    lod::beatty_count(y, z, &rational_arg(alpha)?, &rational_arg(beta)?).map_err(py_err)
}

/// `(max deviation, residue a, y, z)` for the progression `a mod d` below `x`.
#[pyfunction]
fn ap_extremes(d: u64, a: u64, x: u64) -> PyResult<(PyRational, u64, u64)> {
    let s = lod::ap_signed_prefix_extremes(d, a, x).map_err(py_err)?;
    Ok((PyRational(s.max_dev), s.arg_y, s.arg_z))
}

/// Level-of-distribution error total up to the modulus `floor(x^theta)`;
/// returns `(total, d_max)`.
#[pyfunction]
#[pyo3(signature = (x, theta, budget = lod::LOD_DEFAULT_BUDGET))]
fn lod_error_total(py: Python<'_>, x: u64, theta: f64, budget: f64) -> PyResult<(PyRational, u64)> {
    let s = py.detach(|| lod::lod_error_total(x, theta, budget)).map_err(py_err)?;
    Ok((PyRational(s.total), s.d_max))
}

/// Exact `S_0` at frequency zero over moduli `d_lo <= d < d_hi`.
#[pyfunction]
#[pyo3(signature = (n, d_lo, d_hi, budget = lod::S0_DEFAULT_BUDGET))]
fn s0(py: Python<'_>, n: u64, d_lo: u64, d_hi: u64, budget: f64) -> PyResult<i64> {
    let r = py
        .detach(|| lod::s0_discrete(n, d_lo, d_hi, 0.0, AStrategy::Structured, budget))
        .map_err(py_err)?;
    r.exact.ok_or_else(|| PyRuntimeError::new_err("no exact value at frequency zero"))
}

/// Piatetski-Shapiro zero frequency: `(zeros, deviation, exclusions)` for
/// `t(floor(k^c))`, `k < n`.
#[pyfunction]
fn ps_frequency(py: Python<'_>, c: &Bound<'_, PyAny>, n: u64) -> PyResult<(u64, PyRational, u64)> {
    let c = rational_arg(c)?;
    let r = py.detach(|| lod::ps_frequency(&c, n)).map_err(py_err)?;
    Ok((r.zeros, PyRational(r.deviation), r.exclusions))
}

#[pymodule]
fn tmlod(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add_class::<PyRational>()?;
    m.add_class::<PyDyadic>()?;
    m.add_class::<PyOffsetFamily>()?;
    m.add_class::<PyGowersGraph>()?;
    m.add_function(wrap_pyfunction!(sum_of_digits, m)?)?;
    m.add_function(wrap_pyfunction!(tm_bits, m)?)?;
    m.add_function(wrap_pyfunction!(farey_approx, m)?)?;
    m.add_function(wrap_pyfunction!(farey_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(discrepancy, m)?)?;
    m.add_function(wrap_pyfunction!(beatty_count, m)?)?;
    m.add_function(wrap_pyfunction!(ap_extremes, m)?)?;
    m.add_function(wrap_pyfunction!(lod_error_total, m)?)?;
    m.add_function(wrap_pyfunction!(s0, m)?)?;
    m.add_function(wrap_pyfunction!(ps_frequency, m)?)?;
    m.add_function(wrap_pyfunction!(gowers_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(decay_rate, m)?)?;
    Ok(())
}
