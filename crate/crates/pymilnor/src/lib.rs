//! Python bindings: each pipeline returns its full JSON certificate
//! envelope as a dict (schema_version, command, parameters, payload,
//! determinism_hash), exactly as the CLI writes it.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use serde_json::{json, Map, Value};

use milnor_forge::cli::{cap_from_env, run, Outcome, RunConfig};
use milnor_forge::error::Error;
use milnor_forge::poly::{y_vars, FpPolynomial};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Parameter(_) | Error::Config(_) | Error::Input(_) | Error::Parse(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any()
            } else {
                return Err(PyRuntimeError::new_err("non-integer scalar in a certificate"));
            }
        }
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_any()
        }
    })
}

fn dispatch<'py>(py: Python<'py>, command: &str, parameters: Value) -> PyResult<Bound<'py, PyDict>> {
    let config = RunConfig {
        command: command.to_string(),
        parameters,
        output: None,
        cap: cap_from_env(),
    };
    let (envelope, outcome) = run(&config).map_err(to_py_err)?;
    let value = serde_json::to_value(&envelope)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let dict = json_to_py(py, &value)?;
    let dict = dict.cast_into::<PyDict>()?;
    dict.set_item("certified", matches!(outcome, Outcome::Certified))?;
    Ok(dict)
}

/// Dickson invariants, with optional invariance and Koszul checks.
#[pyfunction]
#[pyo3(signature = (p, n, verify = false, koszul_bound = None))]
fn dickson<'py>(
    py: Python<'py>,
    p: u32,
    n: usize,
    verify: bool,
    koszul_bound: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let mut m = Map::new();
    m.insert("p".into(), json!(p));
    m.insert("n".into(), json!(n));
    m.insert("verify".into(), json!(verify));
    if let Some(b) = koszul_bound {
        m.insert("koszul_bound".into(), json!(b));
    }
    dispatch(py, "dickson", Value::Object(m))
}

/// The Steinberg idempotent e_k with its idempotency report.
#[pyfunction]
fn steinberg<'py>(py: Python<'py>, p: u32, n: usize, k: u32) -> PyResult<Bound<'py, PyDict>> {
    dispatch(py, "steinberg", json!({"p": p, "n": n, "k": k}))
}

/// Basis dump of the coinvariant module (or its p = 2 Frobenius variant);
/// with k, the Steinberg summand is dumped instead.
#[pyfunction]
#[pyo3(signature = (p, n, k = None, frobenius = false))]
fn module<'py>(
    py: Python<'py>,
    p: u32,
    n: usize,
    k: Option<u32>,
    frobenius: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let mut m = Map::new();
    m.insert("p".into(), json!(p));
    m.insert("n".into(), json!(n));
    m.insert("frobenius".into(), json!(frobenius));
    if let Some(k) = k {
        m.insert("k".into(), json!(k));
    }
    dispatch(py, "module", Value::Object(m))
}

/// Freeness certificate of the e_k-summand over the exterior algebra on the
/// listed Milnor operators.
#[pyfunction]
fn certify<'py>(
    py: Python<'py>,
    p: u32,
    n: usize,
    k: u32,
    ops: Vec<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    dispatch(py, "certify", json!({"p": p, "n": n, "k": k, "ops": ops}))
}

/// Full level certificate (freeness, generator, beta, triviality, survival).
#[pyfunction]
fn level<'py>(
    py: Python<'py>,
    p: u32,
    n: usize,
    k: u32,
    r_max: usize,
) -> PyResult<Bound<'py, PyDict>> {
    dispatch(py, "level", json!({"p": p, "n": n, "k": k, "r_max": r_max}))
}

/// Annihilator elimination over a truncated Lazard ring; the ring and
/// presentation are JSON strings in the CLI's file format.
#[pyfunction]
#[pyo3(signature = (ring_json, presentation_json, verify_bound = None))]
fn annihilate<'py>(
    py: Python<'py>,
    ring_json: &str,
    presentation_json: &str,
    verify_bound: Option<u64>,
) -> PyResult<Bound<'py, PyDict>> {
    let ring: Value =
        serde_json::from_str(ring_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let pres: Value = serde_json::from_str(presentation_json)
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    let mut m = Map::new();
    m.insert("ring".into(), ring);
    m.insert("presentation".into(), pres);
    if let Some(b) = verify_bound {
        m.insert("verify_bound".into(), json!(b));
    }
    dispatch(py, "annihilate", Value::Object(m))
}

/// Product of two polynomials over F_p in y1..yn, in the text format.
#[pyfunction]
fn poly_multiply(a: &str, b: &str, p: u32, n_vars: usize) -> PyResult<String> {
    let pa = FpPolynomial::parse(a, p, y_vars(n_vars)).map_err(to_py_err)?;
    let pb = FpPolynomial::parse(b, p, y_vars(n_vars)).map_err(to_py_err)?;
    Ok(pa.mul(&pb).map_err(to_py_err)?.to_string())
}

#[pymodule]
fn milnor_forge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(dickson, m)?)?;
    m.add_function(wrap_pyfunction!(steinberg, m)?)?;
    m.add_function(wrap_pyfunction!(module, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(level, m)?)?;
    m.add_function(wrap_pyfunction!(annihilate, m)?)?;
    m.add_function(wrap_pyfunction!(poly_multiply, m)?)?;
    Ok(())
}
