//! Python bindings. Inputs are the same documents the CLI reads (a dict or a
//! JSON string); outputs are the CLI reports, decoded into Python objects.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde::de::DeserializeOwned;
use serde::Serialize;

use subgap::error::GapError;
use subgap::family::{walk_family, TraceKind};
use subgap::gap::{gap_report, GapOptions};
use subgap::generate::{generate as gen_instance, Kind};
use subgap::io::{load_form, to_json, FormFile, OperatorFile, PathFile, SpaceFile, Workspace};
use subgap::morse::{c_gap as c_gap_impl, verify_morse_stability, MorseProblem, MorseVariant};
use subgap::reldim::{relative_dim as reldim_impl, synthesize_perturbation, PerturbationOperator};
use subgap::splitting::split as split_impl;
use subgap::tetrad::{verify_tetrad_stability, Variant};

create_exception!(pysubgap, GateError, pyo3::exceptions::PyException, "A hypothesis gate failed.");

fn err(e: GapError) -> PyErr {
    match e {
        GapError::Gate(m) => GateError::new_err(m),
        GapError::Solver(_) | GapError::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A document from a dict or a JSON string.
fn doc<T: DeserializeOwned>(py: Python<'_>, obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = if obj.is_instance_of::<PyString>() {
        obj.extract()?
    } else {
        py.import("json")?.call_method1("dumps", (obj,))?.extract()?
    };
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(format!("malformed document: {e}")))
}

fn out<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = to_json(v).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn workspace(py: Python<'_>, space: &Bound<'_, PyAny>) -> PyResult<(SpaceFile, Workspace)> {
    let f: SpaceFile = doc(py, space)?;
    let ws = Workspace::from_file(&f).map_err(err)?;
    Ok((f, ws))
}

fn opts(seed: u64, budget: usize) -> GapOptions {
    GapOptions::default().with_seed(seed).with_budget(budget)
}

/// Gaps `δ(M,N)`, `δ(N,M)`, `δ̂` and the minimum gaps.
#[pyfunction]
#[pyo3(signature = (space, m, n, seed = 0, budget = 2000))]
fn gap(py: Python<'_>, space: &Bound<'_, PyAny>, m: &str, n: &str, seed: u64, budget: usize) -> PyResult<Py<PyAny>> {
    let (_, ws) = workspace(py, space)?;
    let r = gap_report(&ws.get(m).map_err(err)?, &ws.get(n).map_err(err)?, &opts(seed, budget)).map_err(err)?;
    out(py, &r)
}

/// Index of the tetrad named `"Y1,M,N,Y2"`.
#[pyfunction]
fn tetrad_index(py: Python<'_>, space: &Bound<'_, PyAny>, tetrad: &str) -> PyResult<Py<PyAny>> {
    let (_, ws) = workspace(py, space)?;
    out(py, &ws.tetrad(tetrad).map_err(err)?.summary())
}

#[pyfunction]
#[pyo3(signature = (space, tetrad, perturbed, variant = "1.2c", seed = 0, budget = 2000))]
fn verify_tetrad(
    py: Python<'_>,
    space: &Bound<'_, PyAny>,
    tetrad: &str,
    perturbed: &str,
    variant: &str,
    seed: u64,
    budget: usize,
) -> PyResult<Py<PyAny>> {
    let (_, ws) = workspace(py, space)?;
    let variant: Variant = variant.parse().map_err(err)?;
    let (t, tp) = (ws.tetrad(tetrad).map_err(err)?, ws.tetrad(perturbed).map_err(err)?);
    out(py, &verify_tetrad_stability(&t, &tp, variant, &opts(seed, budget)).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (space, l, s, n, a = 0.3, seed = 0, budget = 2000))]
#[allow(clippy::too_many_arguments)]
fn split(
    py: Python<'_>,
    space: &Bound<'_, PyAny>,
    l: &str,
    s: &str,
    n: &str,
    a: f64,
    seed: u64,
    budget: usize,
) -> PyResult<Py<PyAny>> {
    let (_, ws) = workspace(py, space)?;
    let get = |x: &str| ws.get(x).map_err(err);
    let r = split_impl(&get(l)?, &get(s)?, &get(n)?, a, &opts(seed, budget)).map_err(err)?;
    out(py, &r.report())
}

/// `[M−N]`; `k` is an operator document, synthesized when omitted.
#[pyfunction]
#[pyo3(signature = (space, m, n, k = None))]
fn relative_dim(py: Python<'_>, space: &Bound<'_, PyAny>, m: &str, n: &str, k: Option<&Bound<'_, PyAny>>) -> PyResult<Py<PyAny>> {
    let (_, ws) = workspace(py, space)?;
    let (m, n) = (ws.get(m).map_err(err)?, ws.get(n).map_err(err)?);
    let kop = match k {
        Some(k) => {
            let f: OperatorFile = doc(py, k)?;
            PerturbationOperator::new(&ws.space, ws.operator(f.rows()).map_err(err)?).map_err(err)?
        }
        None => synthesize_perturbation(&m, &n).map_err(err)?,
    };
    out(py, &reldim_impl(&m, &n, &kop).map_err(err)?)
}

/// Morse indices, `‖Q‖` and `γ(Q)` of a form document.
#[pyfunction]
fn morse_indices(py: Python<'_>, space: &Bound<'_, PyAny>, q: &Bound<'_, PyAny>) -> PyResult<Py<PyAny>> {
    let (sf, ws) = workspace(py, space)?;
    let q = load_form(&ws, &sf, &doc::<FormFile>(py, q)?).map_err(err)?;
    out(py, &q.summary().map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (space, q, r, c = 0.0, seed = 0, budget = 2000))]
fn c_gap(
    py: Python<'_>,
    space: &Bound<'_, PyAny>,
    q: &Bound<'_, PyAny>,
    r: &Bound<'_, PyAny>,
    c: f64,
    seed: u64,
    budget: usize,
) -> PyResult<Py<PyAny>> {
    let (sf, ws) = workspace(py, space)?;
    let q = load_form(&ws, &sf, &doc::<FormFile>(py, q)?).map_err(err)?;
    let r = load_form(&ws, &sf, &doc::<FormFile>(py, r)?).map_err(err)?;
    out(py, &c_gap_impl(&q, &r, c, &opts(seed, budget)).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (space, q, r, c = 0.0, h = 1.0, variant = "thm1.6", alpha = None, v0 = None, w0 = None, seed = 0, budget = 2000))]
#[allow(clippy::too_many_arguments)]
fn verify_morse(
    py: Python<'_>,
    space: &Bound<'_, PyAny>,
    q: &Bound<'_, PyAny>,
    r: &Bound<'_, PyAny>,
    c: f64,
    h: f64,
    variant: &str,
    alpha: Option<&str>,
    v0: Option<&str>,
    w0: Option<&str>,
    seed: u64,
    budget: usize,
) -> PyResult<Py<PyAny>> {
    let (sf, ws) = workspace(py, space)?;
    let q = load_form(&ws, &sf, &doc::<FormFile>(py, q)?).map_err(err)?;
    let r = load_form(&ws, &sf, &doc::<FormFile>(py, r)?).map_err(err)?;
    let variant: MorseVariant = variant.parse().map_err(err)?;
    let get = |x: Option<&str>| x.map(|x| ws.get(x)).transpose().map_err(err);
    let p = MorseProblem { q, r, v0: get(v0)?, w0: get(w0)?, h, c, alpha: get(alpha)? };
    out(py, &verify_morse_stability(&p, variant, &opts(seed, budget)).map_err(err)?)
}

/// Index trace along a path document; `kind` is `tetrad-index` or `relative-dim`.
#[pyfunction]
#[pyo3(signature = (path, kind = "tetrad-index"))]
fn family(py: Python<'_>, path: &Bound<'_, PyAny>, kind: &str) -> PyResult<Py<PyAny>> {
    let kind: TraceKind = kind.parse().map_err(err)?;
    let p: PathFile = doc(py, path)?;
    let (plan, base) = p.resolve().map_err(err)?;
    out(py, &walk_family(&plan, &base, kind).map_err(err)?)
}

/// Seeded instance of `kind` (`pair`, `tetrad`, `reldim`, `morse`, `path`).
#[pyfunction]
#[pyo3(signature = (kind, size, seed = 0))]
fn generate(py: Python<'_>, kind: &str, size: usize, seed: u64) -> PyResult<Py<PyAny>> {
    let kind: Kind = kind.parse().map_err(err)?;
    out(py, &gen_instance(kind, seed, size).map_err(err)?)
}

#[pymodule]
fn pysubgap(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GateError", m.py().get_type::<GateError>())?;
    m.add_function(wrap_pyfunction!(gap, m)?)?;
    m.add_function(wrap_pyfunction!(tetrad_index, m)?)?;
    m.add_function(wrap_pyfunction!(verify_tetrad, m)?)?;
    m.add_function(wrap_pyfunction!(split, m)?)?;
    m.add_function(wrap_pyfunction!(relative_dim, m)?)?;
    m.add_function(wrap_pyfunction!(morse_indices, m)?)?;
    m.add_function(wrap_pyfunction!(c_gap, m)?)?;
    m.add_function(wrap_pyfunction!(verify_morse, m)?)?;
    m.add_function(wrap_pyfunction!(family, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
