//! Python bindings for `famcorr`.
//!
//! Families are passed as lists of rows, each row either a string over
//! `+-` / `01` or a list of `±1` integers.

use famcorr::engine::{self, EngineOptions};
use famcorr::extremal::{self, SearchOptions, SubsetStrategy};
use famcorr::format::{parse_family, write_family};
use famcorr::randstat::{self, Estimator, ExperimentConfig};
use famcorr::{oracle, BinarySequence, Error, Family, MeasureResult};
use num_bigint::BigUint;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(famcorr, InfeasibleOrder, PyValueError);
create_exception!(famcorr, BudgetExceeded, PyValueError);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::NoAdmissiblePattern { .. } => InfeasibleOrder::new_err(err.to_string()),
        Error::BudgetExceeded { .. } => BudgetExceeded::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

#[derive(FromPyObject)]
enum Row {
    Text(String),
    Signs(Vec<i8>),
}

fn family_from(rows: Vec<Row>) -> PyResult<Family> {
    if rows.iter().all(|r| matches!(r, Row::Text(_))) {
        let text: String = rows
            .into_iter()
            .map(|r| match r {
                Row::Text(t) => t + "\n",
                Row::Signs(_) => unreachable!(),
            })
            .collect();
        return parse_family(&text).map_err(to_py);
    }
    let rows = rows
        .into_iter()
        .map(|r| match r {
            Row::Signs(signs) => BinarySequence::from_signs(&signs),
            Row::Text(t) => parse_family(&t).map(|f| f.row(1).clone()),
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py)?;
    Family::new(rows).map_err(to_py)
}

fn rows_of(family: &Family) -> Vec<String> {
    family.rows().iter().map(ToString::to_string).collect()
}

fn result_dict<'py>(py: Python<'py>, r: &MeasureResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    let pattern: Vec<(usize, usize)> = r.pattern.pairs().iter().map(|p| (p.seq, p.shift)).collect();
    d.set_item("pattern", pattern)?;
    d.set_item("window", r.window)?;
    Ok(d)
}

/// `Phi_k` of a family with its witness pattern and window.
#[pyfunction]
#[pyo3(signature = (rows, order, naive = false, workers = None))]
fn cross_correlation_measure<'py>(
    py: Python<'py>,
    rows: Vec<Row>,
    order: usize,
    naive: bool,
    workers: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let family = family_from(rows)?;
    let result = py
        .detach(|| {
            if naive {
                oracle::cross_correlation_measure_naive(&family, order)
            } else {
                let options = EngineOptions {
                    workers,
                    ..EngineOptions::default()
                };
                engine::cross_correlation_measure_with(&family, order, &options).map(|r| r.0)
            }
        })
        .map_err(to_py)?;
    result_dict(py, &result)
}

/// `C_k` of a single sequence.
#[pyfunction]
fn correlation_measure<'py>(
    py: Python<'py>,
    row: Row,
    order: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let family = family_from(vec![row])?;
    let result = engine::correlation_measure(family.row(1), order).map_err(to_py)?;
    result_dict(py, &result)
}

/// Number of canonical patterns of order `k`.
#[pyfunction]
fn pattern_count(n: u64, s: u64, k: u64) -> BigUint {
    engine::pattern_count(n, s, k)
}

/// Random family number `index` of the stream for `seed`.
#[pyfunction]
#[pyo3(signature = (n, s, seed, index = 0))]
fn sample_family(n: usize, s: usize, seed: u64, index: u64) -> PyResult<Vec<String>> {
    randstat::sample_family(n, s, seed, index)
        .map(|f| rows_of(&f))
        .map_err(to_py)
}

/// Runs a distribution experiment; returns `(json_summary, csv_records)`.
#[pyfunction]
#[pyo3(signature = (n, s, orders, samples, seed, eps = randstat::DEFAULT_EPS, subsample = None, workers = None))]
#[allow(clippy::too_many_arguments)]
fn run_experiment(
    py: Python<'_>,
    n: usize,
    s: usize,
    orders: Vec<usize>,
    samples: usize,
    seed: u64,
    eps: f64,
    subsample: Option<u64>,
    workers: Option<usize>,
) -> PyResult<(String, String)> {
    let mut cfg = ExperimentConfig::new(n, s, orders, samples, seed);
    cfg.eps = eps;
    cfg.workers = workers;
    if let Some(patterns) = subsample {
        cfg.estimator = Estimator::Subsample { patterns };
    }
    let report = py
        .detach(|| randstat::run_distribution_experiment(&cfg))
        .map_err(to_py)?;
    Ok((report.to_json(), report.to_csv()))
}

#[pyfunction]
fn digit_construction(n: usize, s: usize) -> PyResult<Vec<String>> {
    extremal::digit_construction(n, s)
        .map(|f| rows_of(&f))
        .map_err(to_py)
}

/// `(lower, upper)` on the smallest `Phi_{2k+1}`.
#[pyfunction]
fn odd_min_bounds(n: usize, s: usize, k: usize) -> PyResult<(u64, u64)> {
    let b = extremal::odd_min_bounds(n, s, k).map_err(to_py)?;
    Ok((b.lower, b.upper))
}

/// Lower bound on the smallest `Phi_{2k}`, as a dict.
#[pyfunction]
fn even_min_bound<'py>(
    py: Python<'py>,
    n: usize,
    s: usize,
    k: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let b = extremal::even_min_bound(n, s, k).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("branch", b.branch.label())?;
    d.set_item("branch_value", b.branch_value)?;
    d.set_item("baseline", b.baseline)?;
    d.set_item("bound", b.bound)?;
    d.set_item("baseline_dominates", b.baseline_dominates)?;
    Ok(d)
}

/// Proven minimum of `Phi_order` over injective families.
#[pyfunction]
#[pyo3(signature = (n, s, order, prune = true, budget = extremal::DEFAULT_NODE_BUDGET))]
fn exhaustive_min<'py>(
    py: Python<'py>,
    n: usize,
    s: usize,
    order: usize,
    prune: bool,
    budget: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let options = SearchOptions {
        node_budget: budget,
        prune,
        workers: None,
    };
    let found = py
        .detach(|| extremal::exhaustive_min(n, s, order, &options))
        .map_err(to_py)?;
    let d = result_dict(py, &found.witness)?;
    d.set_item("min", found.min_value)?;
    d.set_item("argmin", rows_of(&found.argmin))?;
    d.set_item("optima", found.optima)?;
    Ok(d)
}

/// Certificate for `Phi_order` as JSON: the prefix certificate for odd
/// orders, the Gram certificate for even ones.
#[pyfunction]
#[pyo3(signature = (rows, order, strategy = "disjoint-shifted", max_subsets = extremal::DEFAULT_MAX_SUBSETS))]
fn certify(rows: Vec<Row>, order: usize, strategy: &str, max_subsets: usize) -> PyResult<String> {
    let family = family_from(rows)?;
    if order < 2 {
        return Err(PyValueError::new_err("order must be at least 2"));
    }
    let k = order / 2;
    let json = if order % 2 == 1 {
        let cert = extremal::pigeonhole_certificate(&family, k).map_err(to_py)?;
        serde_json::to_string(&cert)
    } else {
        let strategy = match strategy {
            "distinct" => SubsetStrategy::Distinct,
            "disjoint-shifted" => SubsetStrategy::DisjointShifted,
            other => return Err(PyValueError::new_err(format!("unknown strategy {other:?}"))),
        };
        let cert = extremal::gram_certificate(&family, k, strategy, max_subsets).map_err(to_py)?;
        serde_json::to_string(&cert)
    };
    Ok(json.expect("certificates serialize"))
}

/// Canonical family file text.
#[pyfunction]
fn format_family(rows: Vec<Row>) -> PyResult<String> {
    Ok(write_family(&family_from(rows)?))
}

#[pymodule]
#[pyo3(name = "famcorr")]
fn famcorr_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("InfeasibleOrder", m.py().get_type::<InfeasibleOrder>())?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add_function(wrap_pyfunction!(cross_correlation_measure, m)?)?;
    m.add_function(wrap_pyfunction!(correlation_measure, m)?)?;
    m.add_function(wrap_pyfunction!(pattern_count, m)?)?;
    m.add_function(wrap_pyfunction!(sample_family, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(digit_construction, m)?)?;
    m.add_function(wrap_pyfunction!(odd_min_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(even_min_bound, m)?)?;
    m.add_function(wrap_pyfunction!(exhaustive_min, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(format_family, m)?)?;
    Ok(())
}
