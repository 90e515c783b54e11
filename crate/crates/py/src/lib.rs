//! Python bindings: the checkers, α* estimators, lemma harnesses and the
//! expression language, exposed as a small `qlab` module.
//!
//! Structured results cross the boundary as JSON strings (the same report
//! schema the CLI writes), so Python callers get plain dicts via
//! `json.loads` and the Rust side keeps a single serialization path.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use qlab_core::checks::AlphaMethod;
use qlab_core::exprlang::parse;
use qlab_core::geometry::{BoxDomain, SamplePlan};
use qlab_core::report::{run_suite, FunctionSource, RunConfig, Task};
use qlab_core::{catalog, checks, subdiff};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Names of the registered ground-truth functions.
#[pyfunction]
fn catalog_names() -> Vec<String> {
    catalog::names()
}

/// The `catalog list` text: one line per entry with labels and provenance.
#[pyfunction]
fn catalog_list() -> String {
    catalog::listing()
}

fn checked_parse(text: &str, dim: usize) -> PyResult<qlab_core::Expr> {
    if dim == 0 {
        return Err(value_error("dim must be >= 1"));
    }
    parse(text, dim).map_err(value_error)
}

/// Evaluates an expression over x1..x<dim> at a point. Returns `math.inf`
/// for points outside the effective domain.
#[pyfunction]
fn eval_expr(text: &str, dim: usize, point: Vec<f64>) -> PyResult<f64> {
    let expr = checked_parse(text, dim)?;
    Ok(expr.eval(&point).map_err(value_error)?.value())
}

/// Parses and re-prints an expression (the printed form evaluates
/// identically).
#[pyfunction]
fn print_expr(text: &str, dim: usize) -> PyResult<String> {
    Ok(checked_parse(text, dim)?.print())
}

fn make_source(
    function: Option<String>,
    expr: Option<String>,
    dim: Option<usize>,
) -> PyResult<FunctionSource> {
    match (function, expr) {
        (Some(name), None) => Ok(FunctionSource::Catalog { name }),
        (None, Some(text)) => Ok(FunctionSource::Expression {
            text,
            dim: dim.ok_or_else(|| value_error("expr requires dim"))?,
        }),
        _ => Err(value_error("pass exactly one of `function` or `expr`")),
    }
}

fn make_box(scan_box: Option<Vec<(f64, f64)>>) -> PyResult<Option<BoxDomain>> {
    scan_box
        .map(|intervals| {
            let (lo, hi) = intervals.iter().copied().unzip();
            BoxDomain::new(lo, hi).map_err(value_error)
        })
        .transpose()
}

fn execute(config: &RunConfig) -> PyResult<String> {
    Ok(run_suite(config).map_err(value_error)?.to_json())
}

/// Runs property checks and returns the JSON report.
///
/// `checks` entries: quasiconvex, cond-b, quasimonotone, lsc, robust-primal,
/// robust-cond-b, robust-pairs (robust ones need `alpha`). `scan_box` is a
/// list of (lo, hi) pairs, one per coordinate.
#[pyfunction]
#[pyo3(signature = (function=None, expr=None, dim=None, checks=None, alpha=None, scan_box=None, seed=42, samples=None))]
#[allow(clippy::too_many_arguments)]
fn check(
    function: Option<String>,
    expr: Option<String>,
    dim: Option<usize>,
    checks: Option<Vec<String>>,
    alpha: Option<f64>,
    scan_box: Option<Vec<(f64, f64)>>,
    seed: u64,
    samples: Option<usize>,
) -> PyResult<String> {
    use qlab_core::report::{PropertyCheck, RobustCheckKind};
    let names = checks.unwrap_or_else(|| {
        vec![
            "quasiconvex".into(),
            "cond-b".into(),
            "quasimonotone".into(),
        ]
    });
    let tasks: Vec<Task> = names
        .iter()
        .map(|name| {
            let robust = |kind| {
                alpha
                    .map(|alpha| Task::RobustCheck { which: kind, alpha })
                    .ok_or_else(|| value_error(format!("check {name:?} requires alpha")))
            };
            match name.as_str() {
                "quasiconvex" => Ok(Task::Check {
                    which: PropertyCheck::Quasiconvex,
                }),
                "cond-b" => Ok(Task::Check {
                    which: PropertyCheck::CondB,
                }),
                "quasimonotone" => Ok(Task::Check {
                    which: PropertyCheck::Quasimonotone,
                }),
                "lsc" => Ok(Task::Check {
                    which: PropertyCheck::Lsc,
                }),
                "robust-primal" => robust(RobustCheckKind::RobustPrimal),
                "robust-cond-b" => robust(RobustCheckKind::RobustCondB),
                "robust-pairs" => robust(RobustCheckKind::RobustPairs),
                other => Err(value_error(format!("unknown check {other:?}"))),
            }
        })
        .collect::<PyResult<_>>()?;
    let mut plan = SamplePlan::with_seed(seed);
    if let Some(samples) = samples {
        plan.points_per_box = samples;
    }
    let config = RunConfig {
        source: make_source(function, expr, dim)?,
        scan_box: make_box(scan_box)?,
        plan,
        tasks,
    };
    execute(&config)
}

/// Brackets the robustness modulus α* and returns the JSON report.
/// `method`: primal | dual-b | pairs.
#[pyfunction]
#[pyo3(signature = (function=None, expr=None, dim=None, method="primal", cap=8.0, tol=1e-2, scan_box=None, seed=42))]
#[allow(clippy::too_many_arguments)]
fn alpha_star(
    function: Option<String>,
    expr: Option<String>,
    dim: Option<usize>,
    method: &str,
    cap: f64,
    tol: f64,
    scan_box: Option<Vec<(f64, f64)>>,
    seed: u64,
) -> PyResult<String> {
    let method = match method {
        "primal" => AlphaMethod::Primal,
        "dual-b" | "dualb" => AlphaMethod::DualB,
        "pairs" => AlphaMethod::Pairs,
        other => return Err(value_error(format!("unknown method {other:?}"))),
    };
    let config = RunConfig {
        source: make_source(function, expr, dim)?,
        scan_box: make_box(scan_box)?,
        plan: SamplePlan::with_seed(seed),
        tasks: vec![Task::AlphaStar { method, cap, tol }],
    };
    execute(&config)
}

/// Runs a full suite from a JSON `RunConfig` (the schema echoed in every
/// report) and returns the JSON report.
#[pyfunction]
fn run_suite_json(config_json: &str) -> PyResult<String> {
    let config: RunConfig = serde_json::from_str(config_json).map_err(value_error)?;
    execute(&config)
}

/// Sampled Fréchet subgradients of a catalog function at a point, as a list
/// of vectors (exact oracle values when available).
#[pyfunction]
fn subgradients(function: &str, point: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    let handle = catalog::lookup(function).map_err(value_error)?;
    Ok(subdiff::subgradients_at(&handle, &point)
        .map_err(value_error)?
        .subgradients)
}

/// Primal quasiconvexity verdict for a catalog function as a quick boolean
/// (None when the scan was inconclusive).
#[pyfunction]
#[pyo3(signature = (function, seed=42))]
fn is_quasiconvex(function: &str, seed: u64) -> PyResult<Option<bool>> {
    let handle = catalog::lookup(function).map_err(value_error)?;
    let plan = SamplePlan::with_seed(seed);
    let verdict = checks::check_quasiconvex_primal(&handle, handle.default_box(), &plan);
    Ok(match verdict.status {
        checks::CheckStatus::Satisfied => Some(true),
        checks::CheckStatus::Violated(_) => Some(false),
        checks::CheckStatus::Inconclusive => None,
    })
}

#[pymodule]
fn qlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_list, m)?)?;
    m.add_function(wrap_pyfunction!(eval_expr, m)?)?;
    m.add_function(wrap_pyfunction!(print_expr, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_star, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite_json, m)?)?;
    m.add_function(wrap_pyfunction!(subgradients, m)?)?;
    m.add_function(wrap_pyfunction!(is_quasiconvex, m)?)?;
    Ok(())
}
