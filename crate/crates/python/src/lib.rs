//! Python bindings over the sparse-ot core.
//!
//! Every function speaks JSON strings, mirroring the CLI's file formats, so
//! the Python side needs nothing but `json.loads`. Rational weights and
//! masses stay strings ("2/3") end to end; nothing is rounded to binary64
//! on the way through.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use sparse_ot::expansion::expansion_counts;
use sparse_ot::generate::{generate_instance, GenConfig, WeightMode};
use sparse_ot::plan::{plan_stats, verify_plan, TransportPlan};
use sparse_ot::solver::CostKind;
use sparse_ot::svg::{render_figure, FigureConfig};
use sparse_ot::{solve_instance, Instance, SolveOptions, SolvePath};

fn value_error(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn parse_instance(instance_json: &str) -> PyResult<Instance> {
    Instance::from_json(instance_json).map_err(value_error)
}

fn parse_plan(plan_json: &str) -> PyResult<TransportPlan> {
    serde_json::from_str(plan_json).map_err(value_error)
}

/// Solve an instance and return `{"plan", "stats", "atoms", "path"}` as JSON.
#[pyfunction]
#[pyo3(signature = (instance_json, max_atoms=None, path=None))]
fn solve(instance_json: &str, max_atoms: Option<u64>, path: Option<&str>) -> PyResult<String> {
    let instance = parse_instance(instance_json)?;
    let mut options = SolveOptions::default();
    if let Some(budget) = max_atoms {
        options.max_atoms = budget;
    }
    options.path = match path {
        None | Some("auto") => SolvePath::Auto,
        Some("expanded") => SolvePath::Expanded,
        Some("compressed") => SolvePath::Compressed,
        Some(other) => return Err(value_error(format!("unknown path {other:?}"))),
    };
    let solved = solve_instance(&instance, &options).map_err(value_error)?;
    let stats = plan_stats(&solved.plan, &instance.mu, &instance.nu).map_err(value_error)?;
    let doc = serde_json::json!({
        "plan": solved.plan,
        "stats": stats,
        "atoms": solved.atoms,
        "path": if solved.used_compressed { "compressed" } else { "expanded" },
    });
    Ok(doc.to_string())
}

/// Audit a plan against an instance; returns `{"passed", "checks"}` as JSON.
#[pyfunction]
fn verify(plan_json: &str, instance_json: &str) -> PyResult<String> {
    let instance = parse_instance(instance_json)?;
    let plan = parse_plan(plan_json)?;
    let report = verify_plan(&plan, &instance.mu, &instance.nu, &instance.cost, None);
    let doc = serde_json::json!({
        "passed": report.passed(),
        "checks": report.checks,
    });
    Ok(doc.to_string())
}

/// Generate a seeded instance as JSON. Omitting `max_denominator` gives
/// uniform weights; passing it gives random rationals under that cap.
#[pyfunction]
#[pyo3(signature = (m, n, dim=2, seed=0, max_denominator=None, cost="euclidean"))]
fn generate(
    m: usize,
    n: usize,
    dim: usize,
    seed: u64,
    max_denominator: Option<u64>,
    cost: &str,
) -> PyResult<String> {
    let weights = match max_denominator {
        None => WeightMode::Uniform,
        Some(cap) => WeightMode::RandomRational { max_denominator: cap },
    };
    let cost = match cost {
        "euclidean" => CostKind::Euclidean,
        "sqeuclidean" => CostKind::SqEuclidean,
        "manhattan" => CostKind::Manhattan,
        other => return Err(value_error(format!("unknown cost kind {other:?}"))),
    };
    let config = GenConfig { m, n, dim, seed, weights, cost };
    let instance = generate_instance(&config).map_err(value_error)?;
    Ok(instance.to_json_pretty())
}

/// Replication counts for uniform measures over m and n points.
#[pyfunction]
fn uniform_expansion_counts(m: usize, n: usize) -> PyResult<String> {
    if m == 0 || n == 0 {
        return Err(value_error("both sides must be nonempty"));
    }
    let counts = expansion_counts(m, n);
    let doc = serde_json::json!({
        "gcd": counts.gcd,
        "src_copies": counts.src_copies,
        "dst_copies": counts.dst_copies,
        "atoms": counts.atoms,
        "atom_mass": counts.atom_mass.to_string(),
    });
    Ok(doc.to_string())
}

/// Render a plan over a planar instance as an SVG document string.
#[pyfunction]
#[pyo3(signature = (plan_json, instance_json, width=800, height=800))]
fn figure_svg(
    plan_json: &str,
    instance_json: &str,
    width: u32,
    height: u32,
) -> PyResult<String> {
    let instance = parse_instance(instance_json)?;
    let plan = parse_plan(plan_json)?;
    render_figure(&plan, &instance.mu, &instance.nu, &FigureConfig { width, height })
        .map_err(value_error)
}

#[pymodule]
fn sparse_ot_py(module: &Bound<'_, PyModule>) -> PyResult<()> {
    module.add_function(wrap_pyfunction!(solve, module)?)?;
    module.add_function(wrap_pyfunction!(verify, module)?)?;
    module.add_function(wrap_pyfunction!(generate, module)?)?;
    module.add_function(wrap_pyfunction!(uniform_expansion_counts, module)?)?;
    module.add_function(wrap_pyfunction!(figure_svg, module)?)?;
    module.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
