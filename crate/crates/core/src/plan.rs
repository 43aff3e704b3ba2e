//! Transport plans on the original points, their sparsity statistics, and
//! the verification report asserting the construction's guarantees.

use std::collections::BTreeMap;

use num::integer::Integer;
use num::{BigUint, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::ExpandedInstance;
use crate::measures::{DiscreteMeasure, Rational};
use crate::solver::{Assignment, CompressedFlow, CostSpec};

/// Relative tolerance for binary64 cost cross-checks. Masses and marginals
/// are exact and use no tolerance at all.
pub const COST_RTOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("assignment has {perm_len} atoms, instance has {atoms}")]
    SizeMismatch { perm_len: usize, atoms: usize },
    #[error("flow references cell ({i}, {j}) outside {m}x{n}")]
    FlowOutOfRange { i: usize, j: usize, m: usize, n: usize },
    #[error("flow row {index} carries {got} units, multiplicity is {expected}")]
    FlowRowMismatch { index: usize, got: u64, expected: u64 },
    #[error("flow column {index} carries {got} units, multiplicity is {expected}")]
    FlowColumnMismatch { index: usize, got: u64, expected: u64 },
    #[error("plan is {m}x{n}, measures are {mu_len}x{nu_len}")]
    ShapeMismatch { m: usize, n: usize, mu_len: usize, nu_len: usize },
    #[error("plan row {index} sums to {got}, source weight is {expected}")]
    RowMarginal { index: usize, got: Box<Rational>, expected: Box<Rational> },
    #[error("plan column {index} sums to {got}, target weight is {expected}")]
    ColumnMarginal { index: usize, got: Box<Rational>, expected: Box<Rational> },
}

/// A coupling of the two measures: sparse nonnegative masses with exact
/// marginals. Entries are sorted by (i, j) so serialization is canonical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub m: usize,
    pub n: usize,
    pub entries: Vec<(usize, usize, Rational)>,
    pub cost: f64,
}

impl TransportPlan {
    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn row_sums(&self) -> Vec<Rational> {
        let mut sums = vec![Rational::zero(); self.m];
        for (i, _, mass) in &self.entries {
            sums[*i] = &sums[*i] + mass;
        }
        sums
    }

    pub fn col_sums(&self) -> Vec<Rational> {
        let mut sums = vec![Rational::zero(); self.n];
        for (_, j, mass) in &self.entries {
            sums[*j] = &sums[*j] + mass;
        }
        sums
    }
}

/// Per-point degree ceilings. `outgoing[i]` bounds how many targets source
/// `i` may touch; `incoming[j]` bounds how many sources reach target `j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeBounds {
    pub outgoing: Vec<u64>,
    pub incoming: Vec<u64>,
}

/// Bounds implied by the replication construction.
///
/// With source multiplicities k and denominator B, target multiplicities l
/// and denominator D: source i becomes k_i * D/gcd(B,D) atoms and so touches
/// at most that many targets; symmetrically for targets. Uniform measures
/// reduce to the familiar n/gcd(m,n) and m/gcd(m,n).
pub fn construction_bounds(mu: &DiscreteMeasure, nu: &DiscreteMeasure) -> DegreeBounds {
    let src = mu.common_denominator();
    let dst = nu.common_denominator();
    let g = src.denominator.gcd(&dst.denominator);
    let src_scale = &dst.denominator / &g;
    let dst_scale = &src.denominator / &g;
    // Degrees never exceed the plan dimensions, so saturating keeps the
    // comparisons correct even for astronomically large exact bounds.
    let clamp = |b: BigUint| b.to_u64().unwrap_or(u64::MAX);
    DegreeBounds {
        outgoing: src
            .multiplicities
            .iter()
            .map(|k| clamp(k * &src_scale))
            .collect(),
        incoming: dst
            .multiplicities
            .iter()
            .map(|l| clamp(l * &dst_scale))
            .collect(),
    }
}

/// Sparsity statistics of a plan against its measures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanStats {
    pub out_degree: Vec<u64>,
    pub in_degree: Vec<u64>,
    pub support_size: usize,
    pub max_out: u64,
    pub max_in: u64,
    pub bound_out: Vec<u64>,
    pub bound_in: Vec<u64>,
    pub cost: f64,
}

/// Collapses an atom bijection back onto the original points: the mass sent
/// from i to j is the number of atom pairs with that provenance times the
/// atom mass. Marginals hold exactly by construction.
pub fn collapse(
    instance: &ExpandedInstance,
    assignment: &Assignment,
) -> Result<TransportPlan, PlanError> {
    if assignment.perm.len() != instance.atoms() {
        return Err(PlanError::SizeMismatch {
            perm_len: assignment.perm.len(),
            atoms: instance.atoms(),
        });
    }
    let mut cells: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for (p, &q) in assignment.perm.iter().enumerate() {
        *cells
            .entry((instance.src_atoms[p], instance.dst_atoms[q]))
            .or_insert(0) += 1;
    }
    Ok(plan_from_cells(instance, cells, assignment.cost))
}

/// Collapses a compressed flow: unit counts become masses directly. The flow
/// must reproduce the instance multiplicities exactly.
pub fn collapse_flow(
    instance: &ExpandedInstance,
    flow: &CompressedFlow,
) -> Result<TransportPlan, PlanError> {
    let (m, n) = (instance.src_measure.len(), instance.dst_measure.len());
    let mut cells: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for &(i, j, units) in &flow.entries {
        if i >= m || j >= n {
            return Err(PlanError::FlowOutOfRange { i, j, m, n });
        }
        *cells.entry((i, j)).or_insert(0) += units;
    }
    let mut row = vec![0u64; m];
    let mut col = vec![0u64; n];
    for (&(i, j), &units) in &cells {
        row[i] += units;
        col[j] += units;
    }
    for (index, (&got, &expected)) in row.iter().zip(&instance.src_multiplicities()).enumerate() {
        if got != expected {
            return Err(PlanError::FlowRowMismatch { index, got, expected });
        }
    }
    for (index, (&got, &expected)) in col.iter().zip(&instance.dst_multiplicities()).enumerate() {
        if got != expected {
            return Err(PlanError::FlowColumnMismatch { index, got, expected });
        }
    }
    Ok(plan_from_cells(instance, cells, flow.cost))
}

fn plan_from_cells(
    instance: &ExpandedInstance,
    cells: BTreeMap<(usize, usize), u64>,
    atom_units_cost: f64,
) -> TransportPlan {
    let entries = cells
        .into_iter()
        .filter(|&(_, units)| units > 0)
        .map(|((i, j), units)| (i, j, &Rational::from(units) * &instance.atom_mass))
        .collect();
    TransportPlan {
        m: instance.src_measure.len(),
        n: instance.dst_measure.len(),
        entries,
        cost: atom_units_cost * instance.atom_mass.to_f64(),
    }
}

/// Degrees, support size, and the construction bounds for a plan whose
/// marginals match the measures exactly (checked).
pub fn plan_stats(
    plan: &TransportPlan,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
) -> Result<PlanStats, PlanError> {
    if plan.m != mu.len() || plan.n != nu.len() {
        return Err(PlanError::ShapeMismatch {
            m: plan.m,
            n: plan.n,
            mu_len: mu.len(),
            nu_len: nu.len(),
        });
    }
    for (index, (got, expected)) in plan.row_sums().into_iter().zip(mu.weights()).enumerate() {
        if got != *expected {
            return Err(PlanError::RowMarginal {
                index,
                got: Box::new(got),
                expected: Box::new(expected.clone()),
            });
        }
    }
    for (index, (got, expected)) in plan.col_sums().into_iter().zip(nu.weights()).enumerate() {
        if got != *expected {
            return Err(PlanError::ColumnMarginal {
                index,
                got: Box::new(got),
                expected: Box::new(expected.clone()),
            });
        }
    }

    let mut out_degree = vec![0u64; plan.m];
    let mut in_degree = vec![0u64; plan.n];
    for (i, j, _) in &plan.entries {
        out_degree[*i] += 1;
        in_degree[*j] += 1;
    }
    let bounds = construction_bounds(mu, nu);
    Ok(PlanStats {
        max_out: out_degree.iter().copied().max().unwrap_or(0),
        max_in: in_degree.iter().copied().max().unwrap_or(0),
        support_size: plan.entries.len(),
        out_degree,
        in_degree,
        bound_out: bounds.outgoing,
        bound_in: bounds.incoming,
        cost: plan.cost,
    })
}

/// One verification check: a name, a verdict, and a human-readable detail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Audits a plan against its measures: structure, exact marginals, mass
/// positivity, mass quantization, degree bounds, and cost agreement.
/// Failures are report content, never errors, so external plans can be
/// audited too. `bounds` overrides the construction bounds when the plan
/// came from elsewhere.
pub fn verify_plan(
    plan: &TransportPlan,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostSpec,
    bounds: Option<&DegreeBounds>,
) -> VerifyReport {
    let mut checks = Vec::new();

    let mut structure_issues = Vec::new();
    if plan.m != mu.len() || plan.n != nu.len() {
        structure_issues.push(format!(
            "plan is {}x{}, measures are {}x{}",
            plan.m,
            plan.n,
            mu.len(),
            nu.len()
        ));
    }
    for window in plan.entries.windows(2) {
        let (a, b) = (&window[0], &window[1]);
        if (a.0, a.1) >= (b.0, b.1) {
            structure_issues.push(format!(
                "entries not sorted/unique at ({}, {}) then ({}, {})",
                a.0, a.1, b.0, b.1
            ));
            break;
        }
    }
    if let Some((i, j, _)) = plan
        .entries
        .iter()
        .find(|(i, j, _)| *i >= plan.m || *j >= plan.n)
    {
        structure_issues.push(format!("entry ({i}, {j}) out of range"));
    }
    push_check(&mut checks, "structure", structure_issues, "entries sorted, unique, in range");
    let structure_ok = checks.last().map(|c| c.passed).unwrap_or(false);

    if structure_ok {
        let mut marginal_issues = Vec::new();
        for (index, (got, expected)) in plan.row_sums().into_iter().zip(mu.weights()).enumerate() {
            if got != *expected {
                marginal_issues.push(format!("row {index} sums to {got}, expected {expected}"));
            }
        }
        for (index, (got, expected)) in plan.col_sums().into_iter().zip(nu.weights()).enumerate() {
            if got != *expected {
                marginal_issues.push(format!("column {index} sums to {got}, expected {expected}"));
            }
        }
        push_check(&mut checks, "marginals", marginal_issues, "row and column sums exact");
    } else {
        checks.push(CheckOutcome {
            name: "marginals",
            passed: false,
            detail: "skipped: structure invalid".into(),
        });
    }

    let positivity_issues: Vec<String> = plan
        .entries
        .iter()
        .filter(|(_, _, mass)| !mass.is_positive())
        .map(|(i, j, mass)| format!("mass at ({i}, {j}) is {mass}"))
        .collect();
    push_check(&mut checks, "mass_positivity", positivity_issues, "all masses positive");

    // Every mass must sit on the grid of multiples of 1/lcm(B, D), the atom
    // mass of the replication construction.
    let src_denom = mu.common_denominator().denominator;
    let dst_denom = nu.common_denominator().denominator;
    let grid = src_denom.lcm(&dst_denom);
    let grid_rational = Rational::from(grid.clone());
    let quantization_issues: Vec<String> = plan
        .entries
        .iter()
        .filter(|(_, _, mass)| !(mass * &grid_rational).is_integer())
        .map(|(i, j, mass)| format!("mass {mass} at ({i}, {j}) is not a multiple of 1/{grid}"))
        .collect();
    push_check(
        &mut checks,
        "quantization",
        quantization_issues,
        &format!("all masses are multiples of 1/{grid}"),
    );

    let fallback = construction_bounds(mu, nu);
    let bounds = bounds.unwrap_or(&fallback);
    let mut degree_issues = Vec::new();
    if bounds.outgoing.len() != plan.m || bounds.incoming.len() != plan.n {
        degree_issues.push(format!(
            "bounds are {}x{}, plan is {}x{}",
            bounds.outgoing.len(),
            bounds.incoming.len(),
            plan.m,
            plan.n
        ));
    } else {
        let mut out_degree = vec![0u64; plan.m];
        let mut in_degree = vec![0u64; plan.n];
        for (i, j, _) in &plan.entries {
            out_degree[*i] += 1;
            in_degree[*j] += 1;
        }
        for (i, (&got, &bound)) in out_degree.iter().zip(&bounds.outgoing).enumerate() {
            if got > bound {
                degree_issues.push(format!("source {i} has out-degree {got} > {bound}"));
            }
        }
        for (j, (&got, &bound)) in in_degree.iter().zip(&bounds.incoming).enumerate() {
            if got > bound {
                degree_issues.push(format!("target {j} has in-degree {got} > {bound}"));
            }
        }
    }
    push_check(&mut checks, "degree_bounds", degree_issues, "all per-point degree bounds hold");

    let cost_outcome = match cost.ground_matrix(mu, nu) {
        Ok(ground) if structure_ok => {
            let recomputed: f64 = plan
                .entries
                .iter()
                .map(|(i, j, mass)| mass.to_f64() * ground.get(*i, *j))
                .sum();
            let tol = COST_RTOL * recomputed.abs().max(1.0);
            let diff = (plan.cost - recomputed).abs();
            CheckOutcome {
                name: "cost_agreement",
                passed: diff <= tol,
                detail: if diff <= tol {
                    format!("recomputed {recomputed} matches stored {}", plan.cost)
                } else {
                    format!("recomputed {recomputed}, stored {} (diff {diff})", plan.cost)
                },
            }
        }
        Ok(_) => CheckOutcome {
            name: "cost_agreement",
            passed: false,
            detail: "skipped: structure invalid".into(),
        },
        Err(err) => CheckOutcome {
            name: "cost_agreement",
            passed: false,
            detail: format!("cost evaluation failed: {err}"),
        },
    };
    checks.push(cost_outcome);

    VerifyReport { checks }
}

fn push_check(
    checks: &mut Vec<CheckOutcome>,
    name: &'static str,
    issues: Vec<String>,
    ok_detail: &str,
) {
    checks.push(CheckOutcome {
        name,
        passed: issues.is_empty(),
        detail: if issues.is_empty() {
            ok_detail.to_string()
        } else {
            issues.join("; ")
        },
    });
}
