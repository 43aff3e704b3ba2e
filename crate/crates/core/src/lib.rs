//! Discrete optimal transport with per-point sparsity guarantees.
//!
//! Transport between two finitely supported probability measures with
//! rational weights is solved by replicating each point into equal-mass
//! atoms (a common-denominator construction), matching atoms, and collapsing
//! back. The resulting plan moves mass from each source to a bounded number
//! of targets and vice versa, with exact rational masses throughout.

pub mod expansion;
pub mod generate;
pub mod instance;
pub mod measures;
pub mod oracle;
pub mod plan;
pub mod solver;
pub mod svg;

use thiserror::Error;

pub use expansion::{expand, ExpansionError, DEFAULT_MAX_ATOMS};
pub use instance::Instance;
pub use measures::{DiscreteMeasure, Point, Rational};
pub use plan::{plan_stats, verify_plan, PlanStats, TransportPlan, VerifyReport};
pub use solver::CostSpec;

/// Atom counts above this default to the compressed flow path; below it the
/// literal atom bijection is solved, which is the easier route to audit.
pub const AUTO_COMPRESSED_THRESHOLD: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolvePath {
    #[default]
    Auto,
    Expanded,
    Compressed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub max_atoms: u64,
    pub path: SolvePath,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_atoms: DEFAULT_MAX_ATOMS,
            path: SolvePath::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub plan: TransportPlan,
    pub atoms: usize,
    pub used_compressed: bool,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Expansion(#[from] expansion::ExpansionError),
    #[error(transparent)]
    Solver(#[from] solver::SolverError),
    #[error(transparent)]
    Plan(#[from] plan::PlanError),
}

/// End-to-end solve: expand to atoms, find a minimum-cost matching on
/// either path, collapse to a plan on the original points.
pub fn solve_pair(
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    cost: &CostSpec,
    options: &SolveOptions,
) -> Result<Solved, SolveError> {
    let instance = expansion::expand(mu, nu, options.max_atoms)?;
    let atoms = instance.atoms();
    let use_compressed = match options.path {
        SolvePath::Expanded => false,
        SolvePath::Compressed => true,
        SolvePath::Auto => atoms > AUTO_COMPRESSED_THRESHOLD,
    };
    let plan = if use_compressed {
        let ground = cost.ground_matrix(mu, nu)?;
        let flow = solver::solve_compressed(
            &instance.src_multiplicities(),
            &instance.dst_multiplicities(),
            &ground,
        )?;
        plan::collapse_flow(&instance, &flow)?
    } else {
        let matrix = solver::atom_cost_matrix(&instance, cost)?;
        let assignment = solver::solve_assignment(&matrix)?;
        plan::collapse(&instance, &assignment)?
    };
    Ok(Solved {
        plan,
        atoms,
        used_compressed: use_compressed,
    })
}

/// Convenience wrapper over [`solve_pair`] for a parsed instance.
pub fn solve_instance(instance: &Instance, options: &SolveOptions) -> Result<Solved, SolveError> {
    solve_pair(&instance.mu, &instance.nu, &instance.cost, options)
}
