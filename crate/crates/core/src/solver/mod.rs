//! Minimum-cost solvers for the expanded instance.
//!
//! Two equivalent routes: an exact assignment (bijection) on the atom lists,
//! and an integral min-cost flow on the original `m x n` bipartite graph with
//! the atom multiplicities as supplies and demands. Both are deterministic
//! for a fixed input. Costs are binary64; when every entry is an integer the
//! totals are additionally accumulated exactly for bit-exact comparisons.

mod assignment;
mod flow;

pub use assignment::solve_assignment;
pub use flow::solve_compressed;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expansion::ExpandedInstance;
use crate::measures::DiscreteMeasure;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("cost matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("cost matrix has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("cost matrix is empty")]
    Empty,
    #[error("cost matrix rows have inconsistent lengths")]
    Ragged,
    #[error("explicit cost matrix is {rows}x{cols}, instance needs {expected_rows}x{expected_cols}")]
    CostShapeMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("measures have different point dimensions ({src} vs {dst})")]
    PointDimensionMismatch { src: usize, dst: usize },
    #[error("supplies total {supply} but demands total {demand}")]
    Unbalanced { supply: u64, demand: u64 },
}

/// Dense row-major binary64 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, SolverError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(SolverError::Empty);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(SolverError::Ragged);
        }
        Ok(CostMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut entry: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(entry(i, j));
            }
        }
        CostMatrix { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// Index of the first non-finite entry, if any.
    pub fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p / self.cols, p % self.cols))
    }

    /// True when every entry is an integer small enough for exact summation.
    pub fn is_integral(&self) -> bool {
        const EXACT: f64 = 9e15; // below 2^53
        self.data
            .iter()
            .all(|v| v.is_finite() && v.fract() == 0.0 && v.abs() <= EXACT)
    }

    pub fn scale(&self, factor: f64) -> CostMatrix {
        CostMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }
}

/// Ground cost: a named metric on point coordinates or an explicit matrix.
/// Negative entries are permitted; the sparsity guarantees do not depend on
/// the costs.
#[derive(Debug, Clone, PartialEq)]
pub enum CostSpec {
    Euclidean,
    SqEuclidean,
    Manhattan,
    Explicit(CostMatrix),
}

/// Named cost kinds as they appear in instance files and CLI flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostKind {
    Euclidean,
    SqEuclidean,
    Manhattan,
}

impl CostSpec {
    pub fn from_kind(kind: CostKind) -> Self {
        match kind {
            CostKind::Euclidean => CostSpec::Euclidean,
            CostKind::SqEuclidean => CostSpec::SqEuclidean,
            CostKind::Manhattan => CostSpec::Manhattan,
        }
    }

    /// Builds the `m x n` ground cost matrix between the two supports.
    pub fn ground_matrix(
        &self,
        mu: &DiscreteMeasure,
        nu: &DiscreteMeasure,
    ) -> Result<CostMatrix, SolverError> {
        let (m, n) = (mu.len(), nu.len());
        if let CostSpec::Explicit(matrix) = self {
            if matrix.rows() != m || matrix.cols() != n {
                return Err(SolverError::CostShapeMismatch {
                    rows: matrix.rows(),
                    cols: matrix.cols(),
                    expected_rows: m,
                    expected_cols: n,
                });
            }
            if let Some((row, col)) = matrix.first_non_finite() {
                return Err(SolverError::NonFinite { row, col });
            }
            return Ok(matrix.clone());
        }
        if mu.dim() != nu.dim() {
            return Err(SolverError::PointDimensionMismatch {
                src: mu.dim(),
                dst: nu.dim(),
            });
        }
        let ground = CostMatrix::from_fn(m, n, |i, j| {
            let x = &mu.points()[i].coords;
            let y = &nu.points()[j].coords;
            match self {
                CostSpec::Euclidean => sq_euclidean(x, y).sqrt(),
                CostSpec::SqEuclidean => sq_euclidean(x, y),
                CostSpec::Manhattan => x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (a - b).abs())
                    .sum(),
                CostSpec::Explicit(_) => unreachable!("handled above"),
            }
        });
        Ok(ground)
    }
}

fn sq_euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `atoms x atoms` matrix of ground costs between atom provenance points.
/// Replicated atoms yield replicated rows and columns.
pub fn atom_cost_matrix(
    instance: &ExpandedInstance,
    cost: &CostSpec,
) -> Result<CostMatrix, SolverError> {
    let ground = cost.ground_matrix(&instance.src_measure, &instance.dst_measure)?;
    let atoms = instance.atoms();
    Ok(CostMatrix::from_fn(atoms, atoms, |p, q| {
        ground.get(instance.src_atoms[p], instance.dst_atoms[q])
    }))
}

/// A minimum-cost bijection between atoms.
///
/// `perm[p]` is the target atom matched to source atom `p`. `cost` sums the
/// matrix entries along the matching ("atom units": atom masses are not
/// applied). `exact_cost` is present when the matrix is integral.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub perm: Vec<usize>,
    pub cost: f64,
    pub exact_cost: Option<i128>,
}

/// An integral minimum-cost flow on the compressed `m x n` instance.
///
/// Entries are `(source index, target index, atom units)`; `cost` sums
/// `units * cost[i][j]` in atom units.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedFlow {
    pub entries: Vec<(usize, usize, u64)>,
    pub cost: f64,
    pub exact_cost: Option<i128>,
}
