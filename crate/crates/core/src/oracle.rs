//! Exhaustive reference solvers for desk-scale audits.
//!
//! These share no solving code with the production solvers: permutations are
//! generated here, feasible transport matrices are enumerated here, and costs
//! are accumulated here. Budgets are hard errors, never silent truncation.

use thiserror::Error;

use crate::solver::CostMatrix;

/// 9! = 362,880 permutations is the largest exhaustive assignment search.
pub const MAX_ORACLE_ASSIGNMENT: usize = 9;
/// Transport enumeration is bounded by total atom units and matrix cells.
pub const MAX_ORACLE_UNITS: u64 = 12;
pub const MAX_ORACLE_CELLS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle assignment limited to {MAX_ORACLE_ASSIGNMENT}x{MAX_ORACLE_ASSIGNMENT}, got {size}x{size}")]
    AssignmentTooLarge { size: usize },
    #[error(
        "oracle transport limited to {MAX_ORACLE_UNITS} units and {MAX_ORACLE_CELLS} cells, got {units} units in {rows}x{cols}"
    )]
    TransportTooLarge { units: u64, rows: usize, cols: usize },
    #[error("cost matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("cost matrix is {rows}x{cols}, multiplicities need {expected_rows}x{expected_cols}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("supplies total {supply} but demands total {demand}")]
    Unbalanced { supply: u64, demand: u64 },
}

/// Minimum over all permutations, with the first lexicographic argmin.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleAssignment {
    pub perm: Vec<usize>,
    pub cost: f64,
    pub exact_cost: Option<i128>,
}

/// Minimum over all feasible integer transport matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTransport {
    /// Nonzero cells `(i, j, units)` in row-major order.
    pub entries: Vec<(usize, usize, u64)>,
    pub cost: f64,
    pub exact_cost: Option<i128>,
    /// Matrices visited by the exhaustive search; useful as an audit trail.
    pub feasible_matrices: u64,
}

/// Exhaustive minimum-cost bijection over all N! permutations, N <= 9.
pub fn brute_force_assignment(cost: &CostMatrix) -> Result<OracleAssignment, OracleError> {
    if !cost.is_square() {
        return Err(OracleError::NotSquare {
            rows: cost.rows(),
            cols: cost.cols(),
        });
    }
    let n = cost.rows();
    if n > MAX_ORACLE_ASSIGNMENT {
        return Err(OracleError::AssignmentTooLarge { size: n });
    }

    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_cost = perm_cost(cost, &perm);
    while next_permutation(&mut perm) {
        let c = perm_cost(cost, &perm);
        if c < best_cost {
            best_cost = c;
            best.copy_from_slice(&perm);
        }
    }

    let exact_cost = all_entries_integral(cost).then(|| {
        best.iter()
            .enumerate()
            .map(|(p, &q)| cost.get(p, q) as i128)
            .sum()
    });
    Ok(OracleAssignment {
        perm: best,
        cost: best_cost,
        exact_cost,
    })
}

/// Exhaustive minimum over all nonnegative integer matrices with the given
/// row and column sums. Bounded to 12 total units and 12 cells.
pub fn brute_force_transport(
    src_mult: &[u64],
    dst_mult: &[u64],
    cost: &CostMatrix,
) -> Result<OracleTransport, OracleError> {
    let (m, n) = (src_mult.len(), dst_mult.len());
    if cost.rows() != m || cost.cols() != n {
        return Err(OracleError::ShapeMismatch {
            rows: cost.rows(),
            cols: cost.cols(),
            expected_rows: m,
            expected_cols: n,
        });
    }
    let supply: u64 = src_mult.iter().sum();
    let demand: u64 = dst_mult.iter().sum();
    if supply != demand {
        return Err(OracleError::Unbalanced { supply, demand });
    }
    if supply > MAX_ORACLE_UNITS || m * n > MAX_ORACLE_CELLS {
        return Err(OracleError::TransportTooLarge {
            units: supply,
            rows: m,
            cols: n,
        });
    }

    let mut search = TransportSearch {
        cost,
        src_mult,
        matrix: vec![vec![0u64; n]; m],
        remaining: dst_mult.to_vec(),
        best: None,
        best_cost: f64::INFINITY,
        feasible: 0,
    };
    search.fill_row(0);
    let TransportSearch { best, best_cost, feasible, .. } = search;
    let best = best.expect("balanced nonnegative sums always admit a feasible matrix");

    let mut entries = Vec::new();
    for (i, row) in best.iter().enumerate() {
        for (j, &units) in row.iter().enumerate() {
            if units > 0 {
                entries.push((i, j, units));
            }
        }
    }
    let exact_cost = all_entries_integral(cost).then(|| {
        entries
            .iter()
            .map(|&(i, j, units)| units as i128 * cost.get(i, j) as i128)
            .sum()
    });
    Ok(OracleTransport {
        entries,
        cost: best_cost,
        exact_cost,
        feasible_matrices: feasible,
    })
}

struct TransportSearch<'a> {
    cost: &'a CostMatrix,
    src_mult: &'a [u64],
    matrix: Vec<Vec<u64>>,
    remaining: Vec<u64>,
    best: Option<Vec<Vec<u64>>>,
    best_cost: f64,
    feasible: u64,
}

impl TransportSearch<'_> {
    fn fill_row(&mut self, i: usize) {
        if i == self.src_mult.len() {
            // Row sums are exact by construction and remaining demands are
            // nonnegative with total zero, so the matrix is feasible.
            self.feasible += 1;
            let c = self.matrix_cost();
            if c < self.best_cost {
                self.best_cost = c;
                self.best = Some(self.matrix.clone());
            }
            return;
        }
        self.fill_cell(i, 0, self.src_mult[i]);
    }

    fn fill_cell(&mut self, i: usize, j: usize, left: u64) {
        let n = self.remaining.len();
        if j == n - 1 {
            if left <= self.remaining[j] {
                self.matrix[i][j] = left;
                self.remaining[j] -= left;
                self.fill_row(i + 1);
                self.remaining[j] += left;
                self.matrix[i][j] = 0;
            }
            return;
        }
        for units in 0..=left.min(self.remaining[j]) {
            self.matrix[i][j] = units;
            self.remaining[j] -= units;
            self.fill_cell(i, j + 1, left - units);
            self.remaining[j] += units;
            self.matrix[i][j] = 0;
        }
    }

    fn matrix_cost(&self) -> f64 {
        let mut total = 0.0;
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, &units) in row.iter().enumerate() {
                total += units as f64 * self.cost.get(i, j);
            }
        }
        total
    }
}

fn perm_cost(cost: &CostMatrix, perm: &[usize]) -> f64 {
    perm.iter()
        .enumerate()
        .map(|(p, &q)| cost.get(p, q))
        .sum()
}

fn all_entries_integral(cost: &CostMatrix) -> bool {
    const EXACT: f64 = 9e15;
    (0..cost.rows()).all(|i| {
        (0..cost.cols()).all(|j| {
            let v = cost.get(i, j);
            v.is_finite() && v.fract() == 0.0 && v.abs() <= EXACT
        })
    })
}

/// Standard next-permutation step; false once `perm` is the last (descending)
/// arrangement.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}
