//! Shortest-augmenting-path assignment solver with dual potentials
//! (Jonker-Volgenant style), O(N^3) worst case.

use super::{Assignment, CostMatrix, SolverError};

/// Exact minimum-cost bijection on a square finite matrix, N >= 1.
///
/// Deterministic for a fixed input; ties resolve by scan order. Negative
/// entries are shifted out per row first, which moves every permutation's
/// total by the same constant and so preserves the argmin. The reported cost
/// is re-accumulated from the original matrix.
pub fn solve_assignment(cost: &CostMatrix) -> Result<Assignment, SolverError> {
    if !cost.is_square() {
        return Err(SolverError::NotSquare {
            rows: cost.rows(),
            cols: cost.cols(),
        });
    }
    if let Some((row, col)) = cost.first_non_finite() {
        return Err(SolverError::NonFinite { row, col });
    }
    let n = cost.rows();

    let mut shifted = vec![0.0f64; n * n];
    for i in 0..n {
        let row_min = (0..n).map(|j| cost.get(i, j)).fold(f64::INFINITY, f64::min);
        let shift = row_min.min(0.0);
        for j in 0..n {
            shifted[i * n + j] = cost.get(i, j) - shift;
        }
    }

    // 1-indexed arrays with a virtual column 0; matched[j] is the row
    // assigned to column j, 0 meaning free. Potentials u (rows) and v
    // (columns) keep reduced costs of matched rows nonnegative, so each
    // augmentation is a Dijkstra pass over columns.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let reduced = shifted[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if reduced < minv[j] {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        // Walk the alternating path back, flipping matches.
        while j0 != 0 {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
        }
    }

    let mut perm = vec![usize::MAX; n];
    for j in 1..=n {
        perm[matched[j] - 1] = j - 1;
    }

    let total: f64 = perm
        .iter()
        .enumerate()
        .map(|(p, &q)| cost.get(p, q))
        .sum();
    let exact_cost = cost.is_integral().then(|| {
        perm.iter()
            .enumerate()
            .map(|(p, &q)| cost.get(p, q) as i128)
            .sum()
    });
    Ok(Assignment {
        perm,
        cost: total,
        exact_cost,
    })
}
