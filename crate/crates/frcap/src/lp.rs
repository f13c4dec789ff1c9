//! A small dense linear-program solver for equality-constrained problems
//!
//! ```text
//!     maximize  c . w    subject to    A w = b,  w >= 0.
//! ```
//!
//! The discretization oracle produces exactly this shape: a few equality
//! rows (the state coordinates plus total mass) over thousands of columns
//! (the sampled extreme points). A two-phase primal simplex with Bland's
//! rule is plenty: the basis never exceeds the row count, which stays tiny.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LpOutcome {
    Optimal { objective: f64, solution: Vec<f64> },
    Infeasible,
    Unbounded,
    Stalled,
}

const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-11;

/// Solves `max c.w : A w = b, w >= 0` where `a` is row-major `m x n`.
pub(crate) fn solve_equality_lp(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    debug_assert!(a.iter().all(|row| row.len() == n));
    debug_assert_eq!(b.len(), m);

    // Tableau with artificial variables appended: columns [0, n) are real,
    // [n, n + m) artificial. Rows are scaled so the right-hand side is >= 0.
    let mut tableau: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row: Vec<f64> = a[i].iter().map(|v| sign * v).collect();
        row.extend((0..m).map(|j| if j == i { 1.0 } else { 0.0 }));
        tableau.push(row);
        rhs[i] = sign * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: drive the artificial mass to zero.
    let phase1_cost: Vec<f64> = (0..n + m).map(|j| if j < n { 0.0 } else { -1.0 }).collect();
    match run_simplex(&mut tableau, &mut rhs, &mut basis, &phase1_cost, n + m) {
        SimplexStatus::Optimal => {}
        // Phase 1 is bounded by construction; a breakdown is a stall.
        SimplexStatus::Unbounded | SimplexStatus::Stalled => return LpOutcome::Stalled,
    }
    let artificial_mass: f64 = basis
        .iter()
        .zip(&rhs)
        .filter(|(&j, _)| j >= n)
        .map(|(_, &v)| v)
        .sum();
    if artificial_mass > FEAS_TOL {
        return LpOutcome::Infeasible;
    }

    // Pivot any residual zero-level artificials out of the basis when a real
    // column can replace them; rows with no such column are redundant and
    // stay harmlessly at level zero.
    for row in 0..m {
        if basis[row] >= n {
            if let Some(col) = (0..n).find(|&j| tableau[row][j].abs() > 1e-7) {
                pivot(&mut tableau, &mut rhs, &mut basis, row, col);
            }
        }
    }

    // Phase 2 on the real objective; artificial columns are frozen out.
    let mut phase2_cost = vec![0.0; n + m];
    phase2_cost[..n].copy_from_slice(c);
    match run_simplex(&mut tableau, &mut rhs, &mut basis, &phase2_cost, n) {
        SimplexStatus::Optimal => {}
        SimplexStatus::Unbounded => return LpOutcome::Unbounded,
        SimplexStatus::Stalled => return LpOutcome::Stalled,
    }

    let mut solution = vec![0.0; n];
    for (row, &col) in basis.iter().enumerate() {
        if col < n {
            solution[col] = rhs[row];
        }
    }
    let objective = solution.iter().zip(c).map(|(w, ci)| w * ci).sum();
    LpOutcome::Optimal {
        objective,
        solution,
    }
}

enum SimplexStatus {
    Optimal,
    Unbounded,
    Stalled,
}

/// Primal simplex over columns `[0, col_limit)`. Dantzig pricing for speed,
/// switching to Bland's rule after a while so degenerate cycles cannot spin
/// forever.
fn run_simplex(
    tableau: &mut [Vec<f64>],
    rhs: &mut [f64],
    basis: &mut [usize],
    cost: &[f64],
    col_limit: usize,
) -> SimplexStatus {
    let m = tableau.len();
    let bland_after = 500;
    let max_iterations = 100_000;

    for iteration in 0..max_iterations {
        let bland = iteration >= bland_after;
        // Reduced costs: c_j - y . A_j. The tableau stays canonical, so the
        // dual price of row i is cost[basis[i]].
        let dual: Vec<f64> = basis.iter().map(|&j| cost[j]).collect();
        let mut entering: Option<(usize, f64)> = None;
        for j in 0..col_limit {
            if basis.contains(&j) {
                continue;
            }
            let mut reduced = cost[j];
            for i in 0..m {
                let t = tableau[i][j];
                if t != 0.0 {
                    reduced -= dual[i] * t;
                }
            }
            if reduced > 1e-9 {
                if bland {
                    entering = Some((j, reduced));
                    break;
                }
                if entering.is_none_or(|(_, best)| reduced > best) {
                    entering = Some((j, reduced));
                }
            }
        }
        let Some((col, _)) = entering else {
            return SimplexStatus::Optimal;
        };

        // Ratio test; ties toward the smallest basis index keep Bland exact.
        let mut leaving: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            if tableau[i][col] > PIVOT_TOL {
                let ratio = rhs[i] / tableau[i][col];
                let better = ratio < best_ratio - 1e-12
                    || (ratio < best_ratio + 1e-12 && leaving.is_none_or(|l| basis[i] < basis[l]));
                if better {
                    best_ratio = ratio;
                    leaving = Some(i);
                }
            }
        }
        let Some(row) = leaving else {
            return SimplexStatus::Unbounded;
        };
        pivot(tableau, rhs, basis, row, col);
    }
    SimplexStatus::Stalled
}

fn pivot(tableau: &mut [Vec<f64>], rhs: &mut [f64], basis: &mut [usize], row: usize, col: usize) {
    let m = tableau.len();
    let width = tableau[0].len();
    let factor = tableau[row][col];
    for j in 0..width {
        tableau[row][j] /= factor;
    }
    rhs[row] /= factor;
    for i in 0..m {
        if i != row && tableau[i][col].abs() > 0.0 {
            let scale = tableau[i][col];
            for j in 0..width {
                tableau[i][j] -= scale * tableau[row][j];
            }
            rhs[i] -= scale * rhs[row];
            rhs[i] = rhs[i].max(0.0);
        }
    }
    basis[row] = col;
}
