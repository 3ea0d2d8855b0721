//! Dense phase-1 simplex for equality feasibility with Bland's rule.
//!
//! Decides whether `A x = b, x >= 0` has a solution. Feasible systems yield
//! the solution; infeasible systems yield a Farkas certificate `y` with
//! `yᵀA <= 0` and `yᵀb > 0`, read from the phase-1 dual.

use crate::error::{Error, Result};

pub(crate) enum Phase1Outcome {
    Feasible(Vec<f64>),
    Infeasible {
        /// Farkas dual in the original row orientation.
        dual: Vec<f64>,
        /// Residual phase-1 objective, equals `yᵀb`.
        objective: f64,
    },
}

const MAX_ITERATIONS: usize = 2_000_000;

pub(crate) fn solve_equality_feasibility(
    a: &[Vec<f64>],
    b: &[f64],
    pivot_tol: f64,
) -> Result<Phase1Outcome> {
    let m = a.len();
    assert_eq!(b.len(), m, "rhs length must match row count");
    let n = a.first().map_or(0, Vec::len);

    // orient rows so the rhs is nonnegative
    let flip: Vec<f64> = b
        .iter()
        .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
        .collect();

    // tableau columns: n structural, m artificial, 1 rhs
    let cols = n + m + 1;
    let mut t: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = vec![0.0; cols];
            for j in 0..n {
                row[j] = flip[i] * a[i][j];
            }
            row[n + i] = 1.0;
            row[cols - 1] = flip[i] * b[i];
            row
        })
        .collect();

    // phase-1 reduced costs with the artificial basis: c_j - sum of rows
    let mut cost = vec![0.0; cols];
    for j in 0..n {
        cost[j] = -t.iter().map(|row| row[j]).sum::<f64>();
    }
    cost[cols - 1] = -t.iter().map(|row| row[cols - 1]).sum::<f64>();

    let mut basis: Vec<usize> = (n..n + m).collect();

    let mut optimal = false;
    for _ in 0..MAX_ITERATIONS {
        // Bland: smallest-index improving column
        let Some(enter) = (0..n + m).find(|&j| cost[j] < -pivot_tol) else {
            optimal = true;
            break;
        };
        // ratio test; ties go to the smallest basic variable (Bland)
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let pivot = t[i][enter];
            if pivot > pivot_tol {
                let ratio = t[i][cols - 1] / pivot;
                let better = match leave {
                    None => true,
                    Some((row, best)) => {
                        ratio < best - pivot_tol
                            || (ratio < best + pivot_tol && basis[i] < basis[row])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            // phase-1 objective is bounded below by zero; no leaving row
            // means the numerics degenerated
            return Err(Error::SimplexStalled);
        };
        // Gauss-Jordan pivot
        let pivot = t[row][enter];
        for v in t[row].iter_mut() {
            *v /= pivot;
        }
        for i in 0..m {
            if i != row {
                let factor = t[i][enter];
                if factor != 0.0 {
                    let (pivot_row, target) = if i < row {
                        let (lo, hi) = t.split_at_mut(row);
                        (&hi[0], &mut lo[i])
                    } else {
                        let (lo, hi) = t.split_at_mut(i);
                        (&lo[row], &mut hi[0])
                    };
                    for (tv, pv) in target.iter_mut().zip(pivot_row.iter()) {
                        *tv -= factor * pv;
                    }
                }
            }
        }
        let factor = cost[enter];
        if factor != 0.0 {
            for (cv, pv) in cost.iter_mut().zip(t[row].iter()) {
                *cv -= factor * pv;
            }
        }
        basis[row] = enter;
    }

    if !optimal {
        return Err(Error::SimplexStalled);
    }
    let objective = -cost[cols - 1];
    if objective <= pivot_tol {
        let mut x = vec![0.0; n];
        for (i, &var) in basis.iter().enumerate() {
            if var < n {
                x[var] = t[i][cols - 1].max(0.0);
            }
        }
        Ok(Phase1Outcome::Feasible(x))
    } else {
        // reduced cost of artificial i is 1 - y_i in the flipped system
        let dual: Vec<f64> = (0..m).map(|i| flip[i] * (1.0 - cost[n + i])).collect();
        Ok(Phase1Outcome::Infeasible { dual, objective })
    }
}
