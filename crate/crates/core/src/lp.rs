//! Exact primal simplex for packing programs `max c·x, A x <= b, x >= 0`
//! with `b >= 0`, so the origin is a feasible starting basis.
//!
//! Pivoting follows Bland's smallest-index rule, which rules out cycling on
//! the heavily degenerate subset-constraint systems solved here.

use crate::value::Value;

/// An optimal solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpSolution {
    pub x: Vec<Value>,
    pub objective: Value,
}

/// Why a program could not be solved.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("right-hand side {0} is negative")]
    NegativeRhs(usize),
    #[error("row {0} has the wrong number of coefficients")]
    Shape(usize),
    #[error("objective is unbounded")]
    Unbounded,
}

/// Maximizes `objective · x` subject to `rows[r] · x <= rhs[r]` and `x >= 0`.
pub fn maximize(objective: &[Value], rows: &[Vec<Value>], rhs: &[Value]) -> Result<LpSolution, LpError> {
    let n = objective.len();
    let r = rows.len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(LpError::Shape(i));
        }
        if rhs[i].is_negative() {
            return Err(LpError::NegativeRhs(i));
        }
    }
    // Variable ids: structural 0..n, slack n..n+r.
    let mut nonbasic: Vec<usize> = (0..n).collect();
    let mut basic: Vec<usize> = (n..n + r).collect();
    let mut a: Vec<Vec<Value>> = rows.to_vec();
    let mut b: Vec<Value> = rhs.to_vec();
    let mut obj: Vec<Value> = objective.to_vec();
    let mut z = Value::zero();

    loop {
        let entering = (0..n)
            .filter(|&c| obj[c].is_positive())
            .min_by_key(|&c| nonbasic[c]);
        let Some(c) = entering else { break };

        let mut leave: Option<(usize, Value)> = None;
        for row in 0..r {
            if !a[row][c].is_positive() {
                continue;
            }
            let ratio = &b[row] / &a[row][c];
            let better = match &leave {
                None => true,
                Some((best, best_ratio)) => {
                    ratio < *best_ratio || (ratio == *best_ratio && basic[row] < basic[*best])
                }
            };
            if better {
                leave = Some((row, ratio));
            }
        }
        let Some((pr, _)) = leave else { return Err(LpError::Unbounded) };

        let pivot = a[pr][c].clone();
        let inv = Value::one() / &pivot;
        for col in 0..n {
            if col == c {
                a[pr][col] = inv.clone();
            } else if !a[pr][col].is_zero() {
                a[pr][col] = &a[pr][col] / &pivot;
            }
        }
        b[pr] = &b[pr] / &pivot;
        let prow = a[pr].clone();
        let pb = b[pr].clone();

        for row in 0..r {
            if row == pr || a[row][c].is_zero() {
                continue;
            }
            let factor = a[row][c].clone();
            for col in 0..n {
                if col == c {
                    a[row][col] = -(&factor * &prow[col]);
                } else if !prow[col].is_zero() {
                    a[row][col] = &a[row][col] - &(&factor * &prow[col]);
                }
            }
            b[row] = &b[row] - &(&factor * &pb);
        }
        let factor = obj[c].clone();
        for col in 0..n {
            if col == c {
                obj[col] = -(&factor * &prow[col]);
            } else if !prow[col].is_zero() {
                obj[col] = &obj[col] - &(&factor * &prow[col]);
            }
        }
        z = &z + &(&factor * &pb);

        std::mem::swap(&mut nonbasic[c], &mut basic[pr]);
    }

    let mut x = vec![Value::zero(); n];
    for (row, &var) in basic.iter().enumerate() {
        if var < n {
            x[var] = b[row].clone();
        }
    }
    Ok(LpSolution { x, objective: z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::q;

    fn v(n: i64) -> Value {
        Value::from_int(n)
    }

    #[test]
    fn textbook_program() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
        let sol = maximize(
            &[v(3), v(2)],
            &[vec![v(1), v(1)], vec![v(1), v(3)], vec![v(1), v(0)]],
            &[v(4), v(6), v(3)],
        )
        .unwrap();
        assert_eq!(sol.objective, v(11));
        assert_eq!(sol.x, vec![v(3), v(1)]);
    }

    #[test]
    fn fractional_vertex() {
        // max x + y, 2x + y <= 1, x + 2y <= 1
        let sol = maximize(&[v(1), v(1)], &[vec![v(2), v(1)], vec![v(1), v(2)]], &[v(1), v(1)]).unwrap();
        assert_eq!(sol.objective, q(2, 3));
        assert_eq!(sol.x, vec![q(1, 3), q(1, 3)]);
    }

    #[test]
    fn unbounded_detected() {
        assert_eq!(maximize(&[v(1)], &[vec![v(-1)]], &[v(1)]), Err(LpError::Unbounded));
    }

    #[test]
    fn degenerate_program_terminates() {
        // Every nonempty subset of 4 variables capped at 1.
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for mask in 1u32..16 {
            rows.push((0..4).map(|j| v(((mask >> j) & 1) as i64)).collect());
            rhs.push(v(1));
        }
        let sol = maximize(&vec![v(1); 4], &rows, &rhs).unwrap();
        assert_eq!(sol.objective, v(1));
    }
}
