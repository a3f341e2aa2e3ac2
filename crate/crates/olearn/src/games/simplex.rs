//! Exact rational simplex for binary zero-sum games.
//!
//! After shifting every payoff by +1 (entries become 1 or 2, so the value is
//! strictly positive), the row player's optimal strategy solves
//!
//! ```text
//! maximize sum(x)  subject to  (M+1)^T x <= 1,  x >= 0,
//! ```
//!
//! whose optimum is `1 / (v+1)`; the column player's strategy is the dual
//! solution, read off the slack reduced costs at the optimal tableau.
//! Bland's rule keeps the exact-arithmetic pivoting finite.

use num_traits::Zero;

use crate::{rat_int, Rat};

use super::GameMatrix;

/// Optimal `(row_strategy, col_strategy)` as dense probability vectors.
/// Both are exact; the implied duality gap is zero.
pub fn solve_zero_sum(m: &GameMatrix) -> (Vec<Rat>, Vec<Rat>) {
    let r = m.rows();
    let c = m.cols();
    let width = r + c + 1; // variables (rows), slacks (columns), rhs

    // Constraint j of the tableau: column j of the shifted game.
    let mut tab: Vec<Vec<Rat>> = (0..c)
        .map(|j| {
            let mut row = Vec::with_capacity(width);
            for i in 0..r {
                row.push(rat_int(1 + i64::from(m.at(i, j))));
            }
            for k in 0..c {
                row.push(rat_int(i64::from(k == j)));
            }
            row.push(rat_int(1));
            row
        })
        .collect();
    // Objective row in reduced-cost form: positive entry = improving column.
    let mut obj: Vec<Rat> = (0..width).map(|j| rat_int(i64::from(j < r))).collect();
    let mut basis: Vec<usize> = (r..r + c).collect();

    // Bland's rule: enter the smallest improving variable, break ratio-test
    // ties toward the smallest basis variable. Anti-cycling, so the exact
    // pivoting terminates.
    while let Some(enter) = (0..r + c).find(|&j| obj[j] > Rat::zero()) {
        let mut leave: Option<usize> = None;
        let mut best: Option<Rat> = None;
        for i in 0..c {
            if tab[i][enter] > Rat::zero() {
                let ratio = &tab[i][width - 1] / &tab[i][enter];
                let better = match &best {
                    None => true,
                    Some(b) => ratio < *b || (ratio == *b && basis[i] < basis[leave.unwrap()]),
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let leave = leave.expect("game LP is bounded: every column has positive entries");

        // Pivot.
        let pivot = tab[leave][enter].clone();
        for v in tab[leave].iter_mut() {
            *v /= &pivot;
        }
        let pivot_row = tab[leave].clone();
        for (i, row) in tab.iter_mut().enumerate() {
            if i != leave && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, t) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * t;
                }
            }
        }
        if !obj[enter].is_zero() {
            let f = obj[enter].clone();
            for (o, t) in obj.iter_mut().zip(&tab[leave]) {
                *o -= &f * t;
            }
        }
        basis[leave] = enter;
    }

    // Primal solution: x over the row-player variables.
    let mut x = vec![Rat::zero(); r];
    for i in 0..c {
        if basis[i] < r {
            x[basis[i]] = tab[i][width - 1].clone();
        }
    }
    // Dual solution from the slack reduced costs.
    let y: Vec<Rat> = (0..c).map(|j| -obj[r + j].clone()).collect();

    let sum_x: Rat = x.iter().sum();
    let sum_y: Rat = y.iter().sum();
    debug_assert!(!sum_x.is_zero());
    debug_assert_eq!(sum_x, sum_y, "strong duality must hold exactly");

    let p: Vec<Rat> = x.into_iter().map(|v| v / &sum_x).collect();
    let q: Vec<Rat> = y.into_iter().map(|v| v / &sum_y).collect();
    (p, q)
}
