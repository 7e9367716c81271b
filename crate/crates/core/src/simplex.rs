//! Dense two-phase primal simplex for standard-form linear programs
//!
//! ```text
//! maximize  c . x   subject to   A x = b,  x >= 0
//! ```
//!
//! Phase one minimizes the sum of one artificial variable per row; phase two
//! optimizes `c` from the feasible basis it leaves behind. Entering and
//! leaving variables follow Bland's smallest-index rule, so the method cannot
//! cycle on degenerate vertices (transport-style problems are full of them).

use crate::error::{Error, Result};

/// Entries with magnitude at or below this are never used as pivots.
pub const PIVOT_TOL: f64 = 1e-10;

/// Phase-one residual above which the program is declared infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StandardLp {
    pub objective: Vec<f64>,
    pub constraints: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    /// Smallest achievable `sum |A x - b|` found by phase one.
    Infeasible { residual: f64 },
    Unbounded,
}

struct Tableau {
    // rows x (cols + 1); last column is the right-hand side
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * pv;
                }
                row[c] = 0.0;
            }
        }
        // rounding can push a degenerate right-hand side slightly negative
        for row in self.rows.iter_mut() {
            let last = row.len() - 1;
            if row[last] < 0.0 && row[last] > -PIVOT_TOL {
                row[last] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost . x` over columns for which `allowed` holds.
    /// Returns `false` if the objective is unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: impl Fn(usize) -> bool) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let reduced = cost[j]
                    - self
                        .rows
                        .iter()
                        .zip(&self.basis)
                        .map(|(row, &b)| cost[b] * row[j])
                        .sum::<f64>();
                if reduced > PIVOT_TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else {
                return true;
            };

            let mut best_ratio = f64::INFINITY;
            for (i, row) in self.rows.iter().enumerate() {
                if row[j] > PIVOT_TOL {
                    best_ratio = best_ratio.min(self.rhs(i) / row[j]);
                }
            }
            if best_ratio.is_infinite() {
                return false;
            }
            let leaving = (0..self.rows.len())
                .filter(|&i| {
                    self.rows[i][j] > PIVOT_TOL
                        && self.rhs(i) / self.rows[i][j] <= best_ratio + 1e-12
                })
                .min_by_key(|&i| self.basis[i])
                .expect("ratio test found a row");
            self.pivot(leaving, j);
        }
    }
}

pub fn solve(lp: &StandardLp) -> Result<LpOutcome> {
    let n = lp.objective.len();
    let m = lp.constraints.len();
    if lp.rhs.len() != m {
        return Err(Error::Dimension {
            expected: m,
            got: lp.rhs.len(),
        });
    }
    if let Some(row) = lp.constraints.iter().find(|r| r.len() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: row.len(),
        });
    }

    // columns: n structural, then m artificial
    let cols = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (a, &b)) in lp.constraints.iter().zip(&lp.rhs).enumerate() {
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; cols + 1];
        for (dst, &v) in row.iter_mut().zip(a) {
            *dst = sign * v;
        }
        row[n + i] = 1.0;
        row[cols] = sign * b;
        rows.push(row);
    }
    let mut tab = Tableau {
        rows,
        basis: (n..n + m).collect(),
        cols,
    };

    let phase_one: Vec<f64> = (0..cols).map(|j| if j < n { 0.0 } else { -1.0 }).collect();
    tab.optimize(&phase_one, |_| true);
    let residual: f64 = tab
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= n)
        .map(|(i, _)| tab.rhs(i))
        .sum();
    if residual > FEASIBILITY_TOL {
        return Ok(LpOutcome::Infeasible { residual });
    }

    // Drive remaining (zero-valued) artificials out of the basis; a row with no
    // usable structural pivot is a redundant constraint and is dropped.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| tab.rows[i][j].abs() > PIVOT_TOL) {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut phase_two = lp.objective.clone();
    phase_two.resize(cols, 0.0);
    if !tab.optimize(&phase_two, |j| j < n) {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs(i).max(0.0);
        }
    }
    let value = x.iter().zip(&lp.objective).map(|(a, b)| a * b).sum();
    Ok(LpOutcome::Optimal { x, value })
}
