//! Dense two-phase tableau simplex for `max c·x  s.t.  A x = b, x >= 0`
//! with Bland's anti-cycling rule on degenerate steps.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const EPS_COST: f64 = 1e-11;
const EPS_PIVOT: f64 = 1e-12;
const MAX_ITER: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSolution {
    pub x: Vec<f64>,
    pub value: f64,
    /// Basic column per surviving row; `None` for rows found redundant.
    pub basis: Vec<Option<usize>>,
    /// Row multipliers `c_B B^{-1}` in the original row orientation.
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimplexOutcome {
    Optimal(SimplexSolution),
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width - 1]
    }

    fn pivot(&mut self, r: usize, q: usize, cost: &mut [f64]) {
        let piv = self.rows[r][q];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[q];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * p;
                }
                row[q] = 0.0;
            }
        }
        let f = cost[q];
        if f != 0.0 {
            for (v, p) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * p;
            }
            cost[q] = 0.0;
        }
        self.basis[r] = q;
    }

    /// Pivots on `cost` (reduced costs; last slot holds the negated
    /// objective) until optimal. Only columns `< allowed` may enter.
    /// Entering columns follow the largest reduced cost; after a degenerate
    /// pivot Bland's rule takes over until the objective moves again.
    fn optimize(&mut self, cost: &mut [f64], allowed: usize) -> Result<bool> {
        let mut bland = false;
        for _ in 0..MAX_ITER {
            let entering = if bland {
                (0..allowed).find(|&j| cost[j] > EPS_COST)
            } else {
                (0..allowed)
                    .filter(|&j| cost[j] > EPS_COST)
                    .max_by(|&a, &b| cost[a].total_cmp(&cost[b]).then(b.cmp(&a)))
            };
            let Some(q) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][q];
                if a <= EPS_PIVOT {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie || tie && self.basis[i] < self.basis[k] {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            let Some((r, step)) = leave else {
                return Ok(false);
            };
            bland = step <= 1e-12;
            self.pivot(r, q, cost);
        }
        Err(Error::Lp("simplex iteration limit reached".into()))
    }
}

/// `columns[j]` is column `j` of `A` (length = number of rows).
pub fn solve(columns: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<SimplexOutcome> {
    let m = b.len();
    let ncols = columns.len();
    if c.len() != ncols || columns.iter().any(|col| col.len() != m) {
        return Err(Error::Lp("inconsistent problem dimensions".into()));
    }
    let sign: Vec<f64> = b.iter().map(|v| if *v < 0.0 { -1.0 } else { 1.0 }).collect();
    let width = ncols + m + 1;
    let mut rows = vec![vec![0.0; width]; m];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, col) in columns.iter().enumerate() {
            row[j] = sign[i] * col[i];
        }
        row[ncols + i] = 1.0;
        row[width - 1] = sign[i] * b[i];
    }
    let mut tab = Tableau {
        rows,
        basis: (ncols..ncols + m).collect(),
        width,
    };

    // Phase I: maximize minus the sum of artificials.
    let mut cost = vec![0.0; width];
    for row in &tab.rows {
        for j in 0..ncols {
            cost[j] += row[j];
        }
        cost[width - 1] += row[width - 1];
    }
    tab.optimize(&mut cost, ncols + m)?;
    let infeasibility: f64 = (0..m)
        .filter(|&i| tab.basis[i] >= ncols)
        .map(|i| tab.rhs(i))
        .sum();
    if infeasibility > 1e-9 {
        return Ok(SimplexOutcome::Infeasible);
    }

    // Drive artificials out; rows where that fails are redundant.
    let mut redundant = vec![false; m];
    for i in 0..m {
        if tab.basis[i] < ncols {
            continue;
        }
        let q = (0..ncols)
            .filter(|&j| tab.rows[i][j].abs() > 1e-9)
            .max_by(|&a, &b| tab.rows[i][a].abs().total_cmp(&tab.rows[i][b].abs()));
        match q {
            Some(q) => tab.pivot(i, q, &mut cost),
            None => redundant[i] = true,
        }
    }

    // Phase II.
    let mut cost = vec![0.0; width];
    cost[..ncols].copy_from_slice(c);
    for i in 0..m {
        if redundant[i] {
            continue;
        }
        let cb = c[tab.basis[i]];
        if cb != 0.0 {
            for (v, a) in cost.iter_mut().zip(&tab.rows[i]) {
                *v -= cb * a;
            }
        }
    }
    for r in 0..m {
        if redundant[r] {
            // keep the dead artificial out of the ratio test
            tab.rows[r].iter_mut().for_each(|v| *v = 0.0);
        }
    }
    if !tab.optimize(&mut cost, ncols)? {
        return Ok(SimplexOutcome::Unbounded);
    }

    let mut x = vec![0.0; ncols];
    for i in 0..m {
        if !redundant[i] {
            x[tab.basis[i]] = tab.rhs(i).max(0.0);
        }
    }
    let value = x.iter().zip(c).map(|(a, b)| a * b).sum();

    let live: Vec<usize> = (0..m).filter(|&i| !redundant[i]).collect();
    let k = live.len();
    let mut bt = DMatrix::<f64>::zeros(k, k);
    let mut cb = DVector::<f64>::zeros(k);
    for (col, &i) in live.iter().enumerate() {
        let j = tab.basis[i];
        cb[col] = c[j];
        for (row, &r) in live.iter().enumerate() {
            // transpose of B restricted to live rows
            bt[(col, row)] = columns[j][r];
        }
    }
    let pi = if k == 0 {
        DVector::zeros(0)
    } else {
        bt.lu().solve(&cb).ok_or(Error::Singular)?
    };
    let mut duals = vec![0.0; m];
    for (row, &i) in live.iter().enumerate() {
        duals[i] = pi[row];
    }
    let basis = (0..m)
        .map(|i| (!redundant[i]).then_some(tab.basis[i]))
        .collect();
    Ok(SimplexOutcome::Optimal(SimplexSolution {
        x,
        value,
        basis,
        duals,
    }))
}
