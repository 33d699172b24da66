//! Small dense simplex solver for `maximize c·z  s.t.  G z <= h` with free
//! variables `z`, started from a caller-supplied feasible point.
//!
//! The solver works on a dictionary whose nonbasic set initially holds the
//! displacement `w = z - z0` and whose basis holds the row slacks. Free
//! variables may enter in either direction and never leave the basis once
//! they are in it. Dantzig pricing is used until the objective stalls, then
//! Bland's rule takes over to rule out cycling.

use crate::{Error, Result};

const PRICE_EPS: f64 = 1e-11;
const PIVOT_EPS: f64 = 1e-11;
const START_TOL: f64 = 1e-7;
const STALL_LIMIT: usize = 25;

#[derive(Clone, Debug)]
pub(crate) struct Lp {
    cols: usize,
    g: Vec<f64>,
    h: Vec<f64>,
}

impl Lp {
    pub(crate) fn new(cols: usize) -> Self {
        Self {
            cols,
            g: Vec::new(),
            h: Vec::new(),
        }
    }

    pub(crate) fn rows(&self) -> usize {
        self.h.len()
    }

    /// Adds `row · z <= rhs`. Rows are rescaled to unit norm; an all-zero
    /// row is kept only as a consistency check on `rhs`.
    pub(crate) fn push(&mut self, row: &[f64], rhs: f64) {
        debug_assert_eq!(row.len(), self.cols);
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            // 0 <= rhs; nothing to add when it holds
            if rhs >= 0.0 {
                return;
            }
            self.g.extend(std::iter::repeat(0.0).take(self.cols));
            self.h.push(rhs);
            return;
        }
        self.g.extend(row.iter().map(|v| v / norm));
        self.h.push(rhs / norm);
    }

    pub(crate) fn maximize(&self, objective: &[f64], start: &[f64]) -> Result<Vec<f64>> {
        let n = self.cols;
        let m = self.rows();
        debug_assert_eq!(objective.len(), n);
        debug_assert_eq!(start.len(), n);

        // basic_i = beta_i + sum_j a[i][j] * nonbasic_j
        let mut a = vec![0.0; m * n];
        let mut beta = vec![0.0; m];
        for i in 0..m {
            let gi = &self.g[i * n..(i + 1) * n];
            let slack = self.h[i] - dot(gi, start);
            if slack < -START_TOL {
                return Err(Error::LinearProgram(format!(
                    "start point violates row {i} by {:e}",
                    -slack
                )));
            }
            beta[i] = slack.max(0.0);
            for j in 0..n {
                a[i * n + j] = -gi[j];
            }
        }
        let mut d = objective.to_vec();
        // variable ids: 0..n are the free displacements, n.. are slacks
        let mut basis: Vec<usize> = (n..n + m).collect();
        let mut nonbasic: Vec<usize> = (0..n).collect();
        let is_free = |id: usize| id < n;

        let max_iter = 1000 + 50 * (m + n);
        let mut value = 0.0_f64;
        let mut stall = 0usize;
        let mut bland = false;

        for _ in 0..max_iter {
            // pricing
            let mut enter: Option<(usize, f64)> = None;
            let mut best = 0.0;
            for (j, &id) in nonbasic.iter().enumerate() {
                let dj = d[j];
                let dir = if is_free(id) {
                    if dj.abs() <= PRICE_EPS {
                        continue;
                    }
                    dj.signum()
                } else {
                    if dj <= PRICE_EPS {
                        continue;
                    }
                    1.0
                };
                if bland {
                    let better = match enter {
                        None => true,
                        Some((k, _)) => id < nonbasic[k],
                    };
                    if better {
                        enter = Some((j, dir));
                    }
                } else if dj.abs() > best {
                    best = dj.abs();
                    enter = Some((j, dir));
                }
            }
            let Some((col, dir)) = enter else {
                let mut w = vec![0.0; n];
                for (i, &id) in basis.iter().enumerate() {
                    if is_free(id) {
                        w[id] = beta[i];
                    }
                }
                return Ok(start.iter().zip(&w).map(|(s, w)| s + w).collect());
            };

            // ratio test over slack rows only
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                if is_free(basis[i]) {
                    continue;
                }
                let rate = dir * a[i * n + col];
                if rate < -PIVOT_EPS {
                    let step = beta[i].max(0.0) / -rate;
                    let better = match leave {
                        None => true,
                        Some((r, s)) => {
                            step < s - 1e-15 || (step <= s + 1e-15 && basis[i] < basis[r])
                        }
                    };
                    if better {
                        leave = Some((i, step));
                    }
                }
            }
            let Some((row, _)) = leave else {
                return Err(Error::LinearProgram("objective is unbounded".into()));
            };

            let before = value;
            pivot(&mut a, &mut beta, &mut d, &mut value, n, row, col);
            std::mem::swap(&mut basis[row], &mut nonbasic[col]);

            if value > before + 1e-13 * (1.0 + before.abs()) {
                stall = 0;
            } else {
                stall += 1;
                if stall > STALL_LIMIT {
                    bland = true;
                }
            }
        }
        Err(Error::LinearProgram(format!(
            "iteration limit ({max_iter}) reached"
        )))
    }
}

fn pivot(
    a: &mut [f64],
    beta: &mut [f64],
    d: &mut [f64],
    value: &mut f64,
    n: usize,
    row: usize,
    col: usize,
) {
    let m = beta.len();
    let arc = a[row * n + col];
    // solve the pivot row for the entering variable
    beta[row] = -beta[row] / arc;
    for k in 0..n {
        if k == col {
            a[row * n + k] = 1.0 / arc;
        } else {
            a[row * n + k] = -a[row * n + k] / arc;
        }
    }
    let (before, rest) = a.split_at_mut(row * n);
    let (pivot_row, after) = rest.split_at_mut(n);
    let beta_r = beta[row];
    for i in 0..m {
        if i == row {
            continue;
        }
        let other: &mut [f64] = if i < row {
            &mut before[i * n..(i + 1) * n]
        } else {
            let off = (i - row - 1) * n;
            &mut after[off..off + n]
        };
        let coef = other[col];
        if coef == 0.0 {
            continue;
        }
        beta[i] += coef * beta_r;
        for k in 0..n {
            if k == col {
                other[k] = coef * pivot_row[k];
            } else {
                other[k] += coef * pivot_row[k];
            }
        }
    }
    let coef = d[col];
    *value += coef * beta_r;
    for k in 0..n {
        if k == col {
            d[k] = coef * pivot_row[k];
        } else {
            d[k] += coef * pivot_row[k];
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
