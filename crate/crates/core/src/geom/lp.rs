//! Dense two-phase simplex for the tiny programs arising in fiber tests.
//!
//! Problems are stated as `maximize c·x subject to A x = b, x >= 0`. Sizes
//! here are a handful of rows and at most a few dozen columns, so the
//! tableau is rebuilt naively and Bland's rule is used throughout.

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, x: Vec<f64> },
    Infeasible { residual: f64 },
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
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
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations for `cost` over the columns allowed by
    /// `enterable`. Returns false if unbounded.
    fn optimize(&mut self, cost: &[f64], enterable: usize) -> bool {
        let m = self.rows.len();
        for _ in 0..10_000 {
            let mut entering = None;
            for j in 0..enterable {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j];
                for i in 0..m {
                    d -= cost[self.basis[i]] * self.rows[i][j];
                }
                if d > 1e-11 {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.rows[i][c];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    match leave {
                        None => leave = Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-15
                                || (ratio <= lr + 1e-15 && self.basis[i] < self.basis[li])
                            {
                                leave = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
        true
    }
}

/// Solve `max c·x, A x = b, x >= 0`. A program whose phase-one residual
/// (sum of artificial variables) exceeds `feas_tol` is reported infeasible.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64], feas_tol: f64) -> LpOutcome {
    let m = a.len();
    let nvar = c.len();
    let width = nvar + m;
    let mut rows = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut r = vec![0.0; width + 1];
        for j in 0..nvar {
            r[j] = sign * row[j];
        }
        r[nvar + i] = 1.0;
        r[width] = sign * b[i];
        rows.push(r);
    }
    let mut t = Tableau { rows, basis: (nvar..width).collect(), width };

    let mut phase1 = vec![0.0; width];
    for v in phase1.iter_mut().skip(nvar) {
        *v = -1.0;
    }
    t.optimize(&phase1, width);
    let residual: f64 = (0..m).filter(|&i| t.basis[i] >= nvar).map(|i| t.rhs(i)).sum();
    if residual > feas_tol {
        return LpOutcome::Infeasible { residual };
    }
    // drive zero-valued artificials out of the basis where possible
    for i in 0..m {
        if t.basis[i] >= nvar {
            if let Some(j) = (0..nvar).find(|&j| t.rows[i][j].abs() > 1e-9 && !t.basis.contains(&j)) {
                t.pivot(i, j);
            }
        }
    }

    let mut phase2 = vec![0.0; width];
    phase2[..nvar].copy_from_slice(c);
    if !t.optimize(&phase2, nvar) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; nvar];
    for i in 0..m {
        if t.basis[i] < nvar {
            x[t.basis[i]] = t.rhs(i);
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { value, x }
}
