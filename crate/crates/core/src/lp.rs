//! Small dense linear programs: two-phase tableau simplex with Bland's rule.
//!
//! Sizes here are tiny (tens of variables), so the dense tableau is fine and
//! Bland's rule keeps pivoting deterministic and cycle-free.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize c·x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram { objective, constraints: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.objective.len();
        if n == 0 {
            return Err(Error::Lp("no decision variables".into()));
        }
        for (r, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(Error::Lp(format!("constraint {r} has {} coefficients, expected {n}", c.coeffs.len())));
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::Lp(format!("constraint {r} is not finite")));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::Lp("objective is not finite".into()));
        }
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau {
    /// `rows[i]` has `cols + 1` entries, the last being the right-hand side.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    n: usize,
    cols: usize,
    first_artificial: usize,
    pivots: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.objective.len();
        let m = lp.constraints.len();
        // normalize to rhs >= 0
        let norm: Vec<(Vec<f64>, Relation, f64)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs < 0.0 {
                    let rel = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|v| -v).collect(), rel, -c.rhs)
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs)
                }
            })
            .collect();
        let slacks = norm.iter().filter(|c| c.1 != Relation::Eq).count();
        let artificials = norm.iter().filter(|c| c.1 != Relation::Le).count();
        let first_artificial = n + slacks;
        let cols = first_artificial + artificials;
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut s, mut a) = (n, first_artificial);
        for (coeffs, rel, rhs) in norm {
            let mut row = vec![0.0; cols + 1];
            row[..n].copy_from_slice(&coeffs);
            row[cols] = rhs;
            match rel {
                Relation::Le => {
                    row[s] = 1.0;
                    basis.push(s);
                    s += 1;
                }
                Relation::Ge => {
                    row[s] = -1.0;
                    s += 1;
                    row[a] = 1.0;
                    basis.push(a);
                    a += 1;
                }
                Relation::Eq => {
                    row[a] = 1.0;
                    basis.push(a);
                    a += 1;
                }
            }
            rows.push(row);
        }
        Tableau { rows, basis, n, cols, first_artificial, pivots: 0 }
    }

    fn run(mut self, objective: &[f64]) -> Result<LpSolution> {
        if self.first_artificial < self.cols {
            let mut cost = vec![0.0; self.cols];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = -1.0;
            }
            let value = self.optimize(&cost, self.cols)?;
            let scale = self.rows.iter().map(|r| r[self.cols].abs()).fold(1.0, f64::max);
            if value < -1e-9 * scale {
                return Err(Error::Infeasible(format!("linear program has no feasible point (phase-one value {value:e})")));
            }
            self.drive_out_artificials();
        }
        let mut cost = vec![0.0; self.cols];
        cost[..self.n].copy_from_slice(objective);
        let value = self.optimize(&cost, self.first_artificial)?;
        let mut x = vec![0.0; self.n];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if b < self.n {
                x[b] = row[self.cols].max(0.0);
            }
        }
        Ok(LpSolution { x, objective: value, pivots: self.pivots })
    }

    /// Maximizes `cost·x` using only columns below `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<f64> {
        let cols = self.cols;
        let mut z = vec![0.0; cols + 1];
        for j in 0..cols {
            z[j] = -cost[j];
        }
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let f = z[b];
            if f != 0.0 {
                for (zj, rj) in z.iter_mut().zip(row) {
                    *zj -= f * rj;
                }
            }
        }
        loop {
            let Some(enter) = (0..allowed).find(|&j| z[j] < -PIVOT_EPS) else {
                return Ok(z[cols]);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[enter] > PIVOT_EPS {
                    let ratio = row[cols] / row[enter];
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - PIVOT_EPS || (ratio <= lr + PIVOT_EPS && self.basis[i] < self.basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((leave, _)) = leave else {
                return Err(Error::Lp("objective is unbounded".into()));
            };
            self.pivot(leave, enter);
            let f = z[enter];
            for (zj, rj) in z.iter_mut().zip(&self.rows[leave]) {
                *zj -= f * rj;
            }
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Lp(format!("no convergence after {MAX_PIVOTS} pivots")));
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        self.pivots += 1;
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                let f = row[c];
                if f != 0.0 {
                    for (v, pv) in row.iter_mut().zip(&pivot_row) {
                        *v -= f * pv;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Pivots zero-level artificials out of the basis; drops redundant rows.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.first_artificial {
                match (0..self.first_artificial).find(|&j| self.rows[i][j].abs() > 1e-9) {
                    Some(j) => self.pivot(i, j),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(vec![3.0, 5.0]);
        lp.push(vec![1.0, 0.0], Relation::Le, 4.0);
        lp.push(vec![0.0, 2.0], Relation::Le, 12.0);
        lp.push(vec![3.0, 2.0], Relation::Le, 18.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_ge_rows() {
        // max -x - y, x + y = 1, x >= 0.25 written as x - 0.25 >= 0 -> value -1
        let mut lp = LinearProgram::new(vec![-1.0, -2.0]);
        lp.push(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.push(vec![1.0, 0.0], Relation::Ge, 0.25);
        let s = lp.solve().unwrap();
        assert!((s.objective + 1.0).abs() < 1e-12);
        assert!((s.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // -x <= -2 means x >= 2; min x
        let mut lp = LinearProgram::new(vec![-1.0]);
        lp.push(vec![-1.0], Relation::Le, -2.0);
        let s = lp.solve().unwrap();
        assert!((s.x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.push(vec![1.0], Relation::Le, 1.0);
        lp.push(vec![1.0], Relation::Ge, 2.0);
        assert!(matches!(lp.solve(), Err(Error::Infeasible(_))));
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(vec![1.0, 0.0]);
        lp.push(vec![0.0, 1.0], Relation::Le, 1.0);
        assert!(matches!(lp.solve(), Err(Error::Lp(_))));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0]);
        lp.push(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.push(vec![2.0, 2.0], Relation::Eq, 2.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_vertex_terminates() {
        // classic cycling example under the largest-coefficient rule
        let mut lp = LinearProgram::new(vec![10.0, -57.0, -9.0, -24.0]);
        lp.push(vec![0.5, -5.5, -2.5, 9.0], Relation::Le, 0.0);
        lp.push(vec![0.5, -1.5, -0.5, 1.0], Relation::Le, 0.0);
        lp.push(vec![1.0, 0.0, 0.0, 0.0], Relation::Le, 1.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12);
    }
}
