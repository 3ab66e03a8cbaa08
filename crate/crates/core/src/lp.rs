//! Dense two-phase primal simplex with Bland's rule.
//!
//! Problems are stated as `maximize c·x` subject to rows `a·x (<=|>=|=) b`
//! and `x >= 0`. Infeasible problems come back with a Farkas vector `y`
//! satisfying `Aᵀy >= 0`, `bᵀy < 0`, `y_i >= 0` on `<=` rows and
//! `y_i <= 0` on `>=` rows.

use thiserror::Error;

pub const LP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub coeffs: Vec<f64>,
    pub cmp: Cmp,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible { farkas: Vec<f64> },
    Unbounded,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("row {row} has {got} coefficients, expected {expected}")]
    Shape { row: usize, got: usize, expected: usize },
    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),
}

impl LinearProgram {
    pub fn new(n_vars: usize) -> Self {
        LinearProgram { n_vars, objective: vec![0.0; n_vars], rows: Vec::new() }
    }

    pub fn maximize(mut self, objective: Vec<f64>) -> Self {
        self.objective = objective;
        self
    }

    pub fn add(&mut self, coeffs: Vec<f64>, cmp: Cmp, rhs: f64) {
        self.rows.push(Row { coeffs, cmp, rhs });
    }

    pub fn solve(&self) -> Result<LpOutcome, LpError> {
        for (i, r) in self.rows.iter().enumerate() {
            if r.coeffs.len() != self.n_vars {
                return Err(LpError::Shape { row: i, got: r.coeffs.len(), expected: self.n_vars });
            }
        }
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    m: usize,
    n_struct: usize,
    n_slack: usize,
    // columns: structural | slack | artificial | rhs
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    sign: Vec<f64>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.n_struct + self.n_slack + self.m
    }

    fn build(lp: &LinearProgram) -> Tableau {
        let m = lp.rows.len();
        let n_slack = lp.rows.iter().filter(|r| r.cmp != Cmp::Eq).count();
        let width = lp.n_vars + n_slack + m;
        let mut t = vec![vec![0.0; width + 1]; m];
        let mut sign = vec![1.0; m];
        let mut slack = lp.n_vars;
        for (i, r) in lp.rows.iter().enumerate() {
            let s = if r.rhs < 0.0 { -1.0 } else { 1.0 };
            sign[i] = s;
            for (j, &a) in r.coeffs.iter().enumerate() {
                t[i][j] = s * a;
            }
            match r.cmp {
                Cmp::Le => {
                    t[i][slack] = s;
                    slack += 1;
                }
                Cmp::Ge => {
                    t[i][slack] = -s;
                    slack += 1;
                }
                Cmp::Eq => {}
            }
            t[i][lp.n_vars + n_slack + i] = 1.0;
            t[i][width] = s * r.rhs;
        }
        let basis = (0..m).map(|i| lp.n_vars + n_slack + i).collect();
        Tableau { m, n_struct: lp.n_vars, n_slack, t, basis, sign }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n_struct + self.n_slack
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width();
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i][c];
            if f != 0.0 {
                for j in 0..=w {
                    self.t[i][j] -= f * pivot_row[j];
                }
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let w = self.width();
        let mut r = cost.to_vec();
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..w {
                    r[j] -= cb * self.t[i][j];
                }
            }
        }
        r
    }

    /// Minimizes `cost` from the current basis. Returns false when unbounded.
    fn minimize(&mut self, cost: &[f64], allow_artificial: bool) -> Result<bool, LpError> {
        let w = self.width();
        let limit = 50_000 + 50 * (w + self.m);
        for _ in 0..limit {
            let r = self.reduced_costs(cost);
            let entering = (0..w).find(|&j| {
                (allow_artificial || !self.is_artificial(j)) && r[j] < -LP_TOL
            });
            let Some(c) = entering else { return Ok(true) };
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..self.m {
                let a = self.t[i][c];
                if a > LP_TOL {
                    let ratio = self.t[i][w] / a;
                    let better = match best {
                        None => true,
                        Some((br, _, bb)) => {
                            ratio < br - LP_TOL || (ratio <= br + LP_TOL && self.basis[i] < bb)
                        }
                    };
                    if better {
                        best = Some((ratio, i, self.basis[i]));
                    }
                }
            }
            match best {
                None => return Ok(false),
                Some((_, row, _)) => self.pivot(row, c),
            }
        }
        Err(LpError::IterationLimit(limit))
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpOutcome, LpError> {
        let w = self.width();
        let mut phase1 = vec![0.0; w];
        for c in phase1.iter_mut().skip(self.n_struct + self.n_slack) {
            *c = 1.0;
        }
        self.minimize(&phase1, true)?;
        let infeas: f64 = (0..self.m)
            .filter(|&i| self.is_artificial(self.basis[i]))
            .map(|i| self.t[i][w])
            .sum();
        if infeas > LP_TOL * (1.0 + self.m as f64) {
            let r = self.reduced_costs(&phase1);
            let art0 = self.n_struct + self.n_slack;
            let farkas = (0..self.m)
                .map(|i| -(1.0 - r[art0 + i]) * self.sign[i])
                .collect();
            return Ok(LpOutcome::Infeasible { farkas });
        }
        // drive zero-level artificials out of the basis where possible
        for i in 0..self.m {
            if self.is_artificial(self.basis[i]) {
                if let Some(c) = (0..self.n_struct + self.n_slack).find(|&j| self.t[i][j].abs() > LP_TOL) {
                    self.pivot(i, c);
                }
            }
        }
        let mut cost = vec![0.0; w];
        for (j, &c) in lp.objective.iter().enumerate() {
            cost[j] = -c;
        }
        if !self.minimize(&cost, false)? {
            return Ok(LpOutcome::Unbounded);
        }
        let mut x = vec![0.0; self.n_struct];
        for i in 0..self.m {
            if self.basis[i] < self.n_struct {
                x[self.basis[i]] = self.t[i][w].max(0.0);
            }
        }
        let value = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(LpOutcome::Optimal { x, value })
    }
}

/// Checks a Farkas vector against the sign conventions described at module level.
pub fn verify_farkas(lp: &LinearProgram, y: &[f64], tol: f64) -> bool {
    if y.len() != lp.rows.len() {
        return false;
    }
    for (r, &yi) in lp.rows.iter().zip(y) {
        match r.cmp {
            Cmp::Le if yi < -tol => return false,
            Cmp::Ge if yi > tol => return false,
            _ => {}
        }
    }
    for j in 0..lp.n_vars {
        let s: f64 = lp.rows.iter().zip(y).map(|(r, yi)| r.coeffs[j] * yi).sum();
        if s < -tol {
            return false;
        }
    }
    let by: f64 = lp.rows.iter().zip(y).map(|(r, yi)| r.rhs * yi).sum();
    by < -tol
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_max() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
        let mut lp = LinearProgram::new(2).maximize(vec![3.0, 2.0]);
        lp.add(vec![1.0, 1.0], Cmp::Le, 4.0);
        lp.add(vec![1.0, 3.0], Cmp::Le, 6.0);
        lp.add(vec![1.0, 0.0], Cmp::Le, 3.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { x, value } => {
                assert!((value - 11.0).abs() < 1e-9);
                assert!((x[0] - 3.0).abs() < 1e-9 && (x[1] - 1.0).abs() < 1e-9);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_with_certificate() {
        let mut lp = LinearProgram::new(2);
        lp.add(vec![1.0, 1.0], Cmp::Eq, 1.0);
        lp.add(vec![1.0, 1.0], Cmp::Ge, 2.0);
        match lp.solve().unwrap() {
            LpOutcome::Infeasible { farkas } => assert!(verify_farkas(&lp, &farkas, 1e-9)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn negative_rhs_and_le_certificate() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![1.0], Cmp::Le, -1.0);
        match lp.solve().unwrap() {
            LpOutcome::Infeasible { farkas } => assert!(verify_farkas(&lp, &farkas, 1e-9)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::new(2).maximize(vec![1.0, 0.0]);
        lp.add(vec![0.0, 1.0], Cmp::Le, 1.0);
        assert!(matches!(lp.solve().unwrap(), LpOutcome::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(3).maximize(vec![1.0, 2.0, 0.0]);
        lp.add(vec![1.0, 1.0, 1.0], Cmp::Eq, 1.0);
        lp.add(vec![2.0, 2.0, 2.0], Cmp::Eq, 2.0);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value - 2.0).abs() < 1e-9),
            o => panic!("{o:?}"),
        }
    }
}
