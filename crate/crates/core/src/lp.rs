//! Dense two-phase simplex for the small moment-matching programs.
//!
//! Problems are of the form
//!
//! ```text
//! minimise    c'x
//! subject to  A_eq x  = b_eq
//!             A_ub x <= b_ub
//!             x >= 0
//! ```
//!
//! Pricing is Dantzig's rule with ties broken by lowest index. After a run of
//! degenerate pivots the solver switches to Bland's rule, which cannot cycle.
//! Optimal solutions are generally not unique; the returned vertex is the one
//! reached by this deterministic pivot sequence.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const DEGENERATE_RUN: usize = 50;
/// Pivots between rebuilds of the tableau from the original matrix.
const REINVERT_EVERY: usize = 100;

/// Reduced-cost tolerance for declaring optimality.
pub const OPTIMALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub ub_rows: Vec<Vec<f64>>,
    pub ub_rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(cost: Vec<f64>) -> Self {
        Self {
            cost,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.num_vars());
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        assert_eq!(row.len(), self.num_vars());
        self.ub_rows.push(row);
        self.ub_rhs.push(rhs);
    }

    pub fn solve(&self, max_pivots: usize) -> Result<LpSolution> {
        Tableau::build(self).run(self, max_pivots)
    }
}

struct Tableau {
    rows: usize,
    /// structural + slack columns; artificials follow
    n_real: usize,
    n_total: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    /// full constraint matrix (structural + slack + artificial), rhs
    a_full: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let n_eq = lp.eq_rows.len();
        let n_ub = lp.ub_rows.len();
        let rows = n_eq + n_ub;
        let n_real = n + n_ub;
        let n_total = n_real + rows;
        let mut a_full = Vec::with_capacity(rows);
        let mut rhs = Vec::with_capacity(rows);
        for (r, (row, &b)) in lp
            .eq_rows
            .iter()
            .zip(&lp.eq_rhs)
            .chain(lp.ub_rows.iter().zip(&lp.ub_rhs))
            .enumerate()
        {
            let mut full = vec![0.0; n_total];
            full[..n].copy_from_slice(row);
            if r >= n_eq {
                full[n + r - n_eq] = 1.0;
            }
            let sign = if b < 0.0 { -1.0 } else { 1.0 };
            for v in full.iter_mut() {
                *v *= sign;
            }
            full[n_real + r] = 1.0;
            a_full.push(full);
            rhs.push(sign * b);
        }
        let width = n_total + 1;
        let mut data = vec![0.0; rows * width];
        for r in 0..rows {
            data[r * width..r * width + n_total].copy_from_slice(&a_full[r]);
            data[r * width + n_total] = rhs[r];
        }
        Tableau {
            rows,
            n_real,
            n_total,
            data,
            basis: (n_real..n_total).collect(),
            a_full,
            rhs,
        }
    }

    fn width(&self) -> usize {
        self.n_total + 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    fn pivot(&mut self, pr: usize, pc: usize, obj: &mut [f64]) {
        let w = self.width();
        let p = self.data[pr * w + pc];
        for v in &mut self.data[pr * w..(pr + 1) * w] {
            *v /= p;
        }
        let prow: Vec<f64> = self.data[pr * w..(pr + 1) * w].to_vec();
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f != 0.0 {
                for (v, &pv) in self.data[r * w..(r + 1) * w].iter_mut().zip(&prow) {
                    *v -= f * pv;
                }
                self.data[r * w + pc] = 0.0;
            }
        }
        let f = obj[pc];
        if f != 0.0 {
            for (v, &pv) in obj.iter_mut().zip(&prow) {
                *v -= f * pv;
            }
            obj[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Reduced-cost row for `cost` over the current basis (last entry is -objective).
    fn price(&self, cost: &[f64]) -> Vec<f64> {
        let w = self.width();
        let mut obj = vec![0.0; w];
        obj[..cost.len()].copy_from_slice(cost);
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = obj_cost(cost, b);
            if cb != 0.0 {
                for (c, o) in obj.iter_mut().enumerate().take(w) {
                    *o -= cb * self.at(r, c);
                }
            }
        }
        obj
    }

    /// Rebuilds the tableau as `B^-1 [A | b]` for the current basis. Returns
    /// false (leaving the tableau alone) when the basis matrix is singular.
    fn reinvert(&mut self) -> bool {
        let m = self.rows;
        if m == 0 {
            return true;
        }
        let bmat = DMatrix::from_fn(m, m, |r, c| self.a_full[r][self.basis[c]]);
        let Some(inv) = bmat.try_inverse() else {
            return false;
        };
        let w = self.width();
        let full = DMatrix::from_fn(m, w, |r, c| {
            if c < self.n_total {
                self.a_full[r][c]
            } else {
                self.rhs[r]
            }
        });
        let fresh = inv * full;
        if fresh.iter().any(|v| !v.is_finite()) {
            return false;
        }
        for r in 0..m {
            for c in 0..w {
                self.data[r * w + c] = fresh[(r, c)];
            }
            // basic columns are exact unit vectors
            for (k, &b) in self.basis.iter().enumerate() {
                self.data[r * w + b] = if k == r { 1.0 } else { 0.0 };
            }
        }
        true
    }

    /// Minimises `cost` over columns `< allowed`, leaving the final reduced
    /// costs in `obj`. Returns pivots used.
    fn optimise(&mut self, cost: &[f64], obj: &mut Vec<f64>, allowed: usize, budget: usize) -> Result<usize> {
        let mut pivots = 0;
        let mut degenerate = 0;
        let mut since_reinvert = 0;
        let mut retried = false;
        loop {
            if since_reinvert >= REINVERT_EVERY {
                if self.reinvert() {
                    *obj = self.price(cost);
                }
                since_reinvert = 0;
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let entering = if bland {
                (0..allowed).find(|&c| obj[c] < -OPTIMALITY_TOL)
            } else {
                let mut best: Option<(usize, f64)> = None;
                for (c, &rc) in obj.iter().enumerate().take(allowed) {
                    if rc < -OPTIMALITY_TOL && best.is_none_or(|(_, b)| rc < b) {
                        best = Some((c, rc));
                    }
                }
                best.map(|(c, _)| c)
            };
            let Some(pc) = entering else {
                return Ok(pivots);
            };
            let rhs_col = self.n_total;
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > PIVOT_EPS {
                    let ratio = self.at(r, rhs_col).max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < lratio - 1e-14
                                || (ratio <= lratio + 1e-14 && self.basis[r] < self.basis[lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, ratio)) = leave else {
                // confirm against a freshly inverted basis before giving up
                if !retried && self.reinvert() {
                    retried = true;
                    *obj = self.price(cost);
                    since_reinvert = 0;
                    continue;
                }
                return Err(Error::LpUnbounded);
            };
            retried = false;
            if pivots >= budget {
                return Err(Error::LpIterationLimit { iterations: pivots });
            }
            degenerate = if ratio <= 1e-14 { degenerate + 1 } else { 0 };
            self.pivot(pr, pc, obj);
            pivots += 1;
            since_reinvert += 1;
        }
    }

    fn run(mut self, lp: &LinearProgram, max_pivots: usize) -> Result<LpSolution> {
        // phase 1: minimise the sum of artificials
        let mut phase1_cost = vec![0.0; self.n_total];
        for c in phase1_cost.iter_mut().skip(self.n_real) {
            *c = 1.0;
        }
        let mut obj = self.price(&phase1_cost);
        let mut pivots = self.optimise(&phase1_cost, &mut obj, self.n_total, max_pivots)?;
        let infeasibility = -obj[self.n_total];
        let scale = 1.0 + self.rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);
        if infeasibility > 1e-9 * scale {
            return Err(Error::LpInfeasible);
        }
        // drive remaining artificials out of the basis where possible
        for r in 0..self.rows {
            if self.basis[r] >= self.n_real {
                if let Some(pc) = (0..self.n_real).find(|&c| self.at(r, c).abs() > 1e-9) {
                    self.pivot(r, pc, &mut obj);
                    pivots += 1;
                }
            }
        }
        // phase 2 over structural and slack columns only
        let mut cost = lp.cost.clone();
        cost.resize(self.n_real, 0.0);
        self.reinvert();
        let mut obj = self.price(&cost);
        pivots += self.optimise(&cost, &mut obj, self.n_real, max_pivots.saturating_sub(pivots))?;

        let x = self.refine();
        let n = lp.num_vars();
        let x: Vec<f64> = x[..n].to_vec();
        let objective = x.iter().zip(&lp.cost).map(|(a, b)| a * b).sum();
        Ok(LpSolution {
            x,
            objective,
            pivots,
        })
    }

    /// Recomputes the basic solution from the original constraint matrix to
    /// shed accumulated tableau round-off.
    fn refine(&self) -> Vec<f64> {
        let m = self.rows;
        let mut x = vec![0.0; self.n_total];
        let from_tableau = |x: &mut Vec<f64>| {
            for (r, &b) in self.basis.iter().enumerate() {
                x[b] = self.at(r, self.n_total).max(0.0);
            }
        };
        if m == 0 {
            return x;
        }
        let bmat = DMatrix::from_fn(m, m, |r, c| self.a_full[r][self.basis[c]]);
        let rhs = DVector::from_column_slice(&self.rhs);
        match bmat.lu().solve(&rhs) {
            Some(sol) if sol.iter().all(|v| v.is_finite() && *v > -1e-7) => {
                for (c, &b) in self.basis.iter().enumerate() {
                    x[b] = sol[c].max(0.0);
                }
            }
            _ => from_tableau(&mut x),
        }
        x
    }
}

fn obj_cost(cost: &[f64], col: usize) -> f64 {
    cost.get(col).copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_textbook_problem() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(vec![-3.0, -5.0]);
        lp.add_le(vec![1.0, 0.0], 4.0);
        lp.add_le(vec![0.0, 2.0], 12.0);
        lp.add_le(vec![3.0, 2.0], 18.0);
        let sol = lp.solve(100).unwrap();
        assert!((sol.objective + 36.0).abs() < 1e-12);
        assert!((sol.x[0] - 2.0).abs() < 1e-12 && (sol.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_negative_rhs() {
        // min x + y s.t. x + y = 1, x - y <= -0.5
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        lp.add_eq(vec![1.0, 1.0], 1.0);
        lp.add_le(vec![1.0, -1.0], -0.5);
        let sol = lp.solve(100).unwrap();
        assert!((sol.x[0] - 0.25).abs() < 1e-12);
        assert!((sol.x[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(vec![1.0]);
        lp.add_eq(vec![1.0], -1.0);
        assert_eq!(lp.solve(100), Err(Error::LpInfeasible));
        let mut lp = LinearProgram::new(vec![-1.0, 0.0]);
        lp.add_le(vec![-1.0, 1.0], 1.0);
        assert_eq!(lp.solve(100), Err(Error::LpUnbounded));
    }

    #[test]
    fn pivot_cap_is_an_error() {
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.add_le(vec![1.0, 0.0], 1.0);
        lp.add_le(vec![0.0, 1.0], 1.0);
        assert!(matches!(lp.solve(0), Err(Error::LpIterationLimit { .. })));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(vec![1.0, 1.0, 1.0]);
        lp.add_eq(vec![1.0, 1.0, 1.0], 1.0);
        lp.add_eq(vec![2.0, 2.0, 2.0], 2.0);
        lp.add_eq(vec![0.0, 1.0, 0.0], 0.5);
        let sol = lp.solve(100).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-12);
        assert!((sol.x[1] - 0.5).abs() < 1e-12);
    }
}
