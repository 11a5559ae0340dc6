//! Two-phase dense tableau simplex with Bland's rule.

use super::{dot, LpProblem, LpSolution, LpStatus, Relation, FEASIBILITY_TOL};
use crate::error::LpError;

const PIVOT_EPS: f64 = 1e-9;
const COST_EPS: f64 = 1e-9;
const MAX_PIVOTS: usize = 100_000;

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced costs `z_j - c_j`; the last entry holds the objective value.
    obj: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
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
        let f = self.obj[c];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Reset the objective row for cost vector `cost` (length `width`).
    fn price(&mut self, cost: &[f64]) {
        let mut obj = vec![0.0; self.width + 1];
        for (j, o) in obj.iter_mut().enumerate().take(self.width) {
            *o = -cost[j];
        }
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (o, a) in obj.iter_mut().zip(&self.rows[i]) {
                    *o += cb * a;
                }
            }
        }
        self.obj = obj;
    }

    fn iterate(&mut self, allowed: usize) -> Result<Outcome, LpError> {
        for _ in 0..MAX_PIVOTS {
            // Bland: lowest-index improving column.
            let Some(enter) = (0..allowed).find(|&j| self.obj[j] < -COST_EPS) else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
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
            match leave {
                None => return Ok(Outcome::Unbounded),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
        Err(LpError::Numerical("pivot limit reached"))
    }
}

/// Solve `problem` with the two-phase simplex method.
pub fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.check()?;
    let n = problem.num_vars();
    let m = problem.constraints.len();

    // Rows with a negative right-hand side are negated so that every basic
    // value starts non-negative.
    let mut sign = vec![1.0; m];
    let mut rel = Vec::with_capacity(m);
    for (i, c) in problem.constraints.iter().enumerate() {
        if c.rhs < 0.0 {
            sign[i] = -1.0;
            rel.push(match c.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            });
        } else {
            rel.push(c.relation);
        }
    }
    let n_slack = rel.iter().filter(|r| **r != Relation::Eq).count();
    let n_art = rel.iter().filter(|r| **r != Relation::Le).count();
    let art_start = n + n_slack;
    let width = art_start + n_art;

    let mut rows = vec![vec![0.0; width + 1]; m];
    let mut unit = vec![0; m];
    let mut next_slack = n;
    let mut next_art = art_start;
    for (i, c) in problem.constraints.iter().enumerate() {
        let row = &mut rows[i];
        for (j, a) in c.coefficients.iter().enumerate() {
            row[j] = sign[i] * a;
        }
        row[width] = sign[i] * c.rhs;
        match rel[i] {
            Relation::Le => {
                row[next_slack] = 1.0;
                unit[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                unit[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                unit[i] = next_art;
                next_art += 1;
            }
        }
    }

    let mut t = Tableau {
        rows,
        obj: vec![0.0; width + 1],
        basis: unit.clone(),
        width,
    };

    if n_art > 0 {
        let mut cost = vec![0.0; width];
        for c in cost.iter_mut().skip(art_start) {
            *c = -1.0;
        }
        t.price(&cost);
        if let Outcome::Unbounded = t.iterate(width)? {
            return Err(LpError::Numerical("phase one reported unbounded"));
        }
        let scale = 1.0 + problem.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max);
        if t.obj[width] < -1e-9 * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible, n));
        }
        // Drive zero-valued artificials out of the basis where possible. A
        // row with no usable pivot is redundant and keeps its artificial at 0.
        for r in 0..m {
            if t.basis[r] >= art_start {
                if let Some(j) = (0..art_start).find(|&j| t.rows[r][j].abs() > PIVOT_EPS) {
                    t.pivot(r, j);
                }
            }
        }
    }

    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(&problem.objective);
    t.price(&cost);
    if let Outcome::Unbounded = t.iterate(art_start)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, n));
    }

    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rhs(i);
        }
    }
    for v in x.iter_mut() {
        if *v < 0.0 && *v > -FEASIBILITY_TOL {
            *v = 0.0;
        }
    }
    if !problem.is_feasible(&x, FEASIBILITY_TOL) {
        return Err(LpError::Numerical("solution fails the feasibility re-check"));
    }
    let duals = (0..m).map(|i| sign[i] * t.obj[unit[i]]).collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: dot(&problem.objective, &x),
        x,
        duals,
    })
}
