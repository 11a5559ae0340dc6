//! Exhaustive vertex enumeration, used as an independent check on `solve`.

use super::{dot, LpProblem, LpSolution, LpStatus, Relation};
use crate::error::LpError;

pub const MAX_VARS: usize = 8;
pub const MAX_ROWS: usize = 12;

const SINGULAR: f64 = 1e-10;

/// Enumerate every basic solution and return the best feasible one.
///
/// The feasible set lies in the non-negative orthant, so it has a vertex
/// whenever it is non-empty. Unboundedness is decided separately by
/// maximizing the objective over the recession cone cut by `sum(d) = 1`.
pub fn brute_force_oracle(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.check()?;
    let n = problem.num_vars();
    let m = problem.constraints.len();
    if n > MAX_VARS || m > MAX_ROWS {
        return Err(LpError::TooLarge { vars: n, rows: m });
    }
    let tol = 1e-7 * (1.0 + problem.constraints.iter().map(|c| c.rhs.abs()).fold(0.0, f64::max));

    // Hyperplanes: constraint rows, then the coordinate planes x_j = 0.
    let mut planes: Vec<(Vec<f64>, f64)> = problem
        .constraints
        .iter()
        .map(|c| (c.coefficients.clone(), c.rhs))
        .collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e, 0.0));
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for_each_subset(planes.len(), n, &mut |idx| {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| planes[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if problem.is_feasible(&x, tol) {
                let z = dot(&problem.objective, &x);
                if best.as_ref().is_none_or(|(bz, _)| z > *bz) {
                    best = Some((z, x));
                }
            }
        }
    });
    let Some((z, x)) = best else {
        return Ok(LpSolution::without_point(LpStatus::Infeasible, n));
    };

    if recession_ray_improves(problem) {
        return Ok(LpSolution::without_point(LpStatus::Unbounded, n));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective_value: z,
        duals: Vec::new(),
    })
}

fn recession_ray_improves(problem: &LpProblem) -> bool {
    let n = problem.num_vars();
    let cone = |d: &[f64]| {
        d.iter().all(|v| *v >= -1e-9)
            && problem.constraints.iter().all(|c| {
                let s = dot(&c.coefficients, d);
                match c.relation {
                    Relation::Le => s <= 1e-9,
                    Relation::Ge => s >= -1e-9,
                    Relation::Eq => s.abs() <= 1e-9,
                }
            })
    };
    let mut planes: Vec<Vec<f64>> = problem.constraints.iter().map(|c| c.coefficients.clone()).collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push(e);
    }
    let mut found = false;
    for_each_subset(planes.len(), n - 1, &mut |idx| {
        if found {
            return;
        }
        let mut a: Vec<Vec<f64>> = idx.iter().map(|&i| planes[i].clone()).collect();
        let mut b = vec![0.0; n - 1];
        a.push(vec![1.0; n]);
        b.push(1.0);
        if let Some(d) = solve_square(a, b) {
            if cone(&d) && dot(&problem.objective, &d) > 1e-9 {
                found = true;
            }
        }
    });
    found
}

fn for_each_subset(total: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(start: usize, total: usize, k: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        let need = k - cur.len();
        for i in start..=total.saturating_sub(need) {
            if total < need {
                break;
            }
            cur.push(i);
            rec(i + 1, total, k, cur, f);
            cur.pop();
        }
    }
    if k > total {
        return;
    }
    rec(0, total, k, &mut Vec::with_capacity(k), f);
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < SINGULAR {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                let (top, bottom) = a.split_at_mut(r);
                for (x, p) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                    *x -= f * p;
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}
