//! Small dense linear programs: maximize `c.x` subject to linear rows and
//! `x >= 0`.

mod oracle;
mod simplex;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::LpError;

pub use oracle::brute_force_oracle;
pub use simplex::solve;

/// Tolerance used when re-checking a solution against the original rows.
pub const FEASIBILITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    /// Row multipliers for an optimal solution (empty otherwise). For a
    /// maximization they are >= 0 on `<=` rows and <= 0 on `>=` rows.
    pub duals: Vec<f64>,
}

impl LpSolution {
    pub(crate) fn without_point(status: LpStatus, n: usize) -> Self {
        LpSolution {
            status,
            x: vec![0.0; n],
            objective_value: if status == LpStatus::Unbounded {
                f64::INFINITY
            } else {
                f64::NAN
            },
            duals: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        LpProblem {
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coefficients: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coefficients,
            relation,
            rhs,
        });
        self
    }

    pub fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite);
        }
        for (row, c) in self.constraints.iter().enumerate() {
            if c.coefficients.len() != n {
                return Err(LpError::RowLength {
                    row,
                    got: c.coefficients.len(),
                    expected: n,
                });
            }
            if !c.rhs.is_finite() || c.coefficients.iter().any(|v| !v.is_finite()) {
                return Err(LpError::NonFinite);
            }
        }
        Ok(())
    }

    pub fn objective_at(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// Indices of rows (and, offset by the row count, variables) that `x`
    /// violates by more than `tol`.
    pub fn violations(&self, x: &[f64], tol: f64) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            let lhs = dot(&c.coefficients, x);
            let bad = match c.relation {
                Relation::Le => lhs > c.rhs + tol,
                Relation::Ge => lhs < c.rhs - tol,
                Relation::Eq => (lhs - c.rhs).abs() > tol,
            };
            if bad {
                out.push(i);
            }
        }
        let m = self.constraints.len();
        out.extend(x.iter().enumerate().filter(|(_, v)| **v < -tol).map(|(j, _)| m + j));
        out
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.violations(x, tol).is_empty()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

impl fmt::Display for LpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "maximize ")?;
        write_expr(f, &self.objective)?;
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for (i, c) in self.constraints.iter().enumerate() {
            write!(f, "  r{}: ", i + 1)?;
            write_expr(f, &c.coefficients)?;
            let rel = match c.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            writeln!(f, " {rel} {}", c.rhs)?;
        }
        write!(f, "  x >= 0")
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, coefs: &[f64]) -> fmt::Result {
    let mut first = true;
    for (j, &a) in coefs.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        if first {
            write!(f, "{a} x{}", j + 1)?;
        } else if a < 0.0 {
            write!(f, " - {} x{}", -a, j + 1)?;
        } else {
            write!(f, " + {a} x{}", j + 1)?;
        }
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}
