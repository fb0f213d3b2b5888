use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Role of an LP column with respect to the matrix unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VarKind {
    /// Positive part of `H_ij` (H-form), or the bound `|H_ij|` (structural form).
    HPlus,
    /// Negative part of `H_ij`.
    HMinus,
    W,
    Z,
}

impl VarKind {
    fn prefix(self) -> &'static str {
        match self {
            VarKind::HPlus => "hp",
            VarKind::HMinus => "hm",
            VarKind::W => "w",
            VarKind::Z => "z",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarRole {
    pub kind: VarKind,
    /// Column index; ordering by `(kind, col, row)` gives column-major order.
    pub col: usize,
    pub row: usize,
}

impl fmt::Display for VarRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}_{}", self.kind.prefix(), self.row, self.col)
    }
}

impl FromStr for VarRole {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unrecognized variable name '{s}'"));
        let mut parts = s.split('_');
        let kind = match parts.next() {
            Some("hp") => VarKind::HPlus,
            Some("hm") => VarKind::HMinus,
            Some("w") => VarKind::W,
            Some("z") => VarKind::Z,
            _ => return Err(bad()),
        };
        let row = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        let col = parts.next().and_then(|p| p.parse().ok()).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(VarRole { kind, row, col })
    }
}

/// A sparse linear row `Σ coeff·x_col (= or ≥) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// A linear program `min cᵀx` subject to equality rows, `≥` rows, and
/// lower bounds that are either `0` or `−∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpModel {
    pub name: String,
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub eq_rows: Vec<Constraint>,
    /// Rows of the form `a·x ≥ b`.
    pub ineq_rows: Vec<Constraint>,
    pub var_lower_bounds: Vec<f64>,
    pub var_map: Vec<VarRole>,
}

impl LpModel {
    pub fn var_names(&self) -> Vec<String> {
        self.var_map.iter().map(ToString::to_string).collect()
    }

    /// Shape `(n, m)` of `H`, from the largest `hp` indices.
    pub fn h_shape(&self) -> (usize, usize) {
        self.var_map
            .iter()
            .filter(|v| v.kind == VarKind::HPlus)
            .fold((0, 0), |(n, m), v| (n.max(v.row + 1), m.max(v.col + 1)))
    }

    /// True for the structural form (variables `H⁺`, `W`, `Z` with inequalities).
    pub fn is_structural(&self) -> bool {
        self.var_map.iter().all(|v| v.kind != VarKind::HMinus)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Maps an LP solution back to `H`.
    ///
    /// H-form: `H = H⁺ − H⁻`. Structural form: `H_ij = A†_ij + F_ij(W, Z)`,
    /// read off the rows `p_i_j: H⁺_ij − F_ij(W, Z) ≥ A†_ij`.
    pub fn recover_h(&self, x: &[f64]) -> Result<DenseMatrix> {
        if x.len() != self.num_vars {
            return Err(Error::InvalidArgument(format!(
                "solution has {} entries, model has {} variables",
                x.len(),
                self.num_vars
            )));
        }
        let (n, m) = self.h_shape();
        let mut h = DenseMatrix::zeros(n, m);
        if self.is_structural() {
            for row in &self.ineq_rows {
                let Some(rest) = row.name.strip_prefix("p_") else { continue };
                let (i, j) = parse_pair(rest).ok_or_else(|| {
                    Error::InvalidArgument(format!("bad structural row name '{}'", row.name))
                })?;
                let free: f64 = row
                    .coeffs
                    .iter()
                    .filter(|(k, _)| self.var_map[*k].kind != VarKind::HPlus)
                    .map(|(k, c)| -c * x[*k])
                    .sum();
                h[(i, j)] = row.rhs + free;
            }
        } else {
            for (k, v) in self.var_map.iter().enumerate() {
                match v.kind {
                    VarKind::HPlus => h[(v.row, v.col)] += x[k],
                    VarKind::HMinus => h[(v.row, v.col)] -= x[k],
                    _ => {}
                }
            }
        }
        Ok(h)
    }

    /// Largest violation of any row or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |c: &Constraint| c.coeffs.iter().map(|(k, a)| a * x[*k]).sum::<f64>();
        let eq = self.eq_rows.iter().map(|c| (dot(c) - c.rhs).abs());
        let ineq = self.ineq_rows.iter().map(|c| (c.rhs - dot(c)).max(0.0));
        let bounds = x
            .iter()
            .zip(&self.var_lower_bounds)
            .map(|(v, lb)| (lb - v).max(0.0));
        eq.chain(ineq).chain(bounds).fold(0.0, f64::max)
    }
}

fn parse_pair(s: &str) -> Option<(usize, usize)> {
    let (a, b) = s.split_once('_')?;
    Some((a.parse().ok()?, b.parse().ok()?))
}
