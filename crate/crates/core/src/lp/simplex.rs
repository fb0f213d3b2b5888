//! Dense two-phase primal simplex with Bland's rule.
//!
//! Meant for verifying formulations on small instances, not for speed. The
//! tableau is refactored from the original data through an LU solve every
//! [`REFACTOR_EVERY`] pivots to limit drift.

use faer::linalg::solvers::Solve;
use faer::Mat;

use super::model::LpModel;
use crate::error::{Error, Result};

pub const PIVOT_TOL: f64 = 1e-9;
pub const REFACTOR_EVERY: usize = 100;
pub const PIVOT_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub objective: f64,
    /// Values of the model variables.
    pub x: Vec<f64>,
    pub pivots: usize,
}

/// Standard form `Ax = b, x ≥ 0` with the map back to model variables.
struct StandardForm {
    rows: usize,
    cols: usize,
    /// Row-major `rows × cols`.
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    /// For each model variable, its positive and (if free) negative column.
    split: Vec<(usize, Option<usize>)>,
}

fn standard_form(model: &LpModel) -> Result<StandardForm> {
    let mut split = Vec::with_capacity(model.num_vars);
    let mut cols = 0;
    for &lb in &model.var_lower_bounds {
        if lb == 0.0 {
            split.push((cols, None));
            cols += 1;
        } else if lb == f64::NEG_INFINITY {
            split.push((cols, Some(cols + 1)));
            cols += 2;
        } else {
            return Err(Error::Unsupported(format!("lower bound {lb}; only 0 and -inf are handled")));
        }
    }
    let slack0 = cols;
    cols += model.ineq_rows.len();
    let rows = model.eq_rows.len() + model.ineq_rows.len();
    let mut a = vec![0.0; rows * cols];
    let mut b = vec![0.0; rows];
    for (i, row) in model.eq_rows.iter().chain(&model.ineq_rows).enumerate() {
        for &(k, v) in &row.coeffs {
            if k >= model.num_vars {
                return Err(Error::InvalidArgument(format!("row '{}' references column {k}", row.name)));
            }
            let (p, m) = split[k];
            a[i * cols + p] += v;
            if let Some(m) = m {
                a[i * cols + m] -= v;
            }
        }
        b[i] = row.rhs;
    }
    for s in 0..model.ineq_rows.len() {
        a[(model.eq_rows.len() + s) * cols + slack0 + s] = -1.0;
    }
    let mut c = vec![0.0; cols];
    for (k, &(p, m)) in split.iter().enumerate() {
        c[p] = model.objective[k];
        if let Some(m) = m {
            c[m] = -model.objective[k];
        }
    }
    Ok(StandardForm { rows, cols, a, b, c, split })
}

/// Indices of a maximal independent subset of rows of `[A | b]`.
///
/// A dependent row whose right-hand side disagrees makes the system
/// inconsistent.
fn independent_rows(sf: &StandardForm) -> Result<Vec<usize>> {
    let cols = sf.cols;
    let mut pivots: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    let mut keep = Vec::new();
    for i in 0..sf.rows {
        let mut row = sf.a[i * cols..(i + 1) * cols].to_vec();
        let mut rhs = sf.b[i];
        let scale = row.iter().fold(rhs.abs(), |s, v| s.max(v.abs())).max(1.0);
        for (p, prow, prhs) in &pivots {
            let f = row[*p];
            if f != 0.0 {
                for (x, y) in row.iter_mut().zip(prow) {
                    *x -= f * y;
                }
                rhs -= f * prhs;
            }
        }
        let (p, big) = row
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (j, v)| if v.abs() > acc.1 { (j, v.abs()) } else { acc });
        if big <= PIVOT_TOL * scale {
            if rhs.abs() > 1e-7 * scale {
                return Err(Error::Infeasible(rhs.abs()));
            }
            continue;
        }
        let inv = 1.0 / row[p];
        row.iter_mut().for_each(|x| *x *= inv);
        rhs *= inv;
        // keep earlier pivot rows reduced in column p
        for (_, prow, prhs) in pivots.iter_mut() {
            let f = prow[p];
            if f != 0.0 {
                for (x, y) in prow.iter_mut().zip(&row) {
                    *x -= f * y;
                }
                *prhs -= f * rhs;
            }
        }
        pivots.push((p, row, rhs));
        keep.push(i);
    }
    Ok(keep)
}

struct Tableau {
    rows: usize,
    /// Columns excluding the right-hand side.
    cols: usize,
    /// Row-major `rows × (cols + 1)`; last column is the basic solution.
    t: Vec<f64>,
    basis: Vec<usize>,
    /// Original constraint data `[A | I | b]` restricted to kept rows.
    orig: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    fn w(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.w() + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i * self.w() + self.cols]
    }

    fn pivot(&mut self, r: usize, s: usize) {
        let w = self.w();
        let inv = 1.0 / self.t[r * w + s];
        for x in &mut self.t[r * w..(r + 1) * w] {
            *x *= inv;
        }
        let prow = self.t[r * w..(r + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == r {
                continue;
            }
            let f = self.t[i * w + s];
            if f != 0.0 {
                for (x, y) in self.t[i * w..(i + 1) * w].iter_mut().zip(&prow) {
                    *x -= f * y;
                }
                self.t[i * w + s] = 0.0;
            }
        }
        self.basis[r] = s;
        self.pivots += 1;
        if self.pivots.is_multiple_of(REFACTOR_EVERY) {
            self.refactor();
        }
    }

    /// Rebuilds the tableau as `B⁻¹[A | I | b]` from the original data.
    fn refactor(&mut self) {
        let (rows, w) = (self.rows, self.w());
        let bmat = Mat::from_fn(rows, rows, |i, k| self.orig[i * w + self.basis[k]]);
        let rhs = Mat::from_fn(rows, w, |i, j| self.orig[i * w + j]);
        let x: Mat<f64> = bmat.partial_piv_lu().solve(&rhs);
        let ok = (0..rows).all(|i| (0..w).all(|j| x[(i, j)].is_finite()));
        if ok {
            for i in 0..rows {
                for j in 0..w {
                    self.t[i * w + j] = x[(i, j)];
                }
            }
            for (i, &bv) in self.basis.iter().enumerate() {
                for k in 0..rows {
                    self.t[k * w + bv] = if k == i { 1.0 } else { 0.0 };
                }
            }
        }
    }

    fn drop_row(&mut self, r: usize) {
        let w = self.w();
        self.t.drain(r * w..(r + 1) * w);
        self.orig.drain(r * w..(r + 1) * w);
        self.basis.remove(r);
        self.rows -= 1;
    }

    /// Runs Bland's rule on costs `c` over the columns allowed by `allowed`.
    fn optimize(&mut self, c: &[f64], allowed: impl Fn(usize) -> bool) -> Result<()> {
        loop {
            if self.pivots >= PIVOT_LIMIT {
                return Err(Error::PivotLimit(PIVOT_LIMIT));
            }
            let y: Vec<f64> = self.basis.iter().map(|&bv| c[bv]).collect();
            let entering = (0..self.cols).filter(|&j| allowed(j)).find(|&j| {
                let red = c[j] - (0..self.rows).map(|i| y[i] * self.at(i, j)).sum::<f64>();
                red < -PIVOT_TOL
            });
            let Some(s) = entering else { return Ok(()) };
            let mut best: Option<(f64, usize)> = None;
            for i in 0..self.rows {
                let a = self.at(i, s);
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    best = match best {
                        None => Some((ratio, i)),
                        Some((br, bi)) => {
                            let tie = (ratio - br).abs() <= 1e-12 * br.abs().max(1.0);
                            if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                                Some((ratio, i))
                            } else {
                                Some((br, bi))
                            }
                        }
                    };
                }
            }
            let Some((_, r)) = best else { return Err(Error::Unbounded) };
            self.pivot(r, s);
        }
    }
}

/// Solves `model` to optimality.
pub fn reference_simplex(model: &LpModel) -> Result<LpSolution> {
    let sf = standard_form(model)?;
    let keep = independent_rows(&sf)?;
    let rows = keep.len();
    let n = sf.cols;
    let cols = n + rows;
    let w = cols + 1;

    let mut orig = vec![0.0; rows * w];
    for (r, &i) in keep.iter().enumerate() {
        let flip = if sf.b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            orig[r * w + j] = flip * sf.a[i * n + j];
        }
        orig[r * w + n + r] = 1.0;
        orig[r * w + cols] = flip * sf.b[i];
    }
    let mut tab = Tableau {
        rows,
        cols,
        t: orig.clone(),
        basis: (n..n + rows).collect(),
        orig,
        pivots: 0,
    };

    // Phase I
    let mut c1 = vec![0.0; cols];
    c1[n..].fill(1.0);
    tab.optimize(&c1, |_| true)?;
    tab.refactor();
    let infeas: f64 = (0..tab.rows).filter(|&i| tab.basis[i] >= n).map(|i| tab.rhs(i)).sum();
    let bnorm = sf.b.iter().fold(1.0_f64, |s, v| s.max(v.abs()));
    if infeas > 1e-7 * bnorm {
        return Err(Error::Infeasible(infeas));
    }

    // drive remaining artificials out of the basis
    let mut r = 0;
    while r < tab.rows {
        if tab.basis[r] >= n {
            match (0..n).find(|&j| tab.at(r, j).abs() > PIVOT_TOL && !tab.basis.contains(&j)) {
                Some(j) => tab.pivot(r, j),
                None => {
                    tab.drop_row(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    // Phase II
    let mut c2 = vec![0.0; cols];
    c2[..n].copy_from_slice(&sf.c);
    tab.optimize(&c2, |j| j < n)?;
    tab.refactor();

    let mut xs = vec![0.0; n];
    for i in 0..tab.rows {
        if tab.basis[i] < n {
            xs[tab.basis[i]] = tab.rhs(i).max(0.0);
        }
    }
    let x: Vec<f64> = sf
        .split
        .iter()
        .map(|&(p, m)| xs[p] - m.map_or(0.0, |m| xs[m]))
        .collect();
    Ok(LpSolution {
        objective: model.objective_value(&x),
        x,
        pivots: tab.pivots,
    })
}
