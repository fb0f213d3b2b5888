//! Assembly of the fifteen LP formulations.
//!
//! H-form models split `H = H⁺ − H⁻` and impose linear matrix equations in
//! `H` as equality rows. Structural models use the block parametrization
//! `H = A† + F(W, Z)` and bound `H⁺ ≥ |H|` with two inequality families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::model::{Constraint, LpModel, VarKind, VarRole};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::problem::ProblemKind;
use crate::svd::SvdStructure;

/// Coefficients below this magnitude are dropped during assembly.
pub const DROP_TOL: f64 = 1e-12;

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FormulationId {
    /// P1 and P3.
    P13_MP,
    /// `AH = AA†`.
    P13_RANGE,
    /// `AᵀAH = Aᵀ`.
    P13_PLS,
    /// `A† + V₂[Z W]Uᵀ`.
    P13_CAL,
    /// P1, `HAA† = H`, P3.
    P123_LIN,
    /// `AH = AA†`, `HAA† = H`.
    P123_RANGE_LIN,
    /// `AᵀAH = Aᵀ`, `HAA† = H`.
    P123_PLS_LIN,
    /// `AᵀHᵀAᵀ + HAA† = Aᵀ + H`.
    P123_PLSR,
    /// `A† + V₂ZU₁ᵀ`.
    P123_CAL,
    /// P1, P3, P4.
    P134_MP,
    /// `AAᵀHᵀ = A` and P3.
    P134_PMN3,
    /// `AᵀAH = Aᵀ`, `HAAᵀ = Aᵀ`.
    P134_PLSPMN,
    /// `AH = AA†`, `HA = A†A`.
    P134_DOUBLE,
    /// `AAᵀHᵀ + HᵀAᵀA = 2A`.
    P134_PMX,
    /// `A† + V₂WU₂ᵀ`.
    P134_CAL,
}

use FormulationId::*;

impl FormulationId {
    pub const ALL: [FormulationId; 15] = [
        P13_MP,
        P13_RANGE,
        P13_PLS,
        P13_CAL,
        P123_LIN,
        P123_RANGE_LIN,
        P123_PLS_LIN,
        P123_PLSR,
        P123_CAL,
        P134_MP,
        P134_PMN3,
        P134_PLSPMN,
        P134_DOUBLE,
        P134_PMX,
        P134_CAL,
    ];

    pub fn problem(self) -> ProblemKind {
        match self {
            P13_MP | P13_RANGE | P13_PLS | P13_CAL => ProblemKind::P13,
            P123_LIN | P123_RANGE_LIN | P123_PLS_LIN | P123_PLSR | P123_CAL => ProblemKind::P123,
            _ => ProblemKind::P134,
        }
    }

    pub fn family(problem: ProblemKind) -> Vec<FormulationId> {
        Self::ALL.into_iter().filter(|f| f.problem() == problem).collect()
    }

    pub fn is_structural(self) -> bool {
        matches!(self, P13_CAL | P123_CAL | P134_CAL)
    }

    /// Lower-case identifier used in file names.
    pub fn as_str(self) -> &'static str {
        match self {
            P13_MP => "p13_mp",
            P13_RANGE => "p13_range",
            P13_PLS => "p13_pls",
            P13_CAL => "p13_cal",
            P123_LIN => "p123_lin",
            P123_RANGE_LIN => "p123_range_lin",
            P123_PLS_LIN => "p123_pls_lin",
            P123_PLSR => "p123_plsr",
            P123_CAL => "p123_cal",
            P134_MP => "p134_mp",
            P134_PMN3 => "p134_pmn3",
            P134_PLSPMN => "p134_plspmn",
            P134_DOUBLE => "p134_double",
            P134_PMX => "p134_pmx",
            P134_CAL => "p134_cal",
        }
    }

    fn alias(name: &str) -> Option<FormulationId> {
        Some(match name {
            "p131" => P13_MP,
            "p1proj13" => P13_RANGE,
            "ppls1" => P13_PLS,
            "calp13" => P13_CAL,
            "p1231lin" => P123_LIN,
            "p1proj13p2lin" => P123_RANGE_LIN,
            "p1plsp2lin" => P123_PLS_LIN,
            "pplsr1" => P123_PLSR,
            "calp123" => P123_CAL,
            "p1p134" => P134_MP,
            "p1pmn3" => P134_PMN3,
            "p1plspmn" => P134_PLSPMN,
            "double" => P134_DOUBLE,
            "p1pmx" => P134_PMX,
            "calp134" => P134_CAL,
            _ => return None,
        })
    }
}

impl fmt::Display for FormulationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulationId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase().replace('-', "_");
        if let Some(f) = Self::ALL.into_iter().find(|f| f.as_str() == lower) {
            return Ok(f);
        }
        if let Some(f) = Self::alias(&lower) {
            return Ok(f);
        }
        if lower == "p123" || lower == "p1231a" {
            return Err(Error::Unsupported(
                "P1+P2+P3 in H is nonconvex; choose a linearization (p123_lin, p123_range_lin, p123_pls_lin, p123_plsr, p123_cal)".into(),
            ));
        }
        Err(Error::InvalidArgument(format!("unknown formulation '{s}'")))
    }
}

/// One term `scale · L · op(H) · R` of a linear matrix equation.
struct Term<'a> {
    left: &'a DenseMatrix,
    transpose: bool,
    right: &'a DenseMatrix,
    scale: f64,
}

fn term<'a>(left: &'a DenseMatrix, right: &'a DenseMatrix) -> Term<'a> {
    Term {
        left,
        transpose: false,
        right,
        scale: 1.0,
    }
}

fn term_t<'a>(left: &'a DenseMatrix, right: &'a DenseMatrix) -> Term<'a> {
    Term {
        left,
        transpose: true,
        right,
        scale: 1.0,
    }
}

fn neg(mut t: Term<'_>) -> Term<'_> {
    t.scale = -t.scale;
    t
}

fn nonzeros_by_row(x: &DenseMatrix) -> Vec<Vec<(usize, f64)>> {
    (0..x.rows())
        .map(|i| (0..x.cols()).filter(|&j| x[(i, j)] != 0.0).map(|j| (j, x[(i, j)])).collect())
        .collect()
}

fn nonzeros_by_col(x: &DenseMatrix) -> Vec<Vec<(usize, f64)>> {
    (0..x.cols())
        .map(|j| (0..x.rows()).filter(|&i| x[(i, j)] != 0.0).map(|i| (i, x[(i, j)])).collect())
        .collect()
}

/// Accumulates H-form equality rows.
struct HFormBuilder {
    n: usize,
    m: usize,
    rows: Vec<Constraint>,
}

impl HFormBuilder {
    fn new(n: usize, m: usize) -> Self {
        HFormBuilder { n, m, rows: Vec::new() }
    }

    /// Adds the rows `(Σ terms)_ij = rhs_ij` for every `(i, j)` accepted by `keep`.
    fn equation(&mut self, terms: &[Term<'_>], rhs: &DenseMatrix, keep: impl Fn(usize, usize) -> bool) {
        let (n, m) = (self.n, self.m);
        let (p, q) = rhs.shape();
        let prepared: Vec<_> = terms
            .iter()
            .map(|t| {
                let inner = if t.transpose { (m, n) } else { (n, m) };
                assert_eq!(t.left.shape(), (p, inner.0), "left factor shape");
                assert_eq!(t.right.shape(), (inner.1, q), "right factor shape");
                (nonzeros_by_row(t.left), nonzeros_by_col(t.right), t.transpose, t.scale)
            })
            .collect();

        let mut scratch = vec![0.0; n * m];
        let mut seen = vec![false; n * m];
        let mut touched = Vec::new();
        for j in 0..q {
            for i in 0..p {
                if !keep(i, j) {
                    continue;
                }
                for (lrows, rcols, transpose, scale) in &prepared {
                    for &(a, la) in &lrows[i] {
                        for &(b, rb) in &rcols[j] {
                            // H_ab, or H_ba for the transposed term
                            let (hi, hj) = if *transpose { (b, a) } else { (a, b) };
                            let k = hi + hj * n;
                            if !seen[k] {
                                seen[k] = true;
                                touched.push(k);
                            }
                            scratch[k] += scale * la * rb;
                        }
                    }
                }
                touched.sort_unstable();
                let mut coeffs = Vec::with_capacity(2 * touched.len());
                let mut minus = Vec::with_capacity(touched.len());
                for &k in &touched {
                    let c = scratch[k];
                    scratch[k] = 0.0;
                    seen[k] = false;
                    if c.abs() >= DROP_TOL {
                        coeffs.push((k, c));
                        minus.push((n * m + k, -c));
                    }
                }
                touched.clear();
                coeffs.extend(minus);
                let mut b = rhs[(i, j)];
                if b.abs() < DROP_TOL {
                    b = 0.0;
                }
                if coeffs.is_empty() && b == 0.0 {
                    continue;
                }
                let name = format!("c{}", self.rows.len());
                self.rows.push(Constraint { name, coeffs, rhs: b });
            }
        }
    }

    fn finish(self, name: String) -> LpModel {
        let (n, m) = (self.n, self.m);
        let nm = n * m;
        let mut var_map = Vec::with_capacity(2 * nm);
        for kind in [VarKind::HPlus, VarKind::HMinus] {
            for j in 0..m {
                for i in 0..n {
                    var_map.push(VarRole { kind, row: i, col: j });
                }
            }
        }
        LpModel {
            name,
            num_vars: 2 * nm,
            objective: vec![1.0; 2 * nm],
            eq_rows: self.rows,
            ineq_rows: Vec::new(),
            var_lower_bounds: vec![0.0; 2 * nm],
            var_map,
        }
    }
}

fn upper_pairs(i: usize, j: usize) -> bool {
    i < j
}

fn all(_: usize, _: usize) -> bool {
    true
}

/// Builds the LP for `id` on the matrix `a` with decomposition `svd`.
pub fn build_lp(svd: &SvdStructure, a: &DenseMatrix, id: FormulationId) -> Result<LpModel> {
    let (m, n) = a.shape();
    if (svd.m, svd.n) != (m, n) {
        return Err(Error::mismatch("build_lp", (m, n), (svd.m, svd.n)));
    }
    if id.is_structural() {
        return Ok(build_structural(svd, id));
    }

    let at = a.transpose();
    let ad = svd.pseudoinverse();
    let im = DenseMatrix::identity(m);
    let inn = DenseMatrix::identity(n);
    let aad = a.matmul(&ad)?;
    let ada = ad.matmul(a)?;
    let ata = at.matmul(a)?;
    let aat = a.matmul(&at)?;
    let zeros_mm = DenseMatrix::zeros(m, m);
    let zeros_nn = DenseMatrix::zeros(n, n);
    let zeros_nm = DenseMatrix::zeros(n, m);

    let mut b = HFormBuilder::new(n, m);

    // P1: AHA = A
    let p1 = |b: &mut HFormBuilder| b.equation(&[term(a, a)], a, all);
    // P3: AH − HᵀAᵀ = 0, strictly upper entries
    let p3 = |b: &mut HFormBuilder| b.equation(&[term(a, &im), neg(term_t(&im, &at))], &zeros_mm, upper_pairs);
    // P4: HA − AᵀHᵀ = 0, strictly upper entries
    let p4 = |b: &mut HFormBuilder| b.equation(&[term(&inn, a), neg(term_t(&at, &inn))], &zeros_nn, upper_pairs);
    // HAA† − H = 0
    let reflexive = |b: &mut HFormBuilder| b.equation(&[term(&inn, &aad), neg(term(&inn, &im))], &zeros_nm, all);
    let range = |b: &mut HFormBuilder| b.equation(&[term(a, &im)], &aad, all);
    let pls = |b: &mut HFormBuilder| b.equation(&[term(&ata, &im)], &at, all);

    match id {
        P13_MP => {
            p1(&mut b);
            p3(&mut b);
        }
        P13_RANGE => range(&mut b),
        P13_PLS => pls(&mut b),
        P123_LIN => {
            p1(&mut b);
            reflexive(&mut b);
            p3(&mut b);
        }
        P123_RANGE_LIN => {
            range(&mut b);
            reflexive(&mut b);
        }
        P123_PLS_LIN => {
            pls(&mut b);
            reflexive(&mut b);
        }
        // AᵀHᵀAᵀ + HAA† − H = Aᵀ
        P123_PLSR => b.equation(
            &[term_t(&at, &at), term(&inn, &aad), neg(term(&inn, &im))],
            &at,
            all,
        ),
        P134_MP => {
            p1(&mut b);
            p3(&mut b);
            p4(&mut b);
        }
        // AAᵀHᵀ = A, plus P3
        P134_PMN3 => {
            b.equation(&[term_t(&aat, &inn)], a, all);
            p3(&mut b);
        }
        P134_PLSPMN => {
            pls(&mut b);
            b.equation(&[term(&inn, &aat)], &at, all);
        }
        P134_DOUBLE => {
            range(&mut b);
            b.equation(&[term(&inn, a)], &ada, all);
        }
        // AAᵀHᵀ + HᵀAᵀA = 2A
        P134_PMX => b.equation(&[term_t(&aat, &inn), term_t(&im, &ata)], &a.scaled(2.0), all),
        P13_CAL | P123_CAL | P134_CAL => unreachable!("structural ids handled above"),
    }
    Ok(b.finish(id.as_str().to_string()))
}

fn build_structural(svd: &SvdStructure, id: FormulationId) -> LpModel {
    let (m, n, r) = (svd.m, svd.n, svd.rank);
    let nm = n * m;
    let f0 = svd.pseudoinverse();
    let (use_w, use_z) = match id {
        P13_CAL => (true, true),
        P123_CAL => (false, true),
        _ => (true, false),
    };

    let mut var_map: Vec<VarRole> = Vec::new();
    for j in 0..m {
        for i in 0..n {
            var_map.push(VarRole { kind: VarKind::HPlus, row: i, col: j });
        }
    }
    // (variable index, row in V₂, column of U₁ or U₂ selecting it)
    let mut free: Vec<(usize, usize, bool, usize)> = Vec::new();
    let mut push_block = |kind: VarKind, cols: usize, on_u2: bool, var_map: &mut Vec<VarRole>| {
        for b in 0..cols {
            for a in 0..n - r {
                free.push((var_map.len(), a, on_u2, b));
                var_map.push(VarRole { kind, row: a, col: b });
            }
        }
    };
    if use_w {
        push_block(VarKind::W, m - r, true, &mut var_map);
    }
    if use_z {
        push_block(VarKind::Z, r, false, &mut var_map);
    }
    let num_vars = var_map.len();

    let mut rows = Vec::with_capacity(2 * nm);
    let mut neg_rows = Vec::with_capacity(nm);
    for j in 0..m {
        for i in 0..n {
            // F_ij = Σ V₂[i,a]·U[j,b]·var_ab
            let f: Vec<(usize, f64)> = free
                .iter()
                .filter_map(|&(k, a, on_u2, b)| {
                    let u = if on_u2 { svd.u2[(j, b)] } else { svd.u1[(j, b)] };
                    let c = svd.v2[(i, a)] * u;
                    (c.abs() >= DROP_TOL).then_some((k, c))
                })
                .collect();
            let hp = i + j * n;
            let b0 = if f0[(i, j)].abs() < DROP_TOL { 0.0 } else { f0[(i, j)] };

            let mut pos = vec![(hp, 1.0)];
            pos.extend(f.iter().map(|&(k, c)| (k, -c)));
            rows.push(Constraint {
                name: format!("p_{i}_{j}"),
                coeffs: pos,
                rhs: b0,
            });
            let mut negc = vec![(hp, 1.0)];
            negc.extend(f.iter().copied());
            neg_rows.push(Constraint {
                name: format!("n_{i}_{j}"),
                coeffs: negc,
                rhs: -b0,
            });
        }
    }
    rows.extend(neg_rows);

    let mut objective = vec![0.0; num_vars];
    objective[..nm].fill(1.0);
    let mut lower = vec![f64::NEG_INFINITY; num_vars];
    lower[..nm].fill(0.0);

    LpModel {
        name: id.as_str().to_string(),
        num_vars,
        objective,
        eq_rows: Vec::new(),
        ineq_rows: rows,
        var_lower_bounds: lower,
        var_map,
    }
}
