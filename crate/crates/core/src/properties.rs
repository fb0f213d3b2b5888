//! Residuals of the Moore–Penrose properties and their single-equation
//! equivalents, sparsity bounds, and the factor statistic used in reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::problem::ProblemKind;
use crate::svd::{self, GammaBlocks, SvdStructure, DEFAULT_RANK_TOL};

/// Entries at or below this magnitude count as zero in 0-norms.
pub const ZERO_TOL: f64 = 1e-5;

/// Absolute tolerance for structural checks before scaling by `max(1, ‖A‖_F)`.
pub const STRUCTURAL_TOL: f64 = 1e-8;

/// Frobenius residuals of each matrix equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyResiduals {
    /// `AHA = A`
    pub p1: f64,
    /// `HAH = H`
    pub p2: f64,
    /// `AH` symmetric
    pub p3: f64,
    /// `HA` symmetric
    pub p4: f64,
    /// `AᵀAH = Aᵀ`
    pub pls: f64,
    /// `AᵀHᵀAᵀ + HAA† = Aᵀ + H`
    pub plsr: f64,
    /// `AAᵀHᵀ = A`
    pub pmn: f64,
    /// `AAᵀHᵀ + HᵀAᵀA = 2A`
    pub pmx: f64,
}

/// Which of the four properties hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyFlags {
    pub p1: bool,
    pub p2: bool,
    pub p3: bool,
    pub p4: bool,
}

impl PropertyFlags {
    pub fn satisfies(&self, problem: ProblemKind) -> bool {
        match problem {
            ProblemKind::P13 => self.p1 && self.p3,
            ProblemKind::P123 => self.p1 && self.p2 && self.p3,
            ProblemKind::P134 => self.p1 && self.p3 && self.p4,
        }
    }
}

impl PropertyResiduals {
    pub fn flags(&self, tol: f64) -> PropertyFlags {
        PropertyFlags {
            p1: self.p1 <= tol,
            p2: self.p2 <= tol,
            p3: self.p3 <= tol,
            p4: self.p4 <= tol,
        }
    }

    /// Residual of the single equation equivalent to the problem's property set.
    pub fn equation(&self, problem: ProblemKind) -> f64 {
        match problem {
            ProblemKind::P13 => self.pls,
            ProblemKind::P123 => self.plsr,
            ProblemKind::P134 => self.pmx,
        }
    }
}

/// `tol · max(1, ‖A‖_F)`
pub fn scaled_tol(a: &DenseMatrix, tol: f64) -> f64 {
    tol * a.frobenius_norm().max(1.0)
}

pub fn residuals(a: &DenseMatrix, a_dagger: &DenseMatrix, h: &DenseMatrix) -> Result<PropertyResiduals> {
    let (m, n) = a.shape();
    if h.shape() != (n, m) {
        return Err(Error::mismatch("residuals(h)", (n, m), h.shape()));
    }
    if a_dagger.shape() != (n, m) {
        return Err(Error::mismatch("residuals(a_dagger)", (n, m), a_dagger.shape()));
    }
    let ah = a.matmul(h)?;
    let ha = h.matmul(a)?;
    let aha = ah.matmul(a)?;
    let hah = ha.matmul(h)?;
    let at = a.transpose();

    let asym = |x: &DenseMatrix| (&x.transpose() - x).frobenius_norm();

    // AᵀAH = Aᵀ(AH)
    let atah = at.matmul(&ah)?;
    // HAAᵀ, whose transpose is AAᵀHᵀ
    let haat = ha.matmul_t(a)?;
    let haad = ha.matmul(a_dagger)?;

    let pls = (&atah - &at).frobenius_norm();
    let plsr = {
        let lhs = &aha.transpose() + &haad;
        let rhs = &at + h;
        (&lhs - &rhs).frobenius_norm()
    };
    let pmn = (&haat.transpose() - a).frobenius_norm();
    let pmx = {
        let sum = &haat.transpose() + &atah.transpose();
        (&sum - &a.scaled(2.0)).frobenius_norm()
    };

    Ok(PropertyResiduals {
        p1: (&aha - a).frobenius_norm(),
        p2: (&hah - h).frobenius_norm(),
        p3: asym(&ah),
        p4: asym(&ha),
        pls,
        plsr,
        pmn,
        pmx,
    })
}

/// True when both the single-equation residual and the raw property
/// residuals of the problem's set are within `tol`.
pub fn satisfies(problem: ProblemKind, res: &PropertyResiduals, tol: f64) -> bool {
    res.equation(problem) <= tol && res.flags(tol).satisfies(problem)
}

/// Properties read off the `Γ` blocks.
pub fn block_flags(svd: &SvdStructure, blocks: &GammaBlocks, tol: f64) -> PropertyFlags {
    let p1 = (&blocks.x - &svd.d_inverse()).frobenius_norm() <= tol;
    let mut zd = blocks.z.clone();
    for i in 0..zd.rows() {
        for j in 0..zd.cols() {
            zd[(i, j)] *= svd.d[j];
        }
    }
    let zdy = &zd * &blocks.y;
    PropertyFlags {
        p1,
        p2: p1 && (&zdy - &blocks.w).frobenius_norm() <= tol,
        p3: blocks.y.frobenius_norm() <= tol,
        p4: blocks.z.frobenius_norm() <= tol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityBounds {
    pub beta13: usize,
    pub beta123: usize,
    pub beta134: usize,
}

impl SparsityBounds {
    pub fn for_problem(&self, problem: ProblemKind) -> usize {
        match problem {
            ProblemKind::P13 => self.beta13,
            ProblemKind::P123 => self.beta123,
            ProblemKind::P134 => self.beta134,
        }
    }
}

/// Nonzero bounds for extreme-point solutions of the three LP families.
pub fn bounds(m: usize, n: usize, r: usize) -> Result<SparsityBounds> {
    if r == 0 || r > m.min(n) {
        return Err(Error::InvalidArgument(format!(
            "rank {r} outside 1..={} for a {m}x{n} matrix",
            m.min(n)
        )));
    }
    let null = (m - r) * (n - r);
    Ok(SparsityBounds {
        beta13: m * r,
        beta123: m * r + null,
        beta134: m * n - null,
    })
}

/// Rank of `(I_m ⊗ AᵀA) + (AAᵀ ⊗ I_n)`, by counting pairs with `σᵢ² + σⱼ² > 0`.
pub fn kron_system_rank(a: &DenseMatrix) -> Result<usize> {
    let (m, n) = a.shape();
    let r = svd::numerical_rank(a, DEFAULT_RANK_TOL)?;
    if r == 0 {
        return Err(Error::ZeroRank);
    }
    Ok(m * n - (m - r) * (n - r))
}

/// `(I_m ⊗ AᵀA) + (AAᵀ ⊗ I_n)`, an `mn × mn` matrix.
pub fn kron_sum_matrix(a: &DenseMatrix) -> DenseMatrix {
    let (m, n) = a.shape();
    let ata = a.t_matmul(a).expect("square");
    let aat = a.matmul_t(a).expect("square");
    let left = kron(&DenseMatrix::identity(m), &ata);
    let right = kron(&aat, &DenseMatrix::identity(n));
    &left + &right
}

pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (p, q) = b.shape();
    DenseMatrix::from_fn(a.rows() * p, a.cols() * q, |i, j| a[(i / p, j / q)] * b[(i % p, j % q)])
}

/// `(x − baseline) / baseline`
pub fn factor(x: f64, baseline: f64) -> Result<f64> {
    if baseline == 0.0 {
        return Err(Error::InvalidArgument("factor baseline is zero".into()));
    }
    Ok((x - baseline) / baseline)
}

/// Numerical rank of a computed solution at the default relative tolerance.
pub fn solution_rank(h: &DenseMatrix) -> Result<usize> {
    svd::numerical_rank(h, DEFAULT_RANK_TOL)
}
