//! Closed-form Euclidean projections onto the affine feasible sets
//!
//! * P13: `{H : AᵀAH = Aᵀ}`
//! * P123: `{H : AᵀAH = Aᵀ, HAA† = H}`
//! * P134: `{H : AᵀAH = Aᵀ, HAAᵀ = Aᵀ}`
//!
//! `A†`, `A†A` and `AA†` are computed once when the context is built.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::problem::ProblemKind;
use crate::svd::{full_svd, SvdStructure, DEFAULT_RANK_TOL};

#[derive(Debug, Clone)]
pub struct ProjectionContext {
    pub a: DenseMatrix,
    pub a_dagger: DenseMatrix,
    /// `A†A`, `n × n`
    pub ada: DenseMatrix,
    /// `AA†`, `m × m`
    pub aad: DenseMatrix,
    /// `I − A†A`
    pub null_n: DenseMatrix,
    /// `I − AA†`
    pub null_m: DenseMatrix,
    pub problem: ProblemKind,
    left: Factor,
    right: Factor,
}

/// Orthogonal projector `QQᵀ` or `I − QQᵀ`, whichever has the thinner `Q`.
#[derive(Debug, Clone)]
struct Factor {
    q: DenseMatrix,
    /// `true` when `q` spans the range, so the nullspace projector is `I − QQᵀ`.
    spans_range: bool,
}

impl Factor {
    fn new(range: &DenseMatrix, null: &DenseMatrix) -> Self {
        if range.cols() <= null.cols() {
            Factor { q: range.clone(), spans_range: true }
        } else {
            Factor { q: null.clone(), spans_range: false }
        }
    }

    /// `(I − QQᵀ)x` restricted to the nullspace, applied from the left.
    fn null_left(&self, x: &DenseMatrix) -> DenseMatrix {
        let low = &self.q * &self.q.t_matmul(x).expect("factor rows match");
        if self.spans_range {
            x - &low
        } else {
            low
        }
    }

    /// `x` times the nullspace projector.
    fn null_right(&self, x: &DenseMatrix) -> DenseMatrix {
        let low = (x * &self.q).matmul_t(&self.q).expect("factor rows match");
        if self.spans_range {
            x - &low
        } else {
            low
        }
    }

    /// `x` times the range projector.
    fn range_right(&self, x: &DenseMatrix) -> DenseMatrix {
        let low = (x * &self.q).matmul_t(&self.q).expect("factor rows match");
        if self.spans_range {
            low
        } else {
            x - &low
        }
    }
}

impl ProjectionContext {
    pub fn new(a: &DenseMatrix, problem: ProblemKind) -> Result<Self> {
        let svd = full_svd(a, DEFAULT_RANK_TOL)?;
        Self::from_svd(a, &svd, problem)
    }

    pub fn from_svd(a: &DenseMatrix, svd: &SvdStructure, problem: ProblemKind) -> Result<Self> {
        if (svd.m, svd.n) != a.shape() {
            return Err(Error::mismatch("ProjectionContext", a.shape(), (svd.m, svd.n)));
        }
        let a_dagger = svd.pseudoinverse();
        // A†A = V₁V₁ᵀ and AA† = U₁U₁ᵀ exactly symmetric by construction
        let ada = svd.v1.matmul_t(&svd.v1)?;
        let aad = svd.u1.matmul_t(&svd.u1)?;
        let null_n = &DenseMatrix::identity(svd.n) - &ada;
        let null_m = &DenseMatrix::identity(svd.m) - &aad;
        Ok(ProjectionContext {
            a: a.clone(),
            a_dagger,
            ada,
            aad,
            null_n,
            null_m,
            problem,
            left: Factor::new(&svd.v1, &svd.v2),
            right: Factor::new(&svd.u1, &svd.u2),
        })
    }

    /// Same matrices, different target set.
    pub fn with_problem(&self, problem: ProblemKind) -> Self {
        ProjectionContext {
            problem,
            ..self.clone()
        }
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// `tol · max(1, ‖A‖_F)`
    pub fn scale(&self) -> f64 {
        self.a.frobenius_norm().max(1.0)
    }

    /// Frobenius projection of `v` onto the feasible set.
    pub fn project(&self, v: &DenseMatrix) -> Result<DenseMatrix> {
        if v.shape() != (self.n(), self.m()) {
            return Err(Error::mismatch("project", (self.n(), self.m()), v.shape()));
        }
        Ok(self.project_unchecked(v))
    }

    pub(crate) fn project_unchecked(&self, v: &DenseMatrix) -> DenseMatrix {
        let free = self.left.null_left(v);
        let free = match self.problem {
            // A† + (I − A†A)V
            ProblemKind::P13 => free,
            // A† + (I − A†A)V·AA†
            ProblemKind::P123 => self.right.range_right(&free),
            // A† + (I − A†A)V(I − AA†)
            ProblemKind::P134 => self.right.null_right(&free),
        };
        &free + &self.a_dagger
    }

    /// Frobenius residuals of each defining equation of the feasible set.
    pub fn feasibility_residuals(&self, h: &DenseMatrix) -> Result<Vec<f64>> {
        if h.shape() != (self.n(), self.m()) {
            return Err(Error::mismatch("feasibility", (self.n(), self.m()), h.shape()));
        }
        let at = self.a.transpose();
        let atah = self.a.t_matmul(&(&self.a * h))?;
        let mut out = vec![(&atah - &at).frobenius_norm()];
        match self.problem {
            ProblemKind::P13 => {}
            ProblemKind::P123 => out.push((&(h * &self.aad) - h).frobenius_norm()),
            ProblemKind::P134 => {
                let haat = (h * &self.a).matmul_t(&self.a)?;
                out.push((&haat - &at).frobenius_norm());
            }
        }
        Ok(out)
    }

    /// All residuals of the defining equations at most `tol`.
    pub fn is_feasible(&self, h: &DenseMatrix, tol: f64) -> bool {
        self.feasibility_residuals(h)
            .map(|r| r.iter().all(|&x| x <= tol))
            .unwrap_or(false)
    }
}
