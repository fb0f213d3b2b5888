//! Full singular value decomposition split into range and null-space blocks.
//!
//! With `A = U Σ Vᵀ` and `r = rank(A)`, the left factor is split as
//! `U = [U₁ U₂]` (`U₁` is `m×r`) and the right factor as `V = [V₁ V₂]`.
//! Any `H` then has the block form `VᵀHU = [X Y; Z W]`, and each
//! Moore–Penrose property constrains one block:
//!
//! * `AHA = A` iff `X = D⁻¹`
//! * `AH` symmetric iff `Y = 0`
//! * `HA` symmetric iff `Z = 0`
//! * given the first, `HAH = H` iff `W = Z D Y`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Singular values below `DEFAULT_RANK_TOL · σ₁` count as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SvdStructure {
    pub u1: DenseMatrix,
    pub u2: DenseMatrix,
    pub v1: DenseMatrix,
    pub v2: DenseMatrix,
    /// The `r` positive singular values, descending.
    pub d: Vec<f64>,
    pub rank: usize,
    pub m: usize,
    pub n: usize,
    /// All `min(m, n)` singular values, descending.
    pub singular_values: Vec<f64>,
}

/// Blocks of `Γ = VᵀHU`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaBlocks {
    /// `r × r`
    pub x: DenseMatrix,
    /// `r × (m−r)`
    pub y: DenseMatrix,
    /// `(n−r) × r`
    pub z: DenseMatrix,
    /// `(n−r) × (m−r)`
    pub w: DenseMatrix,
}

fn no_convergence(m: usize, n: usize) -> impl FnOnce(faer::linalg::svd::SvdError) -> Error {
    move |e| Error::SvdNoConvergence {
        rows: m,
        cols: n,
        detail: format!("{e:?}"),
    }
}

/// Singular values of `a`, descending.
pub fn singular_values(a: &DenseMatrix) -> Result<Vec<f64>> {
    let (m, n) = a.shape();
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let mut s = a.to_faer().singular_values().map_err(no_convergence(m, n))?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Number of singular values above `rel_tol · σ₁`; zero for a zero matrix.
pub fn numerical_rank(a: &DenseMatrix, rel_tol: f64) -> Result<usize> {
    let s = singular_values(a)?;
    Ok(count_above(&s, rel_tol))
}

fn count_above(s: &[f64], rel_tol: f64) -> usize {
    match s.first() {
        Some(&s1) if s1 > 0.0 => s.iter().filter(|&&x| x > rel_tol * s1).count(),
        _ => 0,
    }
}

/// Full SVD of `a`, split at numerical rank `r = #{σᵢ > rank_tol·σ₁}`.
pub fn full_svd(a: &DenseMatrix, rank_tol: f64) -> Result<SvdStructure> {
    if rank_tol.is_nan() || rank_tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("rank tolerance must be positive, got {rank_tol}")));
    }
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::ZeroRank);
    }
    let svd = a.to_faer().svd().map_err(no_convergence(m, n))?;
    let (u, v) = (svd.U(), svd.V());
    let s = svd.S().column_vector();
    let k = m.min(n);

    // faer returns descending values already; sort defensively and keep the
    // vector pairing.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| s[i]).collect();

    let rank = count_above(&singular_values, rank_tol);
    if rank == 0 {
        return Err(Error::ZeroRank);
    }
    let col = |j: usize| if j < k { order[j] } else { j };
    let u1 = DenseMatrix::from_fn(m, rank, |i, j| u[(i, col(j))]);
    let u2 = DenseMatrix::from_fn(m, m - rank, |i, j| u[(i, col(rank + j))]);
    let v1 = DenseMatrix::from_fn(n, rank, |i, j| v[(i, col(j))]);
    let v2 = DenseMatrix::from_fn(n, n - rank, |i, j| v[(i, col(rank + j))]);

    Ok(SvdStructure {
        u1,
        u2,
        v1,
        v2,
        d: singular_values[..rank].to_vec(),
        rank,
        m,
        n,
        singular_values,
    })
}

impl SvdStructure {
    /// `V₁ D⁻¹ U₁ᵀ`
    pub fn pseudoinverse(&self) -> DenseMatrix {
        let mut v1d = self.v1.clone();
        for i in 0..self.n {
            for j in 0..self.rank {
                v1d[(i, j)] /= self.d[j];
            }
        }
        gemm_nt(&v1d, &self.u1)
    }

    /// `V₁ U₁ᵀ`
    pub fn v1_u1t(&self) -> DenseMatrix {
        gemm_nt(&self.v1, &self.u1)
    }

    pub fn d_inverse(&self) -> DenseMatrix {
        let inv: Vec<f64> = self.d.iter().map(|x| 1.0 / x).collect();
        DenseMatrix::from_diagonal(self.rank, self.rank, &inv)
    }

    /// Blocks of `VᵀHU` for an `n × m` matrix `h`.
    pub fn gamma_of(&self, h: &DenseMatrix) -> Result<GammaBlocks> {
        if h.shape() != (self.n, self.m) {
            return Err(Error::mismatch("gamma_of", (self.n, self.m), h.shape()));
        }
        let t1 = self.v1.t_matmul(h)?;
        let t2 = self.v2.t_matmul(h)?;
        Ok(GammaBlocks {
            x: t1.matmul(&self.u1)?,
            y: t1.matmul(&self.u2)?,
            z: t2.matmul(&self.u1)?,
            w: t2.matmul(&self.u2)?,
        })
    }

    /// `V₁XU₁ᵀ + V₁YU₂ᵀ + V₂ZU₁ᵀ + V₂WU₂ᵀ`
    pub fn reconstruct_h(&self, blocks: &GammaBlocks) -> Result<DenseMatrix> {
        let (r, m, n) = (self.rank, self.m, self.n);
        let expect = [
            ("reconstruct_h(x)", blocks.x.shape(), (r, r)),
            ("reconstruct_h(y)", blocks.y.shape(), (r, m - r)),
            ("reconstruct_h(z)", blocks.z.shape(), (n - r, r)),
            ("reconstruct_h(w)", blocks.w.shape(), (n - r, m - r)),
        ];
        for (op, got, want) in expect {
            if got != want {
                return Err(Error::mismatch(op, want, got));
            }
        }
        let top = &gemm_nt(&blocks.x, &self.u1) + &gemm_nt(&blocks.y, &self.u2);
        let bottom = &gemm_nt(&blocks.z, &self.u1) + &gemm_nt(&blocks.w, &self.u2);
        Ok(&(&self.v1 * &top) + &(&self.v2 * &bottom))
    }

    /// `A† + V₂ Z U₁ᵀ`, the structural parametrization of the P1+P2+P3 set.
    pub fn reconstruct_z(&self, a_dagger: &DenseMatrix, z: &DenseMatrix) -> DenseMatrix {
        a_dagger + &gemm_nt(&(&self.v2 * z), &self.u1)
    }

    /// `A† + V₂ W U₂ᵀ`, the structural parametrization of the P1+P3+P4 set.
    pub fn reconstruct_w(&self, a_dagger: &DenseMatrix, w: &DenseMatrix) -> DenseMatrix {
        a_dagger + &gemm_nt(&(&self.v2 * w), &self.u2)
    }
}

fn gemm_nt(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    a.matmul_t(b).expect("shapes fixed by the decomposition")
}

impl GammaBlocks {
    /// All-zero blocks shaped for a decomposition.
    pub fn zeros(svd: &SvdStructure) -> Self {
        let (r, m, n) = (svd.rank, svd.m, svd.n);
        GammaBlocks {
            x: DenseMatrix::zeros(r, r),
            y: DenseMatrix::zeros(r, m - r),
            z: DenseMatrix::zeros(n - r, r),
            w: DenseMatrix::zeros(n - r, m - r),
        }
    }
}
