//! Scaled-form ADMM on the block parametrizations
//! `H = A† + V₂ZU₁ᵀ` (P123) and `H = A† + V₂WU₂ᵀ` (P134).
//!
//! The returned matrix is the parametrized point built from the last free
//! block, which satisfies the problem's properties by construction.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::drs::soft_threshold;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::problem::ProblemKind;
use crate::properties::ZERO_TOL;
use crate::report::{IterationRecord, SolveReport, SolveStatus, StopRule, Trace};
use crate::svd::SvdStructure;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdmmConfig {
    pub rho: f64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    pub time_limit: Duration,
    pub stop_rule: StopRule,
    /// Evaluate the residuals every iteration under a target rule too.
    pub track_residuals: bool,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig {
            rho: 1.0,
            eps_abs: 1e-5,
            eps_rel: 1e-5,
            max_iter: 1_000_000,
            time_limit: Duration::from_secs(300),
            stop_rule: StopRule::Residual,
            track_residuals: true,
        }
    }
}

impl AdmmConfig {
    pub fn with_target(mut self, target: f64) -> Self {
        self.stop_rule = StopRule::target(target);
        self
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("rho", self.rho), ("eps_abs", self.eps_abs), ("eps_rel", self.eps_rel)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        match self.stop_rule {
            StopRule::FixedPoint => Err(Error::Unsupported(
                "the fixed-point rule applies to DRS only".into(),
            )),
            StopRule::TargetOneNorm { target, rel_factor } if !(target > 0.0 && rel_factor > 0.0) => {
                Err(Error::InvalidArgument(format!(
                    "target 1-norm {target} and factor {rel_factor} must be positive"
                )))
            }
            _ if self.max_iter == 0 => Err(Error::InvalidArgument("max_iter must be positive".into())),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdmmState {
    /// `Z` (`(n−r) × r`) for P123, `W` (`(n−r) × (m−r)`) for P134.
    pub free_block: DenseMatrix,
    pub h: DenseMatrix,
    /// `Λ = Θ/ρ`
    pub lambda_scaled: DenseMatrix,
}

/// Fixed matrices of one ADMM run.
struct Setup<'a> {
    svd: &'a SvdStructure,
    a_dagger: DenseMatrix,
    /// `U₁` for P123, `U₂` for P134.
    right: &'a DenseMatrix,
}

impl<'a> Setup<'a> {
    fn new(svd: &'a SvdStructure, problem: ProblemKind) -> Result<Self> {
        let right = match problem {
            ProblemKind::P123 => &svd.u1,
            ProblemKind::P134 => &svd.u2,
            ProblemKind::P13 => {
                return Err(Error::Unsupported(
                    "ADMM is not available for P13; use DRS".into(),
                ))
            }
        };
        Ok(Setup {
            svd,
            a_dagger: svd.pseudoinverse(),
            right,
        })
    }

    /// `V₂ᵀ X R`
    fn compress(&self, x: &DenseMatrix) -> DenseMatrix {
        &self.svd.v2.t_matmul(x).expect("n rows") * self.right
    }

    /// `V₂ F Rᵀ`
    fn expand(&self, f: &DenseMatrix) -> DenseMatrix {
        (&self.svd.v2 * f).matmul_t(self.right).expect("block shape")
    }
}

/// `Θ̂ = V₁U₁ᵀ/‖V₁U₁ᵀ‖_∞`, `Λ⁰ = Θ̂/ρ`, `H⁰ = A† + Λ⁰`.
pub fn admm_init(svd: &SvdStructure, problem: ProblemKind, rho: f64) -> Result<AdmmState> {
    let setup = Setup::new(svd, problem)?;
    Ok(init_with(&setup, rho))
}

fn init_with(setup: &Setup<'_>, rho: f64) -> AdmmState {
    let vu = setup.svd.v1_u1t();
    let theta = vu.scaled(1.0 / vu.inf_norm_entrywise());
    let lambda_scaled = theta.scaled(1.0 / rho);
    AdmmState {
        free_block: DenseMatrix::zeros(setup.svd.n - setup.svd.rank, setup.right.cols()),
        h: &setup.a_dagger + &lambda_scaled,
        lambda_scaled,
    }
}

fn step(setup: &Setup<'_>, state: &AdmmState, rho: f64) -> (AdmmState, DenseMatrix) {
    let j = &(&state.h - &setup.a_dagger) - &state.lambda_scaled;
    let free_block = setup.compress(&j);
    let recon = &setup.a_dagger + &setup.expand(&free_block);
    let y = &recon + &state.lambda_scaled;
    let h = soft_threshold(&y, 1.0 / rho);
    let mut lambda_scaled = state.lambda_scaled.clone();
    lambda_scaled.axpy(1.0, &recon);
    lambda_scaled.axpy(-1.0, &h);
    (
        AdmmState {
            free_block,
            h,
            lambda_scaled,
        },
        recon,
    )
}

/// Frobenius norms of `r = A† + V₂FRᵀ − H^{k+1}` and `s = ρV₂ᵀ(H^{k+1} − H^k)R`.
pub fn admm_residuals(
    state: &AdmmState,
    state_prev: &AdmmState,
    svd: &SvdStructure,
    problem: ProblemKind,
    rho: f64,
) -> Result<(f64, f64)> {
    let setup = Setup::new(svd, problem)?;
    if state.free_block.shape() != (svd.n - svd.rank, setup.right.cols()) {
        return Err(Error::mismatch(
            "admm_residuals",
            (svd.n - svd.rank, setup.right.cols()),
            state.free_block.shape(),
        ));
    }
    let recon = &setup.a_dagger + &setup.expand(&state.free_block);
    Ok(residual_pair(&setup, &recon, state, state_prev, rho))
}

fn residual_pair(setup: &Setup<'_>, recon: &DenseMatrix, state: &AdmmState, prev: &AdmmState, rho: f64) -> (f64, f64) {
    let r = (recon - &state.h).frobenius_norm();
    let s = rho * setup.compress(&(&state.h - &prev.h)).frobenius_norm();
    (r, s)
}

pub fn admm_solve(
    svd: &SvdStructure,
    problem: ProblemKind,
    cfg: &AdmmConfig,
    mut trace: Option<&mut Trace>,
) -> Result<SolveReport> {
    cfg.validate()?;
    let start = Instant::now();
    let setup = Setup::new(svd, problem)?;
    let (n, m, r) = (svd.n as f64, svd.m as f64, svd.rank as f64);
    let pinv_norm = setup.a_dagger.frobenius_norm();
    let eval_residuals = cfg.track_residuals || cfg.stop_rule == StopRule::Residual;

    let mut state = init_with(&setup, cfg.rho);
    let mut output = setup.a_dagger.clone();
    let mut last_res = None;
    let mut status = SolveStatus::IterLimit;
    let mut iterations = 0;

    for k in 0..cfg.max_iter {
        let (next, recon) = step(&setup, &state, cfg.rho);
        iterations = k + 1;

        let mut residual_stop = false;
        if eval_residuals {
            let (rp, rd) = residual_pair(&setup, &recon, &next, &state, cfg.rho);
            last_res = Some((rp, rd));
            let free_norm = (&recon - &setup.a_dagger).frobenius_norm();
            let eps_pri = cfg.eps_abs * (n * m).sqrt()
                + cfg.eps_rel * next.h.frobenius_norm().max(free_norm).max(pinv_norm);
            // dimension term kept as √((n−r)r) for both problems
            let eps_dual = cfg.eps_abs * ((n - r) * r).sqrt()
                + cfg.eps_rel * cfg.rho * setup.compress(&next.lambda_scaled).frobenius_norm();
            residual_stop = rp <= eps_pri && rd <= eps_dual;
        }

        output = recon;
        state = next;
        let one_norm = output.one_norm();

        if let Some(t) = trace.as_deref_mut() {
            if t.wants(iterations) {
                t.records.push(IterationRecord {
                    iter: iterations,
                    one_norm,
                    zero_norm: output.zero_norm(ZERO_TOL),
                    r_p: last_res.map(|x: (f64, f64)| x.0),
                    r_d: last_res.map(|x| x.1),
                    elapsed: start.elapsed().as_secs_f64(),
                });
            }
        }

        let done = match cfg.stop_rule {
            StopRule::Residual => residual_stop.then_some(SolveStatus::Converged),
            rule => rule.target_hit(one_norm).then_some(SolveStatus::TargetReached),
        };
        if let Some(s) = done {
            status = s;
            break;
        }
        if start.elapsed() >= cfg.time_limit {
            status = SolveStatus::TimeLimit;
            break;
        }
    }

    Ok(SolveReport {
        one_norm: output.one_norm(),
        zero_norm: output.zero_norm(ZERO_TOL),
        h: output,
        iterations,
        elapsed: start.elapsed(),
        final_primal_residual: last_res.map(|x| x.0),
        final_dual_residual: last_res.map(|x| x.1),
        status,
    })
}
