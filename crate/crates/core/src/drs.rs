//! Douglas–Rachford splitting for `min ‖H‖₁` over an affine feasible set.
//!
//! Starting from `V⁰ = A†`, each iteration performs
//!
//! ```text
//! H^{k+½} = S_λ(V^k)
//! H^{k+1} = Π(2H^{k+½} − V^k)
//! V^{k+1} = V^k + H^{k+1} − H^{k+½}
//! ```
//!
//! and the returned matrix is the last projected iterate `H^{k+1}`, so it is
//! feasible whatever the termination reason.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::problem::ProblemKind;
use crate::projection::ProjectionContext;
use crate::properties::ZERO_TOL;
use crate::report::{IterationRecord, SolveReport, SolveStatus, StopRule, Trace};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DrsConfig {
    pub lambda: f64,
    pub eps_abs: f64,
    pub eps_rel: f64,
    pub max_iter: usize,
    pub time_limit: Duration,
    pub stop_rule: StopRule,
    /// Evaluate primal and dual residuals every iteration even when the
    /// stopping rule does not need them.
    pub track_residuals: bool,
}

impl DrsConfig {
    /// Stops on the fixed-point displacement; never evaluates residuals.
    pub fn fixed_point() -> Self {
        DrsConfig {
            lambda: 1.0,
            eps_abs: 1e-6,
            eps_rel: 1e-6,
            max_iter: 1_000_000,
            time_limit: Duration::from_secs(300),
            stop_rule: StopRule::FixedPoint,
            track_residuals: false,
        }
    }

    /// Stops on primal and dual residuals.
    pub fn residual() -> Self {
        DrsConfig {
            eps_abs: 1e-5,
            eps_rel: 1e-5,
            stop_rule: StopRule::Residual,
            track_residuals: true,
            ..Self::fixed_point()
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.stop_rule = StopRule::target(target);
        self
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda", self.lambda),
            ("eps_abs", self.eps_abs),
            ("eps_rel", self.eps_rel),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if let StopRule::TargetOneNorm { target, rel_factor } = self.stop_rule {
            if target.is_nan() || target <= 0.0 || rel_factor.is_nan() || rel_factor <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "target 1-norm {target} and factor {rel_factor} must be positive"
                )));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be positive".into()));
        }
        Ok(())
    }
}

/// Entrywise `sign(a)·max(|a| − κ, 0)`.
pub fn soft_threshold(v: &DenseMatrix, kappa: f64) -> DenseMatrix {
    v.map(|a| {
        if a > kappa {
            a - kappa
        } else if a < -kappa {
            a + kappa
        } else {
            0.0
        }
    })
}

/// Gram matrices reused by the residual formulas.
struct Grams {
    ata: DenseMatrix,
    aat: DenseMatrix,
    at: DenseMatrix,
}

impl Grams {
    fn new(ctx: &ProjectionContext) -> Self {
        Grams {
            ata: ctx.a.t_matmul(&ctx.a).expect("AᵀA"),
            aat: ctx.a.matmul_t(&ctx.a).expect("AAᵀ"),
            at: ctx.a.transpose(),
        }
    }

    fn primal(&self, ctx: &ProjectionContext, hh: &DenseMatrix) -> DenseMatrix {
        match ctx.problem {
            // AᵀAH − Aᵀ
            ProblemKind::P13 => &(&self.ata * hh) - &self.at,
            // AᵀHᵀAᵀ + HAA† − Aᵀ − H
            ProblemKind::P123 => {
                let ahat = (&(&ctx.a * hh) * &ctx.a).transpose();
                let lhs = &ahat + &(hh * &ctx.aad);
                &(&lhs - &self.at) - hh
            }
            // AᵀAH + HAAᵀ − 2Aᵀ
            ProblemKind::P134 => {
                let lhs = &(&self.ata * hh) + &(hh * &self.aat);
                &lhs - &self.at.scaled(2.0)
            }
        }
    }

    fn dual(&self, ctx: &ProjectionContext, hh: &DenseMatrix, v: &DenseMatrix, lambda: f64) -> DenseMatrix {
        dual_residual_matrix(ctx, hh, v, lambda)
    }
}

/// Dual residual matrix: the part of `(H^{k+½} − V^k)/λ` outside the range
/// of the constraint adjoint.
fn dual_residual_matrix(ctx: &ProjectionContext, hh: &DenseMatrix, v: &DenseMatrix, lambda: f64) -> DenseMatrix {
    let d = hh - v;
    let s = -1.0 / lambda;
    match ctx.problem {
        ProblemKind::P13 => (&ctx.null_n * &d).scaled(s),
        ProblemKind::P123 => (&(&ctx.null_n * &d) * &ctx.aad).scaled(s),
        ProblemKind::P134 => (&(&ctx.null_n * &d) * &ctx.null_m).scaled(s),
    }
}

/// Frobenius norms of the primal and dual residuals at `H^{k+½}`.
pub fn drs_residuals(
    ctx: &ProjectionContext,
    h_half: &DenseMatrix,
    v_prev: &DenseMatrix,
    lambda: f64,
) -> Result<(f64, f64)> {
    check_shape(ctx, h_half)?;
    check_shape(ctx, v_prev)?;
    let g = Grams::new(ctx);
    Ok((
        g.primal(ctx, h_half).frobenius_norm(),
        g.dual(ctx, h_half, v_prev, lambda).frobenius_norm(),
    ))
}

fn check_shape(ctx: &ProjectionContext, h: &DenseMatrix) -> Result<()> {
    if h.shape() != (ctx.n(), ctx.m()) {
        return Err(Error::mismatch("drs", (ctx.n(), ctx.m()), h.shape()));
    }
    Ok(())
}

/// Least-squares multiplier estimates for the constraints of the feasible set.
#[derive(Debug, Clone)]
pub struct DualCertificates {
    /// Multiplier of `AᵀAH = Aᵀ`.
    pub lambda: DenseMatrix,
    /// Multiplier of the second constraint family (P123, P134).
    pub gamma: Option<DenseMatrix>,
}

pub fn drs_dual_certificates(
    ctx: &ProjectionContext,
    h_half: &DenseMatrix,
    v_prev: &DenseMatrix,
    lambda: f64,
) -> Result<DualCertificates> {
    check_shape(ctx, h_half)?;
    check_shape(ctx, v_prev)?;
    let d = (h_half - v_prev).scaled(1.0 / lambda);
    let add_adt = ctx.a_dagger.matmul_t(&ctx.a_dagger)?;
    Ok(match ctx.problem {
        ProblemKind::P13 => DualCertificates {
            lambda: &add_adt * &d,
            gamma: None,
        },
        ProblemKind::P123 => {
            let daad = &d * &ctx.aad;
            DualCertificates {
                lambda: &add_adt * &daad,
                gamma: Some(&daad - &d),
            }
        }
        ProblemKind::P134 => {
            let adt_ad = ctx.a_dagger.t_matmul(&ctx.a_dagger)?;
            let free = &d - &(&ctx.ada * &d);
            DualCertificates {
                lambda: &add_adt * &d,
                gamma: Some(&free * &adt_ad),
            }
        }
    })
}

/// Stationarity residual `∂ₕL − (H^{k+½} − V^k)/λ` of the Lagrangian at the given multipliers.
pub fn stationarity(
    ctx: &ProjectionContext,
    cert: &DualCertificates,
    h_half: &DenseMatrix,
    v_prev: &DenseMatrix,
    lambda: f64,
) -> Result<DenseMatrix> {
    let d = (h_half - v_prev).scaled(1.0 / lambda);
    let ata = ctx.a.t_matmul(&ctx.a)?;
    let mut out = &(&ata * &cert.lambda) - &d;
    if let Some(gamma) = &cert.gamma {
        let term = match ctx.problem {
            ProblemKind::P13 => {
                return Err(Error::InvalidArgument("P13 has a single multiplier".into()));
            }
            ProblemKind::P123 => &(gamma * &ctx.aad) - gamma,
            ProblemKind::P134 => gamma * &ctx.a.matmul_t(&ctx.a)?,
        };
        out = &out + &term;
    }
    Ok(out)
}

pub fn drs_solve(ctx: &ProjectionContext, cfg: &DrsConfig, mut trace: Option<&mut Trace>) -> Result<SolveReport> {
    cfg.validate()?;
    let start = Instant::now();
    let grams = (cfg.track_residuals || cfg.stop_rule == StopRule::Residual).then(|| Grams::new(ctx));

    let mut v = ctx.a_dagger.clone();
    let mut h = ctx.a_dagger.clone();
    let mut first_displacement = None;
    let mut first_residual = None;
    let mut last_res: Option<(f64, f64)> = None;
    let mut status = SolveStatus::IterLimit;
    let mut iterations = 0;

    for k in 0..cfg.max_iter {
        let hh = soft_threshold(&v, cfg.lambda);
        let mut reflected = hh.clone();
        for (x, vk) in reflected.as_mut_slice().iter_mut().zip(v.as_slice()) {
            *x = 2.0 * *x - vk;
        }
        h = ctx.project_unchecked(&reflected);
        let step = &h - &hh;
        iterations = k + 1;

        if let Some(g) = &grams {
            let rp = g.primal(ctx, &hh).frobenius_norm();
            let rd = g.dual(ctx, &hh, &v, cfg.lambda).frobenius_norm();
            last_res = Some((rp, rd));
        }

        let one_norm = h.one_norm();
        if let Some(t) = trace.as_deref_mut() {
            if t.wants(iterations) {
                t.records.push(IterationRecord {
                    iter: iterations,
                    one_norm,
                    zero_norm: h.zero_norm(ZERO_TOL),
                    r_p: last_res.map(|r| r.0),
                    r_d: last_res.map(|r| r.1),
                    elapsed: start.elapsed().as_secs_f64(),
                });
            }
        }

        let done = match cfg.stop_rule {
            StopRule::FixedPoint => {
                let tau = step.frobenius_norm();
                let tau0 = *first_displacement.get_or_insert(tau);
                k > 0 && tau <= cfg.eps_abs + cfg.eps_rel * tau0
            }
            StopRule::Residual => {
                let (rp, rd) = last_res.expect("residuals computed for this rule");
                let r = rp.hypot(rd);
                let r0 = *first_residual.get_or_insert(r);
                k > 0 && r <= cfg.eps_abs + cfg.eps_rel * r0
            }
            rule @ StopRule::TargetOneNorm { .. } => rule.target_hit(one_norm),
        };

        v.axpy(1.0, &step);

        if done {
            status = match cfg.stop_rule {
                StopRule::TargetOneNorm { .. } => SolveStatus::TargetReached,
                _ => SolveStatus::Converged,
            };
            break;
        }
        if start.elapsed() >= cfg.time_limit {
            status = SolveStatus::TimeLimit;
            break;
        }
    }

    Ok(SolveReport {
        one_norm: h.one_norm(),
        zero_norm: h.zero_norm(ZERO_TOL),
        h,
        iterations,
        elapsed: start.elapsed(),
        final_primal_residual: last_res.map(|r| r.0),
        final_dual_residual: last_res.map(|r| r.1),
        status,
    })
}
