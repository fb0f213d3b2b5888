use std::time::Duration;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sparse_ginv::admm::{admm_solve, AdmmConfig};
use sparse_ginv::drs::{drs_solve, DrsConfig};
use sparse_ginv::svd::{full_svd, DEFAULT_RANK_TOL};
use sparse_ginv::{DenseMatrix, ProblemKind, ProjectionContext, Result, SolveReport, SvdStructure, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DrsFp,
    DrsRes,
    Admm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::DrsFp => "drs-fp",
            Method::DrsRes => "drs-res",
            Method::Admm => "admm",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Overrides applied on top of each method's defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    pub lambda: f64,
    pub rho: f64,
    pub eps_abs: Option<f64>,
    pub eps_rel: Option<f64>,
    pub max_iter: usize,
    pub time_limit: Duration,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            lambda: 1.0,
            rho: 1.0,
            eps_abs: None,
            eps_rel: None,
            max_iter: 1_000_000,
            time_limit: Duration::from_secs(300),
        }
    }
}

impl SolverOptions {
    pub fn drs(&self, method: Method, target: Option<f64>) -> DrsConfig {
        let mut cfg = match method {
            Method::DrsRes => DrsConfig::residual(),
            _ => DrsConfig::fixed_point(),
        };
        cfg.lambda = self.lambda;
        cfg.max_iter = self.max_iter;
        cfg.time_limit = self.time_limit;
        cfg.eps_abs = self.eps_abs.unwrap_or(cfg.eps_abs);
        cfg.eps_rel = self.eps_rel.unwrap_or(cfg.eps_rel);
        match target {
            Some(t) => cfg.with_target(t),
            None => cfg,
        }
    }

    pub fn admm(&self, target: Option<f64>) -> AdmmConfig {
        let d = AdmmConfig::default();
        let cfg = AdmmConfig {
            rho: self.rho,
            eps_abs: self.eps_abs.unwrap_or(d.eps_abs),
            eps_rel: self.eps_rel.unwrap_or(d.eps_rel),
            max_iter: self.max_iter,
            time_limit: self.time_limit,
            ..d
        };
        match target {
            Some(t) => cfg.with_target(t),
            None => cfg,
        }
    }
}

/// Decomposition and pseudoinverse shared by every method on one matrix.
pub struct Prepared {
    pub a: DenseMatrix,
    pub svd: SvdStructure,
    pub a_dagger: DenseMatrix,
}

impl Prepared {
    pub fn new(a: DenseMatrix) -> Result<Self> {
        let svd = full_svd(&a, DEFAULT_RANK_TOL)?;
        let a_dagger = svd.pseudoinverse();
        Ok(Prepared { a, svd, a_dagger })
    }

    pub fn run(
        &self,
        problem: ProblemKind,
        method: Method,
        opts: &SolverOptions,
        target: Option<f64>,
        trace: Option<&mut Trace>,
    ) -> Result<SolveReport> {
        match method {
            Method::Admm => admm_solve(&self.svd, problem, &opts.admm(target), trace),
            _ => {
                let ctx = ProjectionContext::from_svd(&self.a, &self.svd, problem)?;
                drs_solve(&ctx, &opts.drs(method, target), trace)
            }
        }
    }
}
