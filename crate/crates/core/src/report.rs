use std::io::Write;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::matrix::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    IterLimit,
    TimeLimit,
    TargetReached,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Converged => "converged",
            SolveStatus::IterLimit => "iter_limit",
            SolveStatus::TimeLimit => "time_limit",
            SolveStatus::TargetReached => "target_reached",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub h: DenseMatrix,
    pub iterations: usize,
    #[serde(with = "secs")]
    pub elapsed: Duration,
    pub one_norm: f64,
    pub zero_norm: usize,
    /// `None` when the stopping rule never evaluated residuals.
    pub final_primal_residual: Option<f64>,
    pub final_dual_residual: Option<f64>,
    pub status: SolveStatus,
}

mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        f64::deserialize(d).map(Duration::from_secs_f64)
    }
}

/// Stopping rule shared by both solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StopRule {
    /// Primal and dual residuals against absolute and relative tolerances.
    Residual,
    /// `‖V^{k+1} − V^k‖_F` against its first value (DRS only).
    FixedPoint,
    /// Stop once `(‖H‖₁ − target)/target ≤ rel_factor`.
    TargetOneNorm { target: f64, rel_factor: f64 },
}

impl StopRule {
    pub fn target(target: f64) -> Self {
        StopRule::TargetOneNorm {
            target,
            rel_factor: 1e-5,
        }
    }

    pub(crate) fn target_hit(&self, one_norm: f64) -> bool {
        match *self {
            StopRule::TargetOneNorm { target, rel_factor } => (one_norm - target) / target <= rel_factor,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub one_norm: f64,
    pub zero_norm: usize,
    pub r_p: Option<f64>,
    pub r_d: Option<f64>,
    pub elapsed: f64,
}

/// Per-iteration samples taken every `stride` iterations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trace {
    pub stride: usize,
    pub records: Vec<IterationRecord>,
}

impl Default for Trace {
    fn default() -> Self {
        Trace::new(50)
    }
}

impl Trace {
    pub fn new(stride: usize) -> Self {
        Trace {
            stride: stride.max(1),
            records: Vec::new(),
        }
    }

    pub(crate) fn wants(&self, iter: usize) -> bool {
        iter.is_multiple_of(self.stride)
    }

    /// CSV with header `iter,one_norm,zero_norm,r_p,r_d,elapsed`; absent residuals are empty fields.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "iter,one_norm,zero_norm,r_p,r_d,elapsed")?;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for r in &self.records {
            writeln!(
                w,
                "{},{:e},{},{},{},{:e}",
                r.iter,
                r.one_norm,
                r.zero_norm,
                opt(r.r_p),
                opt(r.r_d),
                r.elapsed
            )?;
        }
        Ok(())
    }
}
