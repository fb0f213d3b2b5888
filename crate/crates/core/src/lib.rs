//! Sparse generalized inverses.
//!
//! Computes minimum 1-norm matrices `H` satisfying a chosen subset of the
//! Moore–Penrose properties of a dense matrix `A`:
//!
//! * [`ProblemKind::P13`]: `AHA = A` and `AH` symmetric
//! * [`ProblemKind::P123`]: additionally `HAH = H`
//! * [`ProblemKind::P134`]: additionally `HA` symmetric
//!
//! Solvers: Douglas–Rachford splitting ([`drs`]), ADMM on the block
//! parametrization ([`admm`]), and exportable linear programs with a small
//! dense simplex for verification ([`lp`]).

pub mod admm;
pub mod drs;
pub mod error;
pub mod instances;
pub mod lp;
pub mod matrix;
pub mod mtx;
pub mod problem;
pub mod projection;
pub mod properties;
pub mod report;
pub mod svd;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use problem::ProblemKind;
pub use projection::ProjectionContext;
pub use report::{SolveReport, SolveStatus, StopRule, Trace};
pub use svd::{full_svd, GammaBlocks, SvdStructure};
