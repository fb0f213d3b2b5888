//! Linear programming reformulations of the sparse generalized inverse problems.

pub mod build;
pub mod format;
pub mod model;
pub mod simplex;

pub use build::{build_lp, FormulationId};
pub use format::{parse_lp, read_lp_file, write_lp_file, write_lp_string};
pub use model::{Constraint, LpModel, VarKind, VarRole};
pub use simplex::{reference_simplex, LpSolution};
