use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which Moore–Penrose properties the generalized inverse must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    /// P1 + P3: universal least-squares solvers.
    P13,
    /// P1 + P2 + P3: reflexive universal least-squares solvers.
    P123,
    /// P1 + P3 + P4.
    P134,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [ProblemKind::P13, ProblemKind::P123, ProblemKind::P134];
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::P13 => "p13",
            ProblemKind::P123 => "p123",
            ProblemKind::P134 => "p134",
        })
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p13" => Ok(ProblemKind::P13),
            "p123" => Ok(ProblemKind::P123),
            "p134" => Ok(ProblemKind::P134),
            _ => Err(Error::InvalidArgument(format!(
                "unknown problem '{s}' (expected p13, p123 or p134)"
            ))),
        }
    }
}
