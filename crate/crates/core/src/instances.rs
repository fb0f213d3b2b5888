//! Seeded benchmark instances with prescribed rank and singular values.

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::problem::ProblemKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SingularValues {
    /// `M·(α¹, …, αʳ)` with `α = (1/M)^(2/(r+1))`.
    Geometric(f64),
    Explicit(Vec<f64>),
    /// All singular values equal to one.
    UnitSpread,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub singular_values: SingularValues,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(m: usize, n: usize, r: usize, seed: u64) -> Self {
        InstanceSpec {
            m,
            n,
            r,
            singular_values: SingularValues::Geometric(2.0),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 || self.r > self.m.min(self.n) {
            return Err(Error::InvalidArgument(format!(
                "rank {} must satisfy 1 <= r <= min(m, n) = {}",
                self.r,
                self.m.min(self.n)
            )));
        }
        match &self.singular_values {
            SingularValues::Geometric(big_m) if !(*big_m > 0.0 && big_m.is_finite()) => Err(
                Error::InvalidArgument(format!("geometric scale must be positive, got {big_m}")),
            ),
            SingularValues::Explicit(s) => {
                if s.len() != self.r {
                    return Err(Error::InvalidArgument(format!(
                        "{} singular values given for rank {}",
                        s.len(),
                        self.r
                    )));
                }
                if s.iter().any(|x| !(*x > 0.0 && x.is_finite())) || s.windows(2).any(|w| w[0] < w[1]) {
                    return Err(Error::InvalidArgument(
                        "singular values must be positive and non-increasing".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// The `r` target singular values, descending.
    pub fn rc(&self) -> Vec<f64> {
        match &self.singular_values {
            SingularValues::Geometric(big_m) => geometric_profile(*big_m, self.r),
            SingularValues::Explicit(s) => s.clone(),
            SingularValues::UnitSpread => vec![1.0; self.r],
        }
    }

    /// Stable file-name stem, e.g. `m100_n50_r25_s7`.
    pub fn name(&self) -> String {
        format!("m{}_n{}_r{}_s{}", self.m, self.n, self.r, self.seed)
    }
}

pub fn geometric_profile(big_m: f64, r: usize) -> Vec<f64> {
    let alpha = (1.0 / big_m).powf(2.0 / (r as f64 + 1.0));
    (1..=r).map(|i| big_m * alpha.powi(i as i32)).collect()
}

/// `rows × cols` matrix with orthonormal columns from the thin QR of a Gaussian matrix.
pub fn random_orthonormal<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    assert!(cols <= rows, "cannot fit {cols} orthonormal columns in dimension {rows}");
    let mut g = Mat::<f64>::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            g[(i, j)] = rng.sample(StandardNormal);
        }
    }
    DenseMatrix::from_faer(g.qr().compute_thin_Q().as_ref())
}

/// `A = Q_u · diag(rc) · Q_vᵀ`.
pub fn generate(spec: &InstanceSpec) -> Result<DenseMatrix> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let qu = random_orthonormal(&mut rng, spec.m, spec.r);
    let qv = random_orthonormal(&mut rng, spec.n, spec.r);
    let rc = spec.rc();
    let mut scaled = qu;
    for i in 0..spec.m {
        for (j, s) in rc.iter().enumerate() {
            scaled[(i, j)] *= s;
        }
    }
    scaled.matmul_t(&qv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SuiteName {
    Small13,
    Large13,
    Small134,
    Large134,
    AppendixLadder(ProblemKind),
}

impl SuiteName {
    /// `(m, n, r)` triples of the suite.
    pub fn shapes(self) -> Vec<(usize, usize, usize)> {
        let half = |m: usize| (m, m / 2, m / 4);
        let square = |m: usize| (m, m, m / 4);
        match self {
            SuiteName::Small13 => (1..=5).map(|k| half(100 * k)).collect(),
            SuiteName::Large13 => (1..=5).map(|k| half(1000 * k)).collect(),
            SuiteName::Small134 => (1..=5).map(|k| square(100 * k)).collect(),
            SuiteName::Large134 => (1..=5).map(|k| square(1000 * k)).collect(),
            SuiteName::AppendixLadder(p) => (3..=30)
                .map(|k| 20 * k)
                .map(|m| if p == ProblemKind::P134 { square(m) } else { half(m) })
                .collect(),
        }
    }

    pub fn default_seeds(self) -> usize {
        match self {
            SuiteName::AppendixLadder(_) => 5,
            _ => 1,
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuiteName::Small13 => write!(f, "small13"),
            SuiteName::Large13 => write!(f, "large13"),
            SuiteName::Small134 => write!(f, "small134"),
            SuiteName::Large134 => write!(f, "large134"),
            SuiteName::AppendixLadder(p) => write!(f, "ladder-{p}"),
        }
    }
}

impl FromStr for SuiteName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "small13" => Ok(SuiteName::Small13),
            "large13" => Ok(SuiteName::Large13),
            "small134" => Ok(SuiteName::Small134),
            "large134" => Ok(SuiteName::Large134),
            _ => match lower.strip_prefix("ladder-") {
                Some(p) => Ok(SuiteName::AppendixLadder(p.parse()?)),
                None => Err(Error::InvalidArgument(format!(
                    "unknown suite '{s}' (expected small13, large13, small134, large134 or ladder-<p13|p123|p134>)"
                ))),
            },
        }
    }
}

/// Seed of the `k`-th instance of a given size.
pub fn instance_seed(m: usize, k: usize) -> u64 {
    ((m as u64) << 16) | k as u64
}

/// Specs of a named suite with its default number of seeds per size.
pub fn suite(name: SuiteName) -> Vec<InstanceSpec> {
    suite_with_seeds(name, name.default_seeds())
}

pub fn suite_with_seeds(name: SuiteName, seeds: usize) -> Vec<InstanceSpec> {
    name.shapes()
        .into_iter()
        .flat_map(|(m, n, r)| (0..seeds).map(move |k| InstanceSpec::new(m, n, r, instance_seed(m, k))))
        .collect()
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} n={} r={} seed={} sv=", self.m, self.n, self.r, self.seed)?;
        match &self.singular_values {
            SingularValues::Geometric(big_m) => write!(f, "geometric:{big_m}"),
            SingularValues::UnitSpread => write!(f, "unit"),
            SingularValues::Explicit(s) => {
                let parts: Vec<String> = s.iter().map(|x| format!("{x:e}")).collect();
                write!(f, "explicit:{}", parts.join(","))
            }
        }
    }
}

impl FromStr for SingularValues {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad singular value profile '{s}'"));
        if s == "unit" {
            return Ok(SingularValues::UnitSpread);
        }
        if let Some(v) = s.strip_prefix("geometric:") {
            return v.parse().map(SingularValues::Geometric).map_err(|_| bad());
        }
        if let Some(v) = s.strip_prefix("explicit:") {
            return v
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(SingularValues::Explicit)
                .map_err(|_| bad());
        }
        Err(bad())
    }
}

impl FromStr for InstanceSpec {
    type Err = Error;

    /// Parses the `key=value` form produced by `Display`.
    fn from_str(line: &str) -> Result<Self> {
        let (mut m, mut n, mut r, mut seed) = (None, None, None, None);
        let mut sv = SingularValues::Geometric(2.0);
        for token in line.split_whitespace() {
            let (key, value) = token
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got '{token}'")))?;
            let count = |v: &str| {
                v.parse::<usize>()
                    .map_err(|_| Error::InvalidArgument(format!("bad value for {key}: '{v}'")))
            };
            match key {
                "m" => m = Some(count(value)?),
                "n" => n = Some(count(value)?),
                "r" => r = Some(count(value)?),
                "seed" => {
                    seed = Some(value.parse::<u64>().map_err(|_| {
                        Error::InvalidArgument(format!("bad seed '{value}'"))
                    })?)
                }
                "sv" => sv = value.parse()?,
                other => return Err(Error::InvalidArgument(format!("unknown key '{other}'"))),
            }
        }
        let missing = |k: &str| Error::InvalidArgument(format!("missing key '{k}'"));
        let spec = InstanceSpec {
            m: m.ok_or_else(|| missing("m"))?,
            n: n.ok_or_else(|| missing("n"))?,
            r: r.ok_or_else(|| missing("r"))?,
            singular_values: sv,
            seed: seed.ok_or_else(|| missing("seed"))?,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// One spec per line; `#` starts a comment.
pub fn write_suite_config(specs: &[InstanceSpec]) -> String {
    let mut out = String::new();
    for s in specs {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

pub fn parse_suite_config(text: &str) -> Result<Vec<InstanceSpec>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}
