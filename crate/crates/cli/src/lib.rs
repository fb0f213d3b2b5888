//! Command-line driver: instance generation, solving, verification, LP export
//! and benchmark tables.

pub mod bench;
pub mod solve;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sparse_ginv::instances::{generate, parse_suite_config, suite_with_seeds, InstanceSpec, SingularValues, SuiteName};
use sparse_ginv::lp::{build_lp, write_lp_file, FormulationId};
use sparse_ginv::mtx::{read_matrix, write_matrix};
use sparse_ginv::properties::{bounds, residuals, satisfies, scaled_tol, solution_rank, ZERO_TOL};
use sparse_ginv::svd::{full_svd, singular_values, DEFAULT_RANK_TOL};
use sparse_ginv::{DenseMatrix, ProblemKind, SolveReport, Trace};

use bench::{bench_suite, write_rows, BenchOptions};
use solve::{Method, Prepared, SolverOptions};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SPARSE_GINV_OUT";

#[derive(Debug, Parser)]
#[command(name = "sparse-ginv", version, about = "Sparse generalized inverses by DRS, ADMM and LP")]
pub struct Cli {
    /// Default directory for outputs whose path is not given.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random instance with prescribed rank and singular values.
    Generate(GenerateArgs),
    /// Solve one problem on a matrix file.
    Solve(SolveArgs),
    /// Check the Moore–Penrose properties of a candidate H.
    Verify(VerifyArgs),
    /// Write an LP formulation in CPLEX LP format.
    ExportLp(ExportArgs),
    /// Run the DRS_fp-first protocol over a suite and write a CSV table.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `geometric:<M>`, `unit`, or `explicit:<s1>,<s2>,...`
    #[arg(long, default_value = "geometric:2")]
    pub sv: SingularValues,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct SolverArgs {
    /// DRS prox step.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// ADMM penalty.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long)]
    pub eps_abs: Option<f64>,
    #[arg(long)]
    pub eps_rel: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iter: usize,
    /// Wall-clock limit per solve, in seconds.
    #[arg(long, default_value_t = 300.0)]
    pub time_limit: f64,
}

impl SolverArgs {
    fn options(&self) -> anyhow::Result<SolverOptions> {
        let time_limit = Duration::try_from_secs_f64(self.time_limit).context("--time-limit")?;
        Ok(SolverOptions {
            lambda: self.lambda,
            rho: self.rho,
            eps_abs: self.eps_abs,
            eps_rel: self.eps_rel,
            max_iter: self.max_iter,
            time_limit,
        })
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub problem: ProblemKind,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Solve on Aᵀ and transpose the result (P14 / P124 families).
    #[arg(long)]
    pub transpose: bool,
    /// Stop once the 1-norm is within a relative 1e-5 of this value.
    #[arg(long)]
    pub target_one_norm: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Per-iteration trace CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub trace_stride: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub h: PathBuf,
    #[arg(long)]
    pub problem: ProblemKind,
    /// Residual tolerance, scaled by max(1, ‖A‖_F).
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Check the transposed property set (P1 with P4 in place of P3).
    #[arg(long)]
    pub transpose: bool,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Formulation identifier, e.g. `p13_pls` or `ppls1`.
    #[arg(long)]
    pub formulation: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// small13, large13, small134, large134, ladder-p13, ladder-p123, ladder-p134
    #[arg(long, required_unless_present = "suite_config")]
    pub suite: Option<SuiteName>,
    /// Instance list in suite-config format instead of a named suite.
    #[arg(long)]
    pub suite_config: Option<PathBuf>,
    #[arg(long)]
    pub problem: ProblemKind,
    #[arg(long, value_enum, value_delimiter = ',', required = true, num_args = 1..)]
    pub methods: Vec<Method>,
    /// Seeds per size (defaults to the suite's own count).
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Keep only these row counts `m`.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Vec<usize>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub trace_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub trace_stride: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Instances solved concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// JSON written next to a solution.
#[derive(Debug, Serialize)]
pub struct SolveOutput<'a> {
    pub problem: ProblemKind,
    pub method: Method,
    pub transpose: bool,
    pub m: usize,
    pub n: usize,
    pub rank: usize,
    pub h_path: &'a Path,
    #[serde(flatten)]
    pub report: &'a SolveReport,
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into())
}

fn default_path(dir: &Path, given: &Option<PathBuf>, name: String) -> anyhow::Result<PathBuf> {
    if let Some(p) = given {
        return Ok(p.clone());
    }
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.join(name))
}

pub fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Generate(args) => generate_cmd(&cli.out_dir, args),
        Command::Solve(args) => solve_cmd(&cli.out_dir, args),
        Command::Verify(args) => verify_cmd(args),
        Command::ExportLp(args) => export_cmd(&cli.out_dir, args),
        Command::Bench(args) => bench_cmd(&cli.out_dir, args),
    }
}

fn generate_cmd(out_dir: &Path, args: GenerateArgs) -> anyhow::Result<ExitCode> {
    let spec = InstanceSpec {
        m: args.m,
        n: args.n,
        r: args.rank,
        singular_values: args.sv,
        seed: args.seed,
    };
    spec.validate()?;
    let a = generate(&spec)?;
    let path = default_path(out_dir, &args.out, format!("{}.mtx", spec.name()))?;
    write_matrix(&a, &path)?;
    let sv = singular_values(&a)?;
    let rank = sparse_ginv::svd::numerical_rank(&a, DEFAULT_RANK_TOL)?;
    println!(
        "m={} n={} rank={} sigma_max={:.6e} sigma_min_nonzero={:.6e} -> {}",
        spec.m,
        spec.n,
        rank,
        sv[0],
        sv[rank.saturating_sub(1)],
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn solve_cmd(out_dir: &Path, args: SolveArgs) -> anyhow::Result<ExitCode> {
    let a = read_matrix(&args.matrix)?;
    let work = if args.transpose { a.transpose() } else { a.clone() };
    if args.method == Method::Admm && args.problem == ProblemKind::P13 {
        bail!("admm is not available for p13; use drs-fp or drs-res");
    }
    let opts = args.solver.options()?;
    let prepared = Prepared::new(work)?;
    let mut trace = args.trace.as_ref().map(|_| Trace::new(args.trace_stride));
    let mut report = prepared.run(args.problem, args.method, &opts, args.target_one_norm, trace.as_mut())?;
    if args.transpose {
        report.h = report.h.transpose();
    }

    let base = format!("{}_{}_{}", stem(&args.matrix), args.problem, args.method);
    let h_path = default_path(out_dir, &args.out, format!("{base}.mtx"))?;
    write_matrix(&report.h, &h_path)?;
    let report_path = match &args.report {
        Some(p) => p.clone(),
        None => h_path.with_extension("json"),
    };
    let out = SolveOutput {
        problem: args.problem,
        method: args.method,
        transpose: args.transpose,
        m: a.rows(),
        n: a.cols(),
        rank: prepared.svd.rank,
        h_path: &h_path,
        report: &report,
    };
    std::fs::write(&report_path, serde_json::to_string_pretty(&out)?)?;
    if let (Some(path), Some(trace)) = (&args.trace, &trace) {
        trace.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))?;
    }
    println!(
        "status={} iterations={} one_norm={:.8e} zero_norm={} elapsed={:.3}s -> {}",
        report.status,
        report.iterations,
        report.one_norm,
        report.zero_norm,
        report.elapsed.as_secs_f64(),
        h_path.display()
    );
    Ok(ExitCode::SUCCESS)
}

/// Residuals, norms and bound ratios of `h`; `transpose` checks `Hᵀ` against `Aᵀ`.
pub struct Verification {
    pub residuals: sparse_ginv::properties::PropertyResiduals,
    pub passed: bool,
    pub one_norm: f64,
    pub zero_norm: usize,
    pub rank_h: usize,
    pub rank_a: usize,
    pub bound_ratio: f64,
}

pub fn verify(a: &DenseMatrix, h: &DenseMatrix, problem: ProblemKind, tol: f64, transpose: bool) -> anyhow::Result<Verification> {
    if h.shape() != (a.cols(), a.rows()) {
        bail!(
            "dimension mismatch: A is {}x{}, so H must be {}x{}, found {}x{}",
            a.rows(),
            a.cols(),
            a.cols(),
            a.rows(),
            h.rows(),
            h.cols()
        );
    }
    let (a, h) = if transpose { (a.transpose(), h.transpose()) } else { (a.clone(), h.clone()) };
    let svd = full_svd(&a, DEFAULT_RANK_TOL)?;
    let res = residuals(&a, &svd.pseudoinverse(), &h)?;
    let zero_norm = h.zero_norm(ZERO_TOL);
    let beta = bounds(a.rows(), a.cols(), svd.rank)?.for_problem(problem);
    Ok(Verification {
        residuals: res,
        passed: satisfies(problem, &res, scaled_tol(&a, tol)),
        one_norm: h.one_norm(),
        zero_norm,
        rank_h: solution_rank(&h)?,
        rank_a: svd.rank,
        bound_ratio: zero_norm as f64 / beta as f64,
    })
}

fn verify_cmd(args: VerifyArgs) -> anyhow::Result<ExitCode> {
    let a = read_matrix(&args.matrix)?;
    let h = read_matrix(&args.h)?;
    let v = verify(&a, &h, args.problem, args.tol, args.transpose)?;
    let r = &v.residuals;
    println!("p1={:.3e} p2={:.3e} p3={:.3e} p4={:.3e}", r.p1, r.p2, r.p3, r.p4);
    println!("pls={:.3e} plsr={:.3e} pmn={:.3e} pmx={:.3e}", r.pls, r.plsr, r.pmn, r.pmx);
    println!(
        "one_norm={:.8e} zero_norm={} rank_h={} rank_a={} bound_ratio={:.4}",
        v.one_norm, v.zero_norm, v.rank_h, v.rank_a, v.bound_ratio
    );
    let label = if args.transpose { format!("{} (transposed)", args.problem) } else { args.problem.to_string() };
    if v.passed {
        println!("{label}: satisfied at tol {:e}", args.tol);
        Ok(ExitCode::SUCCESS)
    } else {
        println!("{label}: NOT satisfied at tol {:e}", args.tol);
        Ok(ExitCode::FAILURE)
    }
}

fn export_cmd(out_dir: &Path, args: ExportArgs) -> anyhow::Result<ExitCode> {
    let id: FormulationId = args.formulation.parse()?;
    let a = read_matrix(&args.matrix)?;
    let svd = full_svd(&a, DEFAULT_RANK_TOL)?;
    let mut lp = build_lp(&svd, &a, id)?;
    lp.name = format!("{}_{}", stem(&args.matrix), id);
    let path = default_path(out_dir, &args.out, format!("{}.lp", lp.name))?;
    write_lp_file(&lp, &path)?;
    println!(
        "{}: {} variables, {} equality rows, {} inequality rows -> {}",
        id,
        lp.num_vars,
        lp.eq_rows.len(),
        lp.ineq_rows.len(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn bench_cmd(out_dir: &Path, args: BenchArgs) -> anyhow::Result<ExitCode> {
    let mut specs = match (&args.suite_config, args.suite) {
        (Some(path), _) => parse_suite_config(&std::fs::read_to_string(path)?)?,
        (None, Some(suite)) => suite_with_seeds(suite, args.seeds.unwrap_or(suite.default_seeds())),
        (None, None) => bail!("either --suite or --suite-config is required"),
    };
    if !args.sizes.is_empty() {
        specs.retain(|s| args.sizes.contains(&s.m));
    }
    if specs.is_empty() {
        bail!("no instances selected");
    }
    if let Some(dir) = &args.trace_dir {
        std::fs::create_dir_all(dir)?;
    }
    let opts = BenchOptions {
        solver: args.solver.options()?,
        trace_dir: args.trace_dir.clone(),
        trace_stride: args.trace_stride.max(1),
        ..BenchOptions::default()
    };
    let label = args.suite.map(|s| s.to_string()).unwrap_or_else(|| "custom".into());
    let csv_path = default_path(out_dir, &args.csv, format!("bench_{label}_{}.csv", args.problem))?;
    let rows = bench_suite(&specs, args.problem, &args.methods, &opts, args.jobs)?;
    write_rows(&rows, std::fs::File::create(&csv_path)?)?;
    let failed = rows.iter().filter(|r| r.status.starts_with("error")).count();
    println!("{} rows ({} errors) -> {}", rows.len(), failed, csv_path.display());
    Ok(ExitCode::SUCCESS)
}
