use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sparse_ginv::instances::{generate, InstanceSpec};
use sparse_ginv::properties::{bounds, factor, residuals, satisfies, scaled_tol, solution_rank, ZERO_TOL};
use sparse_ginv::{ProblemKind, SolveReport, Trace};

use crate::solve::{Method, Prepared, SolverOptions};

/// One CSV row per (instance, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub problem: String,
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub seed: u64,
    pub method: String,
    pub one_norm: f64,
    pub zero_norm: usize,
    pub rank_h: usize,
    /// `(‖H‖₀ − ‖A†‖₀)/‖A†‖₀`
    pub zero_factor_pinv: f64,
    pub one_factor_pinv: f64,
    /// Same factors against the DRS_fp solution of the instance.
    pub zero_factor_fp: f64,
    pub one_factor_fp: f64,
    /// `‖H‖₀ / β` for the problem's bound.
    pub bound_ratio: f64,
    pub iterations: usize,
    pub elapsed: f64,
    pub status: String,
}

pub const CSV_HEADER: &str = "instance,problem,m,n,r,seed,method,one_norm,zero_norm,rank_h,zero_factor_pinv,one_factor_pinv,zero_factor_fp,one_factor_fp,bound_ratio,iterations,elapsed,status";

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub solver: SolverOptions,
    /// Directory for per-iteration traces, one CSV per (instance, method).
    pub trace_dir: Option<PathBuf>,
    pub trace_stride: usize,
    /// Feasibility tolerance for the verification of each row, before scaling.
    pub verify_tol: f64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            solver: SolverOptions::default(),
            trace_dir: None,
            trace_stride: 50,
            verify_tol: 1e-5,
        }
    }
}

/// Solution of a cell together with its statistics row.
pub struct Cell {
    pub row: BenchRow,
    pub report: Option<SolveReport>,
}

struct Baseline {
    zero: f64,
    one: f64,
}

fn error_row(spec: &InstanceSpec, problem: ProblemKind, method: Method, msg: String) -> BenchRow {
    BenchRow {
        instance: spec.name(),
        problem: problem.to_string(),
        m: spec.m,
        n: spec.n,
        r: spec.r,
        seed: spec.seed,
        method: method.to_string(),
        one_norm: f64::NAN,
        zero_norm: 0,
        rank_h: 0,
        zero_factor_pinv: f64::NAN,
        one_factor_pinv: f64::NAN,
        zero_factor_fp: f64::NAN,
        one_factor_fp: f64::NAN,
        bound_ratio: f64::NAN,
        iterations: 0,
        elapsed: 0.0,
        status: format!("error: {msg}"),
    }
}

fn trace_path(dir: &Path, spec: &InstanceSpec, problem: ProblemKind, method: Method) -> PathBuf {
    dir.join(format!("{}_{}_{}.csv", spec.name(), problem, method))
}

/// Runs the protocol on one instance: DRS_fp first, then every other method
/// with the DRS_fp 1-norm as its target. The baseline row is kept only if
/// `drs-fp` is among `methods`.
pub fn bench_instance(spec: &InstanceSpec, problem: ProblemKind, methods: &[Method], opts: &BenchOptions) -> Vec<Cell> {
    let prepared = match generate(spec).and_then(Prepared::new) {
        Ok(p) => p,
        Err(e) => {
            return methods
                .iter()
                .map(|&m| Cell {
                    row: error_row(spec, problem, m, e.to_string()),
                    report: None,
                })
                .collect()
        }
    };
    let pinv_zero = prepared.a_dagger.zero_norm(ZERO_TOL) as f64;
    let pinv_one = prepared.a_dagger.one_norm();
    let beta = bounds(spec.m, spec.n, spec.r).map(|b| b.for_problem(problem) as f64).unwrap_or(f64::NAN);

    let run = |method: Method, target: Option<f64>| -> Cell {
        let mut trace = opts.trace_dir.as_ref().map(|_| Trace::new(opts.trace_stride));
        let result = prepared.run(problem, method, &opts.solver, target, trace.as_mut());
        let report = match result {
            Ok(r) => r,
            Err(e) => {
                return Cell {
                    row: error_row(spec, problem, method, e.to_string()),
                    report: None,
                }
            }
        };
        if let (Some(dir), Some(trace)) = (&opts.trace_dir, &trace) {
            let written = std::fs::File::create(trace_path(dir, spec, problem, method))
                .and_then(|f| trace.write_csv(std::io::BufWriter::new(f)));
            if let Err(e) = written {
                return Cell {
                    row: error_row(spec, problem, method, format!("trace: {e}")),
                    report: Some(report),
                };
            }
        }
        let verified = residuals(&prepared.a, &prepared.a_dagger, &report.h)
            .map(|res| satisfies(problem, &res, scaled_tol(&prepared.a, opts.verify_tol)))
            .unwrap_or(false);
        let status = if verified {
            report.status.to_string()
        } else {
            "error: output failed verification".to_string()
        };
        let row = BenchRow {
            instance: spec.name(),
            problem: problem.to_string(),
            m: spec.m,
            n: spec.n,
            r: spec.r,
            seed: spec.seed,
            method: method.to_string(),
            one_norm: report.one_norm,
            zero_norm: report.zero_norm,
            rank_h: solution_rank(&report.h).unwrap_or(0),
            zero_factor_pinv: factor(report.zero_norm as f64, pinv_zero).unwrap_or(f64::NAN),
            one_factor_pinv: factor(report.one_norm, pinv_one).unwrap_or(f64::NAN),
            zero_factor_fp: f64::NAN,
            one_factor_fp: f64::NAN,
            bound_ratio: report.zero_norm as f64 / beta,
            iterations: report.iterations,
            elapsed: report.elapsed.as_secs_f64(),
            status,
        };
        Cell { row, report: Some(report) }
    };

    let mut base_cell = run(Method::DrsFp, None);
    let baseline = base_cell.report.as_ref().map(|r| Baseline {
        zero: r.zero_norm as f64,
        one: r.one_norm,
    });
    let with_fp = |mut cell: Cell| {
        if let (Some(b), Some(r)) = (&baseline, &cell.report) {
            cell.row.zero_factor_fp = factor(r.zero_norm as f64, b.zero).unwrap_or(f64::NAN);
            cell.row.one_factor_fp = factor(r.one_norm, b.one).unwrap_or(f64::NAN);
        }
        cell
    };
    base_cell = with_fp(base_cell);

    let mut out = Vec::with_capacity(methods.len());
    for &method in methods {
        if method == Method::DrsFp {
            out.push(Cell {
                row: base_cell.row.clone(),
                report: base_cell.report.clone(),
            });
            continue;
        }
        let cell = match &baseline {
            Some(b) => with_fp(run(method, Some(b.one))),
            None => Cell {
                row: error_row(spec, problem, method, "DRS_fp baseline failed".into()),
                report: None,
            },
        };
        out.push(cell);
    }
    out
}

/// Runs every instance, up to `jobs` at a time, and returns rows in input order.
pub fn bench_suite(
    specs: &[InstanceSpec],
    problem: ProblemKind,
    methods: &[Method],
    opts: &BenchOptions,
    jobs: usize,
) -> anyhow::Result<Vec<BenchRow>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let rows = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| bench_instance(spec, problem, methods, opts).into_iter().map(|c| c.row).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    });
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_rows<W: std::io::Write>(rows: &[BenchRow], w: W) -> anyhow::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for row in rows {
        wtr.serialize(row)?;
    }
    if rows.is_empty() {
        wtr.write_record(CSV_HEADER.split(','))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_rows<R: std::io::Read>(r: R) -> anyhow::Result<Vec<BenchRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    anyhow::ensure!(header.join(",") == CSV_HEADER, "unexpected CSV header: {}", header.join(","));
    Ok(rdr.deserialize().collect::<Result<_, _>>()?)
}
