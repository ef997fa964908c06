//! Single solves with a JSON report.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use serde::Serialize;

use super::{run_solver, BenchSolver};
use crate::dictgen::{generate_dictionary, generate_observation, read_matrix_csv, read_vector_csv, DictionaryKind, DictionaryVariant};
use crate::problem::ProblemInstance;
use crate::solvers::TraceRecord;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Generated { dict: DictionaryVariant, m: usize, n: usize, seed: u64 },
    Files { a: PathBuf, y: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveRequest {
    pub source: InstanceSource,
    pub lambda_ratio: f64,
    pub solver: BenchSolver,
    pub gap_tol: f64,
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SetsReport {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
}

/// Result of [`solve_once`]; `x` refers to the column-normalized dictionary.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub solver: BenchSolver,
    pub m: usize,
    pub n: usize,
    pub lambda: f64,
    pub lambda_max: f64,
    pub converged: bool,
    pub x: Vec<f64>,
    pub linf: f64,
    pub sets: SetsReport,
    pub u: Vec<f64>,
    pub gap: f64,
    pub iterations: usize,
    pub mults: u64,
    pub column_scales: Vec<f64>,
    pub trace: Vec<TraceRecord>,
}

fn open(path: &PathBuf) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_instance(source: &InstanceSource) -> Result<ProblemInstance> {
    let (a, y) = match source {
        InstanceSource::Generated { dict, m, n, seed } => {
            (generate_dictionary(DictionaryKind::new(*dict, *seed), *m, *n)?, generate_observation(*seed, *m)?)
        }
        InstanceSource::Files { a, y } => (read_matrix_csv(open(a)?)?, read_vector_csv(open(y)?)?),
    };
    ProblemInstance::new(a, y, 1.0)
}

pub fn solve_once(request: &SolveRequest) -> Result<SolveReport> {
    if !(request.lambda_ratio > 0.0 && request.lambda_ratio.is_finite()) {
        return Err(Error::InvalidArgument(format!("lambda ratio must be positive, got {}", request.lambda_ratio)));
    }
    let base = load_instance(&request.source)?;
    let lambda_max = base.lambda_max();
    if lambda_max <= 0.0 {
        return Err(Error::InvalidArgument("observation is orthogonal to the dictionary".into()));
    }
    let instance = base.with_lambda(request.lambda_ratio * lambda_max)?;
    let run = run_solver(request.solver, &instance, request.gap_tol, request.budget, None)?;
    let linf = run.x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    Ok(SolveReport {
        solver: request.solver,
        m: instance.m(),
        n: instance.n(),
        lambda: instance.lambda(),
        lambda_max,
        converged: run.converged,
        linf,
        x: run.x.to_vec(),
        sets: SetsReport { plus: run.sets.plus().to_vec(), minus: run.sets.minus().to_vec() },
        u: run.u.u.to_vec(),
        gap: run.gap,
        iterations: run.iterations,
        mults: run.mults,
        column_scales: instance.column_scales().to_vec(),
        trace: run.trace.records,
    })
}
