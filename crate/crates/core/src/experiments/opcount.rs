//! Multiplications needed to converge along a decreasing λ grid.
//!
//! Every solver walks the grid from the largest ratio down, each run warm
//! started from the previous solution. Runs that hit the budget are recorded
//! as non-converged.

use std::io::Write;

use ndarray::Array1;
use rayon::prelude::*;

use super::{format_float, make_instance, mean, run_solver, with_pool, write_csv, BenchSolver, ExperimentConfig};
use crate::dictgen::DictionaryVariant;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct OpcountRecord {
    pub dict: DictionaryVariant,
    pub lambda_ratio: f64,
    pub solver: BenchSolver,
    pub trial: usize,
    pub mults: u64,
    pub converged: bool,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpcountRow {
    pub dict: DictionaryVariant,
    pub lambda_ratio: f64,
    pub solver: BenchSolver,
    /// Mean over trials, `+∞` if any trial failed to converge.
    pub mults_to_converge: f64,
}

fn grid_records(cfg: &ExperimentConfig, dict: DictionaryVariant, solver: BenchSolver, trial: usize) -> Result<Vec<OpcountRecord>> {
    let seed = cfg.seed.wrapping_add(trial as u64);
    let base = make_instance(dict, cfg.m, cfg.n, seed, cfg.lambda_ratios[0])?;
    let lmax = base.lambda_max();
    let mut warm: Option<Array1<f64>> = None;
    let mut records = Vec::with_capacity(cfg.lambda_ratios.len());
    for &ratio in &cfg.lambda_ratios {
        let instance = base.with_lambda(ratio * lmax)?;
        let run = run_solver(solver, &instance, cfg.gap_tol_for(solver), Some(cfg.budget), warm.as_ref().map(|x| x.view()))?;
        records.push(OpcountRecord {
            dict,
            lambda_ratio: ratio,
            solver,
            trial,
            mults: run.mults,
            converged: run.converged,
            gap: run.gap,
        });
        warm = Some(run.x);
    }
    Ok(records)
}

/// Per-trial records ordered by (dict, trial, solver, ratio).
pub fn opcount_records(cfg: &ExperimentConfig) -> Result<Vec<OpcountRecord>> {
    let jobs: Vec<(DictionaryVariant, usize, BenchSolver)> = cfg
        .dicts
        .iter()
        .flat_map(|&d| (0..cfg.trials).flat_map(move |t| cfg.solvers.iter().map(move |&s| (d, t, s))))
        .collect();
    let results: Vec<Result<Vec<OpcountRecord>>> =
        with_pool(cfg.threads, || jobs.par_iter().map(|&(d, t, s)| grid_records(cfg, d, s, t)).collect())?;
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

pub fn aggregate_opcount(cfg: &ExperimentConfig, records: &[OpcountRecord]) -> Vec<OpcountRow> {
    let mut rows = Vec::new();
    for &dict in &cfg.dicts {
        for &ratio in &cfg.lambda_ratios {
            for &solver in &cfg.solvers {
                let group: Vec<&OpcountRecord> = records
                    .iter()
                    .filter(|r| r.dict == dict && r.lambda_ratio == ratio && r.solver == solver)
                    .collect();
                let mults_to_converge = if group.iter().all(|r| r.converged) {
                    mean(&group.iter().map(|r| r.mults as f64).collect::<Vec<_>>())
                } else {
                    f64::INFINITY
                };
                rows.push(OpcountRow { dict, lambda_ratio: ratio, solver, mults_to_converge });
            }
        }
    }
    rows
}

pub fn exp_opcount(cfg: &ExperimentConfig) -> Result<Vec<OpcountRow>> {
    let records = opcount_records(cfg)?;
    for r in records.iter().filter(|r| !r.converged) {
        log::warn!(
            "{} λ/λmax={} {} trial {}: budget exhausted at gap {:e}",
            r.dict.name(),
            r.lambda_ratio,
            r.solver.name(),
            r.trial,
            r.gap
        );
    }
    Ok(aggregate_opcount(cfg, &records))
}

pub fn write_opcount_csv<W: Write>(out: W, rows: &[OpcountRow]) -> Result<()> {
    write_csv(
        out,
        "dict,lambda_ratio,solver,mults_to_converge",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{}",
                r.dict.name(),
                format_float(r.lambda_ratio),
                r.solver.name(),
                format_float(r.mults_to_converge)
            )
        }),
    )
}
