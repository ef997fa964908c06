//! Performance profiles of the achieved dual gap under a multiplication budget.

use std::io::Write;

use rayon::prelude::*;

use super::{format_float, make_instance, run_solver, with_pool, write_csv, BenchSolver, ExperimentConfig};
use crate::dictgen::DictionaryVariant;
use crate::metrics::{default_tau_grid, performance_profile};
use crate::Result;

/// Runs stop early once the gap reaches the smallest profiled threshold.
pub const PROFILE_GAP_TARGET: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRecord {
    pub dict: DictionaryVariant,
    pub lambda_ratio: f64,
    pub solver: BenchSolver,
    pub trial: usize,
    pub gap: f64,
    pub mults: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub dict: DictionaryVariant,
    pub lambda_ratio: f64,
    pub solver: BenchSolver,
    pub tau: f64,
    pub rho: f64,
}

/// Per-trial achieved gaps ordered by (dict, ratio, trial, solver).
pub fn profile_records(cfg: &ExperimentConfig) -> Result<Vec<ProfileRecord>> {
    let jobs: Vec<(DictionaryVariant, f64, usize, BenchSolver)> = cfg
        .dicts
        .iter()
        .flat_map(|&d| {
            cfg.lambda_ratios.iter().flat_map(move |&r| {
                (0..cfg.trials).flat_map(move |t| cfg.solvers.iter().map(move |&s| (d, r, t, s)))
            })
        })
        .collect();
    let target = cfg.gap_tol.unwrap_or(PROFILE_GAP_TARGET);
    let run = |&(dict, ratio, trial, solver): &(DictionaryVariant, f64, usize, BenchSolver)| -> Result<ProfileRecord> {
        let instance = make_instance(dict, cfg.m, cfg.n, cfg.seed.wrapping_add(trial as u64), ratio)?;
        let out = run_solver(solver, &instance, target, Some(cfg.budget), None)?;
        Ok(ProfileRecord { dict, lambda_ratio: ratio, solver, trial, gap: out.gap, mults: out.mults })
    };
    let results: Vec<Result<ProfileRecord>> = with_pool(cfg.threads, || jobs.par_iter().map(run).collect())?;
    results.into_iter().collect()
}

pub fn aggregate_profile(cfg: &ExperimentConfig, records: &[ProfileRecord]) -> Result<Vec<ProfileRow>> {
    let taus = default_tau_grid();
    let mut rows = Vec::new();
    for &dict in &cfg.dicts {
        for &ratio in &cfg.lambda_ratios {
            let gaps: Vec<Vec<f64>> = (0..cfg.trials)
                .map(|t| {
                    cfg.solvers
                        .iter()
                        .map(|&s| {
                            records
                                .iter()
                                .find(|r| r.dict == dict && r.lambda_ratio == ratio && r.trial == t && r.solver == s)
                                .map_or(f64::INFINITY, |r| r.gap)
                        })
                        .collect()
                })
                .collect();
            let curves = performance_profile(&gaps, &taus)?;
            for (&solver, curve) in cfg.solvers.iter().zip(&curves) {
                for (&tau, &rho) in curve.taus.iter().zip(&curve.rho) {
                    rows.push(ProfileRow { dict, lambda_ratio: ratio, solver, tau, rho });
                }
            }
        }
    }
    Ok(rows)
}

pub fn exp_profile(cfg: &ExperimentConfig) -> Result<Vec<ProfileRow>> {
    let records = profile_records(cfg)?;
    aggregate_profile(cfg, &records)
}

pub fn write_profile_csv<W: Write>(out: W, rows: &[ProfileRow]) -> Result<()> {
    write_csv(
        out,
        "dict,lambda_ratio,solver,tau,rho",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{}",
                r.dict.name(),
                format_float(r.lambda_ratio),
                r.solver.name(),
                format_float(r.tau),
                format_float(r.rho)
            )
        }),
    )
}
