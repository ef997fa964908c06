//! Detection rate of the squeezing test for spheres of decreasing quality.
//!
//! Each trial is reference-solved to high accuracy; ST1 and GAP spheres built
//! from the reference pair are inflated by `r₀` and tested once on the full
//! problem. The recorded value is the percentage of reference-saturated
//! entries that the test flags.

use std::io::Write;

use rayon::prelude::*;

use super::{format_float, make_instance, mean, with_pool, write_csv, ExperimentConfig};
use crate::dictgen::DictionaryVariant;
use crate::problem::SaturationSets;
use crate::solvers::reference_solve;
use crate::squeeze::{gap_radius, gap_scale, squeezing_test, SafeSphere, SphereKind};
use crate::Result;

pub const REFERENCE_GAP_TOL: f64 = 1e-14;
pub const REFERENCE_MAX_ITERS: usize = 500_000;
/// Entries within this distance of `‖x‖∞` count as saturated in a reference solution.
pub const SATURATION_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRecord {
    pub dict: DictionaryVariant,
    pub lambda_ratio: f64,
    pub trial: usize,
    pub r0: f64,
    pub sphere: SphereKind,
    /// Percentage of reference-saturated entries flagged with the right sign.
    pub pct_detected: f64,
    /// Flags outside the reference saturated set (a safe test yields none).
    pub false_flags: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRow {
    pub dict: DictionaryVariant,
    pub lambda_ratio: f64,
    pub r0: f64,
    pub sphere: SphereKind,
    pub pct_detected_mean: f64,
}

fn count_detected(flagged: &SaturationSets, reference: &SaturationSets) -> (usize, usize) {
    let hits = flagged.plus().iter().filter(|i| reference.plus().contains(i)).count()
        + flagged.minus().iter().filter(|i| reference.minus().contains(i)).count();
    (hits, flagged.len() - hits)
}

fn trial_records(cfg: &ExperimentConfig, dict: DictionaryVariant, ratio: f64, trial: usize) -> Result<Vec<DetectionRecord>> {
    let instance = make_instance(dict, cfg.m, cfg.n, cfg.seed.wrapping_add(trial as u64), ratio)?;
    let reference = reference_solve(&instance, REFERENCE_GAP_TOL, REFERENCE_MAX_ITERS)?;
    if !reference.converged {
        log::warn!(
            "{} λ/λmax={ratio} trial {trial}: reference solve stopped at gap {:e}; trial skipped",
            dict.name(),
            reference.gap
        );
        return Ok(Vec::new());
    }
    let saturated = reference.saturated(SATURATION_MARGIN);
    let y = instance.y().to_owned();
    let st1_radius = (&y - &reference.u.u).dot(&(&y - &reference.u.u)).sqrt();
    let y_norm_sq = y.dot(&y);
    let gap_r = gap_radius(reference.gap, gap_scale(y_norm_sq, instance.lambda(), reference.linf()))?;

    let mut records = Vec::with_capacity(2 * cfg.r0_grid.len());
    for &r0 in &cfg.r0_grid {
        for sphere_kind in [SphereKind::St1, SphereKind::Gap] {
            let sphere = match sphere_kind {
                SphereKind::St1 => SafeSphere::new(y.clone(), r0 + st1_radius)?,
                SphereKind::Gap => SafeSphere::new(reference.u.u.clone(), r0 + gap_r)?,
            };
            let flagged = squeezing_test(&instance, &sphere)?;
            let (hits, false_flags) = count_detected(&flagged, &saturated);
            if false_flags > 0 {
                log::warn!("{} trial {trial}: {false_flags} flags outside the reference saturated set", dict.name());
            }
            records.push(DetectionRecord {
                dict,
                lambda_ratio: ratio,
                trial,
                r0,
                sphere: sphere_kind,
                pct_detected: 100.0 * hits as f64 / saturated.len().max(1) as f64,
                false_flags,
            });
        }
    }
    Ok(records)
}

/// Per-trial detection percentages, ordered by (dict, ratio, trial, r0, sphere).
pub fn detection_records(cfg: &ExperimentConfig) -> Result<Vec<DetectionRecord>> {
    let jobs: Vec<(DictionaryVariant, f64, usize)> = cfg
        .dicts
        .iter()
        .flat_map(|&d| cfg.lambda_ratios.iter().flat_map(move |&r| (0..cfg.trials).map(move |t| (d, r, t))))
        .collect();
    let results: Vec<Result<Vec<DetectionRecord>>> =
        with_pool(cfg.threads, || jobs.par_iter().map(|&(d, r, t)| trial_records(cfg, d, r, t)).collect())?;
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Averages records over trials, one row per (dict, ratio, r0, sphere).
pub fn aggregate_detection(cfg: &ExperimentConfig, records: &[DetectionRecord]) -> Vec<DetectionRow> {
    let mut rows = Vec::new();
    for &dict in &cfg.dicts {
        for &ratio in &cfg.lambda_ratios {
            for &r0 in &cfg.r0_grid {
                for sphere in [SphereKind::St1, SphereKind::Gap] {
                    let values: Vec<f64> = records
                        .iter()
                        .filter(|r| r.dict == dict && r.lambda_ratio == ratio && r.r0 == r0 && r.sphere == sphere)
                        .map(|r| r.pct_detected)
                        .collect();
                    rows.push(DetectionRow { dict, lambda_ratio: ratio, r0, sphere, pct_detected_mean: mean(&values) });
                }
            }
        }
    }
    rows
}

pub fn exp_detection(cfg: &ExperimentConfig) -> Result<Vec<DetectionRow>> {
    let records = detection_records(cfg)?;
    Ok(aggregate_detection(cfg, &records))
}

pub fn write_detection_csv<W: Write>(out: W, rows: &[DetectionRow]) -> Result<()> {
    write_csv(
        out,
        "dict,lambda_ratio,r0,sphere_kind,pct_detected_mean",
        rows.iter().map(|r| {
            format!(
                "{},{},{},{},{}",
                r.dict.name(),
                format_float(r.lambda_ratio),
                format_float(r.r0),
                r.sphere.name(),
                format_float(r.pct_detected_mean)
            )
        }),
    )
}
