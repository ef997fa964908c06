//! Detection, operation-count and performance-profile experiments, single
//! solves, and their CSV/JSON output.
//!
//! Trials run on a rayon pool and are merged by trial index, so outputs are
//! deterministic functions of the configuration regardless of thread count.

mod config;
mod detection;
mod opcount;
mod profile;
mod solve;

use std::io::Write;

use ndarray::{Array1, ArrayView1};

use crate::dictgen::{generate_dictionary, generate_observation, DictionaryKind, DictionaryVariant};
use crate::dynamic::{dynamic_solve_from, DynamicConfig};
use crate::problem::{dual_scaling, DualPoint, ProblemInstance, SaturationSets};
use crate::solvers::{fitra_solve, FitraConfig, SolverKind, SolverTrace};
use crate::squeeze::SphereKind;
use crate::{Error, Result};

pub use config::{default_opcount_grid, default_r0_grid, BenchSolver, ConfigLayer, Experiment, ExperimentConfig};
pub use detection::{
    aggregate_detection, detection_records, exp_detection, write_detection_csv, DetectionRecord, DetectionRow,
    REFERENCE_GAP_TOL, REFERENCE_MAX_ITERS, SATURATION_MARGIN,
};
pub use opcount::{aggregate_opcount, exp_opcount, opcount_records, write_opcount_csv, OpcountRecord, OpcountRow};
pub use profile::{
    aggregate_profile, exp_profile, profile_records, write_profile_csv, ProfileRecord, ProfileRow, PROFILE_GAP_TARGET,
};
pub use solve::{solve_once, InstanceSource, SolveReport, SolveRequest};

/// Instance of trial `seed` with `λ = ratio·λmax`.
pub fn make_instance(variant: DictionaryVariant, m: usize, n: usize, seed: u64, ratio: f64) -> Result<ProblemInstance> {
    let a = generate_dictionary(DictionaryKind::new(variant, seed), m, n)?;
    let y = generate_observation(seed, m)?;
    let base = ProblemInstance::new(a, y, 1.0)?;
    let lmax = base.lambda_max();
    if lmax <= 0.0 {
        return Err(Error::InvalidArgument("observation is orthogonal to the dictionary".into()));
    }
    base.with_lambda(ratio * lmax)
}

/// Outcome of one benchmarked solver run.
#[derive(Debug, Clone)]
pub struct BenchRun {
    pub x: Array1<f64>,
    pub u: DualPoint,
    pub gap: f64,
    pub converged: bool,
    pub mults: u64,
    pub iterations: usize,
    pub sets: SaturationSets,
    pub trace: SolverTrace,
}

/// Runs `solver` until the gap drops to `gap_tol` or `budget` multiplications are spent.
pub fn run_solver(
    solver: BenchSolver,
    instance: &ProblemInstance,
    gap_tol: f64,
    budget: Option<u64>,
    warm: Option<ArrayView1<'_, f64>>,
) -> Result<BenchRun> {
    if solver == BenchSolver::Fitra {
        let cfg = FitraConfig { max_iters: usize::MAX, gap_tol, budget, ..FitraConfig::default() };
        let rep = fitra_solve(instance, &cfg, warm)?;
        let r = &instance.y() - &instance.a().dot(&rep.x);
        let u = dual_scaling(instance, &SaturationSets::empty(), r.view())?;
        return Ok(BenchRun {
            x: rep.x,
            u,
            gap: rep.gap,
            converged: rep.converged,
            mults: rep.mults,
            iterations: rep.iterations,
            sets: SaturationSets::empty(),
            trace: rep.trace,
        });
    }
    let (kind, squeeze) = match solver {
        BenchSolver::Fw => (SolverKind::Fw, false),
        BenchSolver::Fws => (SolverKind::Fw, true),
        _ => (SolverKind::Pg, true),
    };
    let cfg = DynamicConfig {
        solver: kind,
        sphere: SphereKind::Gap,
        gap_tol,
        max_outer: usize::MAX,
        squeeze_enabled: squeeze,
        budget,
        ..DynamicConfig::default()
    };
    let rep = dynamic_solve_from(instance, &cfg, warm)?;
    Ok(BenchRun {
        x: rep.x,
        u: rep.u,
        gap: rep.gap,
        converged: rep.converged,
        mults: rep.mults,
        iterations: rep.solver_iterations,
        sets: rep.sets,
        trace: rep.trace,
    })
}

/// Runs `f` on a pool of `threads` workers (all processors when `None`).
pub fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// 17 significant digits; infinities as `inf`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

fn write_csv<W: Write>(mut out: W, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let mut buf = String::from(header);
    buf.push('\n');
    for row in rows {
        buf.push_str(&row);
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}
