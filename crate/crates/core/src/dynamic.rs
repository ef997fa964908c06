//! Static squeezing and the dynamic squeezing loop.
//!
//! The dynamic loop alternates a safe-sphere squeezing test with a few solver
//! steps on the current squeezed problem. Detected sets only grow; when they
//! do, the squeezed problem is rebuilt and the iterate carried over by
//! dropping the newly saturated coordinates (their magnitude becomes `w`).

use ndarray::{Array1, ArrayView1};

use crate::metrics::OpCounter;
use crate::problem::{dual_scaling, DualPoint, PrimalPoint, ProblemInstance, SaturationSets};
use crate::solvers::{choose_alpha, Iterate, SolverKind, SolverTrace, TraceRecord, DEFAULT_REFRESH_EVERY};
use crate::squeeze::{gap_radius, gap_scale, merge_sets, sphere_st1, squeezing_test, test_correlations, SphereKind, SqueezedProblem};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DynamicConfig {
    pub solver: SolverKind,
    pub sphere: SphereKind,
    pub inner_iters_per_outer: usize,
    pub gap_tol: f64,
    pub max_outer: usize,
    pub squeeze_enabled: bool,
    /// Stop once this many multiplications have been spent.
    pub budget: Option<u64>,
    /// Solver steps between exact residual recomputations (0 disables).
    pub refresh_every: usize,
}

impl Default for DynamicConfig {
    fn default() -> Self {
        Self {
            solver: SolverKind::Pg,
            sphere: SphereKind::Gap,
            inner_iters_per_outer: 1,
            gap_tol: 1e-7,
            max_outer: 1_000_000,
            squeeze_enabled: true,
            budget: None,
            refresh_every: DEFAULT_REFRESH_EVERY,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub x: Array1<f64>,
    pub sets: SaturationSets,
    pub converged: bool,
    pub trace: SolverTrace,
    pub mults: u64,
    /// Final saturation level and free coefficients of the squeezed problem.
    pub point: PrimalPoint,
    /// Dual point from dual scaling of the final residual.
    pub u: DualPoint,
    pub gap: f64,
    pub outer_iterations: usize,
    pub solver_iterations: usize,
    /// Sizes `|I⁽ᵗ⁾|` after each outer iteration.
    pub set_sizes: Vec<usize>,
}

impl RunReport {
    pub fn linf(&self) -> f64 {
        self.x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Result of a one-shot squeezing test run before optimization.
#[derive(Debug, Clone)]
pub enum StaticSqueeze {
    /// `λ ≥ λmax`: the minimizer is zero and nothing needs squeezing.
    ZeroSolution,
    Squeezed { sets: SaturationSets, problem: SqueezedProblem },
}

/// One ST1 squeezing test with `u = dual_scaling(y)` and `I = ∅`.
pub fn static_squeeze(instance: &ProblemInstance) -> Result<StaticSqueeze> {
    if instance.has_zero_solution() {
        return Ok(StaticSqueeze::ZeroSolution);
    }
    let u = dual_scaling(instance, &SaturationSets::empty(), instance.y())?;
    let sphere = sphere_st1(instance, &u)?;
    let sets = squeezing_test(instance, &sphere)?;
    let problem = SqueezedProblem::new(instance, &sets)?;
    Ok(StaticSqueeze::Squeezed { sets, problem })
}

/// Dynamic squeezing from the zero vector.
pub fn dynamic_solve(instance: &ProblemInstance, config: &DynamicConfig) -> Result<RunReport> {
    dynamic_solve_from(instance, config, None)
}

/// Dynamic squeezing from an optional warm start `x₀` (sets always start empty).
pub fn dynamic_solve_from(
    instance: &ProblemInstance,
    config: &DynamicConfig,
    warm: Option<ArrayView1<'_, f64>>,
) -> Result<RunReport> {
    if config.inner_iters_per_outer == 0 {
        return Err(Error::InvalidArgument("inner_iters_per_outer must be at least 1".into()));
    }
    let n = instance.n();
    let m = instance.m();
    let lambda = instance.lambda();

    if instance.has_zero_solution() {
        return Ok(RunReport {
            x: Array1::zeros(n),
            sets: SaturationSets::empty(),
            converged: true,
            trace: SolverTrace::default(),
            mults: 0,
            point: PrimalPoint::zero(n),
            u: DualPoint::new(instance.y().to_owned()),
            gap: 0.0,
            outer_iterations: 0,
            solver_iterations: 0,
            set_sizes: Vec::new(),
        });
    }

    let mut counter = OpCounter::new();
    let mut sets = SaturationSets::empty();
    let mut sq = SqueezedProblem::new(instance, &sets)?;
    let start = match warm {
        Some(x) => {
            if x.len() != n {
                return Err(Error::DimensionMismatch(format!("warm start has length {}, expected {n}", x.len())));
            }
            PrimalPoint::from_full(x)
        }
        None => PrimalPoint::zero(n),
    };
    let cold = start.w == 0.0;
    let mut it = Iterate::new(&sq, start, &mut counter)?;

    // Aᵀy is the center correlation of every ST1 sphere; from a cold start it
    // equals the initial correlations.
    let aty: Option<Array1<f64>> = (config.squeeze_enabled && config.sphere == SphereKind::St1).then(|| {
        if cold {
            it.correlations().to_owned()
        } else {
            counter.add_matvec(m, n);
            instance.a().t().dot(&instance.y())
        }
    });

    // ‖y‖² sizes the rounding allowance of GAP radii
    let y_norm_sq = if config.squeeze_enabled && config.sphere == SphereKind::Gap {
        counter.add(m);
        instance.y().dot(&instance.y())
    } else {
        0.0
    };

    let mut bound = 0.0;
    if config.solver == SolverKind::Fw {
        counter.add(m + 2);
        bound = instance.y().dot(&instance.y()) / (2.0 * lambda);
        if it.point().w > bound {
            // the objective at a warm point also bounds λ·w*
            counter.add(m + 3);
            bound = it.objective(&sq) / lambda;
        }
    }
    let mut alpha = 1.0;

    let mut trace = SolverTrace::default();
    let mut cert = it.certificate(&sq, &mut counter);
    let mut outer = 0;
    let mut steps = 0;
    let mut set_sizes = Vec::new();
    let over_budget = |c: &OpCounter| config.budget.is_some_and(|b| c.mults() >= b);

    while outer < config.max_outer && cert.gap > config.gap_tol && !over_budget(&counter) {
        if config.squeeze_enabled {
            let (center_corr, radius) = match config.sphere {
                SphereKind::Gap => {
                    counter.add(sq.q() + 3);
                    let scale = gap_scale(y_norm_sq, lambda, it.point().w);
                    (it.correlations().mapv(|c| c * cert.kappa), gap_radius(cert.gap, scale)?)
                }
                SphereKind::St1 => {
                    let aty = aty.as_ref().expect("computed for ST1");
                    let corr: Array1<f64> = sq.comp_index().iter().map(|&j| aty[j]).collect();
                    counter.add(2 * m);
                    let d = &instance.y() - &(it.residual().to_owned() * cert.kappa);
                    (corr, d.dot(&d).sqrt())
                }
            };
            // one radius·‖aᵢ‖ product per tested column
            counter.add(sq.q());
            let found = test_correlations(sq.comp_index(), center_corr.view(), sq.comp_norms(), radius)?;
            if !found.is_empty() {
                let merged = merge_sets(&sets, &found)?;
                let next = SqueezedProblem::new(instance, &merged)?;
                let point = sq.carry_over(it.point(), &next);
                it = Iterate::new(&next, point, &mut counter)?;
                if config.solver == SolverKind::Pg {
                    counter.add(m);
                    alpha = choose_alpha(next.s());
                }
                sets = merged;
                sq = next;
            }
        }

        for _ in 0..config.inner_iters_per_outer {
            match config.solver {
                SolverKind::Fw => {
                    it.fw_step(&sq, bound, &mut counter);
                }
                SolverKind::Pg => {
                    it.pg_step(&sq, alpha, &mut counter);
                }
            }
            steps += 1;
            if config.refresh_every > 0 && steps % config.refresh_every == 0 {
                it.refresh(&sq, &mut counter);
            }
            trace.push(TraceRecord {
                iteration: steps,
                objective: it.objective(&sq),
                gap: None,
                mults: counter.mults(),
                saturated: sets.len(),
            });
            if over_budget(&counter) {
                break;
            }
        }
        cert = it.certificate(&sq, &mut counter);
        if cert.gap <= config.gap_tol && config.refresh_every > 0 {
            // confirm on an exact residual before declaring convergence
            it.refresh(&sq, &mut counter);
            cert = it.certificate(&sq, &mut counter);
        }
        trace.set_last_gap(cert.gap);
        if let Some(last) = trace.records.last_mut() {
            last.mults = counter.mults();
        }
        outer += 1;
        set_sizes.push(sets.len());
    }

    let u = it.dual_point(&cert);
    let x = sq.expand(it.point());
    Ok(RunReport {
        x,
        sets,
        converged: cert.gap <= config.gap_tol,
        trace,
        mults: counter.mults(),
        point: it.point().clone(),
        u,
        gap: cert.gap,
        outer_iterations: outer,
        solver_iterations: steps,
        set_sizes,
    })
}
