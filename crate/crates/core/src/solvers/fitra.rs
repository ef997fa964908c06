//! Accelerated proximal-gradient baseline on the unsqueezed problem.
//!
//! Step `1/L` with `L` an inflated power-iteration estimate of `σmax(AᵀA)`,
//! Nesterov momentum, and the prox of `t·λ‖·‖∞` computed by Moreau
//! decomposition from a sort-based projection onto the ℓ1 ball.

use ndarray::{Array1, ArrayView1, ArrayView2};

use super::{SolverTrace, TraceRecord};
use crate::metrics::{counted_matvec, counted_matvec_t, counted_norm_sq, OpCounter};
use crate::problem::ProblemInstance;
use crate::Result;

const POWER_MAX_ITERS: usize = 100;
const POWER_REL_TOL: f64 = 1e-10;
const LIPSCHITZ_INFLATION: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitraConfig {
    pub max_iters: usize,
    pub gap_tol: f64,
    /// Iterations between duality-gap evaluations.
    pub gap_every: usize,
    /// Stop once this many multiplications have been spent.
    pub budget: Option<u64>,
}

impl Default for FitraConfig {
    fn default() -> Self {
        Self { max_iters: 100_000, gap_tol: 1e-7, gap_every: 10, budget: None }
    }
}

#[derive(Debug, Clone)]
pub struct FitraReport {
    /// Iterate with the smallest evaluated gap.
    pub x: Array1<f64>,
    pub gap: f64,
    pub converged: bool,
    pub iterations: usize,
    pub mults: u64,
    pub lipschitz: f64,
    pub trace: SolverTrace,
}

/// Euclidean projection of `z` onto `{‖x‖₁ ≤ radius}`.
pub fn l1_ball_projection(z: ArrayView1<'_, f64>, radius: f64) -> Array1<f64> {
    l1_ball_projection_counted(z, radius, &mut OpCounter::new())
}

/// [`l1_ball_projection`], charging one division per threshold candidate.
pub fn l1_ball_projection_counted(z: ArrayView1<'_, f64>, radius: f64, counter: &mut OpCounter) -> Array1<f64> {
    let l1: f64 = z.iter().map(|v| v.abs()).sum();
    if l1 <= radius {
        return z.to_owned();
    }
    if radius <= 0.0 {
        return Array1::zeros(z.len());
    }
    let mut mags: Vec<f64> = z.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &v) in mags.iter().enumerate() {
        cumsum += v;
        counter.add(1);
        let candidate = (cumsum - radius) / (k + 1) as f64;
        if v > candidate {
            theta = candidate;
        } else {
            break;
        }
    }
    z.mapv(|v| (v.abs() - theta).max(0.0).copysign(v))
}

/// `argmin_x ½‖x − z‖² + weight·‖x‖∞ = z − Proj_{weight·B₁}(z)`.
pub fn prox_linf(z: ArrayView1<'_, f64>, weight: f64) -> Array1<f64> {
    prox_linf_counted(z, weight, &mut OpCounter::new())
}

pub fn prox_linf_counted(z: ArrayView1<'_, f64>, weight: f64, counter: &mut OpCounter) -> Array1<f64> {
    &z - &l1_ball_projection_counted(z, weight, counter)
}

/// Power-iteration estimate of `σmax(AᵀA)`, charged to `counter`.
pub fn power_iteration(a: ArrayView2<'_, f64>, counter: &mut OpCounter) -> f64 {
    let n = a.ncols();
    let mut v = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let av = counted_matvec(a, v.view(), counter).expect("sizes agree");
        let atav = counted_matvec_t(a, av.view(), counter).expect("sizes agree");
        let norm = counted_norm_sq(atav.view(), counter).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        counter.add(n + 1);
        v = atav / norm;
        let converged = (norm - estimate).abs() <= POWER_REL_TOL * norm;
        estimate = norm;
        if converged {
            break;
        }
    }
    estimate
}

/// Solves the full problem from zero; returns the best iterate and its trace.
pub fn fitra_baseline(instance: &ProblemInstance, max_iters: usize, gap_tol: f64) -> Result<(Array1<f64>, SolverTrace)> {
    let cfg = FitraConfig { max_iters, gap_tol, ..FitraConfig::default() };
    let report = fitra_solve(instance, &cfg, None)?;
    Ok((report.x, report.trace))
}

/// Full-featured baseline run with an optional warm start.
pub fn fitra_solve(instance: &ProblemInstance, cfg: &FitraConfig, warm: Option<ArrayView1<'_, f64>>) -> Result<FitraReport> {
    let a = instance.a();
    let y = instance.y();
    let (m, n) = a.dim();
    let lambda = instance.lambda();
    let mut counter = OpCounter::new();
    let mut trace = SolverTrace::default();

    if instance.has_zero_solution() {
        return Ok(FitraReport {
            x: Array1::zeros(n),
            gap: 0.0,
            converged: true,
            iterations: 0,
            mults: 0,
            lipschitz: 0.0,
            trace,
        });
    }

    counter.add(2);
    let lipschitz = LIPSCHITZ_INFLATION * power_iteration(a, &mut counter);
    let step = 1.0 / lipschitz;

    let mut x = match warm {
        Some(w) => {
            if w.len() != n {
                return Err(crate::Error::DimensionMismatch(format!(
                    "warm start has length {}, expected {n}",
                    w.len()
                )));
            }
            w.to_owned()
        }
        None => Array1::zeros(n),
    };
    let mut ax = if x.iter().any(|&v| v != 0.0) {
        counted_matvec(a, x.view(), &mut counter)?
    } else {
        Array1::zeros(m)
    };
    let mut x_prev = x.clone();
    let mut ax_prev = ax.clone();
    let mut t = 1.0f64;

    let gap_at = |x: &Array1<f64>, ax: &Array1<f64>, counter: &mut OpCounter| -> f64 {
        let r = &y - ax;
        let corr = counted_matvec_t(a, r.view(), counter).expect("sizes agree");
        full_gap(lambda, x, &r, &corr, counter)
    };

    let mut best_gap = gap_at(&x, &ax, &mut counter);
    let mut best_x = x.clone();
    let mut iterations = 0;
    let gap_every = cfg.gap_every.max(1);

    while best_gap > cfg.gap_tol && iterations < cfg.max_iters {
        if cfg.budget.is_some_and(|b| counter.mults() >= b) {
            break;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / t_next;
        counter.add(n + m + 4);
        let v = &x + &((&x - &x_prev) * beta);
        let av = &ax + &((&ax - &ax_prev) * beta);
        let grad = counted_matvec_t(a, (&av - &y).view(), &mut counter)?;
        counter.add(n + 1);
        let z = &v - &(grad * step);
        let x_next = prox_linf_counted(z.view(), lambda * step, &mut counter);
        let ax_next = counted_matvec(a, x_next.view(), &mut counter)?;

        x_prev = std::mem::replace(&mut x, x_next);
        ax_prev = std::mem::replace(&mut ax, ax_next);
        t = t_next;
        iterations += 1;

        let r = &y - &ax;
        let linf = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let mut record = TraceRecord {
            iteration: iterations,
            objective: 0.5 * r.dot(&r) + lambda * linf,
            gap: None,
            mults: counter.mults(),
            saturated: 0,
        };
        if iterations % gap_every == 0 {
            let gap = gap_at(&x, &ax, &mut counter);
            record.gap = Some(gap);
            record.mults = counter.mults();
            if gap < best_gap {
                best_gap = gap;
                best_x.assign(&x);
            }
        }
        trace.push(record);
    }

    Ok(FitraReport {
        x: best_x,
        gap: best_gap,
        converged: best_gap <= cfg.gap_tol,
        iterations,
        mults: counter.mults(),
        lipschitz,
        trace,
    })
}

/// Gap of the unsqueezed problem at `x` with `u` the dual scaling of `r = y − Ax`.
fn full_gap(lambda: f64, x: &Array1<f64>, r: &Array1<f64>, corr: &Array1<f64>, counter: &mut OpCounter) -> f64 {
    let w = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let l: f64 = corr.iter().map(|c| c.abs()).sum();
    let kappa = if l <= 0.0 { 1.0 } else { lambda / l };
    counter.add(r.len() + 2 * x.len() + 5 + usize::from(l <= 0.0));
    let rr = r.dot(r);
    let slack: f64 = corr.iter().zip(x.iter()).map(|(&c, &xi)| c.abs() * w - c * xi).sum();
    let tail = if l <= 0.0 { (lambda - l) * w } else { 0.0 };
    0.5 * (1.0 - kappa).powi(2) * rr + kappa * slack + tail
}
