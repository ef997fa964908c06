//! Solvers for the squeezed problem and the accelerated proximal-gradient baseline.
//!
//! Both squeezed-problem solvers work on an [`Iterate`], which carries the
//! residual `r = y − A_{∁I}x̄ − s·w` and the correlations `A_{∁I}ᵀr`, `sᵀr`
//! alongside the primal point. The correlations serve three purposes at once:
//! the gradient of the next step, the dual-scaling certificate and the
//! squeezing test of the GAP sphere, so they are computed and charged once.

mod fitra;
mod frank_wolfe;
mod projected_gradient;
mod projection;

use ndarray::{Array1, Array2, ArrayView1};

use crate::metrics::OpCounter;
use crate::problem::{DualPoint, PrimalPoint, ProblemInstance, SaturationSets};
use crate::squeeze::SqueezedProblem;
use crate::{Error, Result};

pub use fitra::{
    fitra_baseline, fitra_solve, l1_ball_projection, l1_ball_projection_counted, power_iteration, prox_linf, prox_linf_counted,
    FitraConfig, FitraReport,
};
pub use frank_wolfe::{frank_wolfe_step, FwConfig};
pub use projected_gradient::{projected_gradient_step, PgConfig};
pub use projection::{project_feasible, project_feasible_counted, Projection};

/// Number of solver steps between residual refreshes in long runs.
pub const DEFAULT_REFRESH_EVERY: usize = 1000;

/// One per-iteration record of a solver run.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    /// Dual gap, when it was evaluated at this iteration.
    pub gap: Option<f64>,
    /// Cumulative multiplications after the iteration.
    pub mults: u64,
    /// Number of squeezed indices `|I|` during the iteration.
    pub saturated: usize,
}

/// Records kept by a default trace before thinning starts.
pub const DEFAULT_TRACE_CAPACITY: usize = 4096;

/// Per-iteration history with bounded memory.
///
/// Once more than `capacity` records are held, every other one is dropped and
/// the stride doubles, so a long run keeps records at iterations that are
/// multiples of the stride, plus always the most recent record.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SolverTrace {
    pub records: Vec<TraceRecord>,
    #[serde(skip)]
    stride: usize,
    #[serde(skip)]
    capacity: usize,
}

impl Default for SolverTrace {
    fn default() -> Self {
        Self::with_capacity(DEFAULT_TRACE_CAPACITY)
    }
}

impl SolverTrace {
    pub fn with_capacity(capacity: usize) -> Self {
        Self { records: Vec::new(), stride: 1, capacity: capacity.max(2) }
    }

    /// Current spacing, in iterations, of the retained records.
    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn push(&mut self, record: TraceRecord) {
        debug_assert!(self.records.last().is_none_or(|r| r.mults <= record.mults));
        if self.records.last().is_some_and(|r| r.iteration % self.stride != 0) {
            self.records.pop();
        }
        self.records.push(record);
        if self.records.len() > self.capacity {
            self.stride *= 2;
            let stride = self.stride;
            let last = self.records.len() - 1;
            let mut k = 0;
            self.records.retain(|r| {
                let keep = r.iteration % stride == 0 || k == last;
                k += 1;
                keep
            });
        }
    }

    pub fn set_last_gap(&mut self, gap: f64) {
        if let Some(last) = self.records.last_mut() {
            last.gap = Some(gap);
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Dual point obtained by dual scaling of the residual, `u = κ·r`, together
/// with the duality gap of the pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub kappa: f64,
    pub gap: f64,
}

/// A primal point of a squeezed problem with its cached residual and correlations.
#[derive(Debug, Clone)]
pub struct Iterate {
    pub(crate) point: PrimalPoint,
    pub(crate) residual: Array1<f64>,
    pub(crate) corr: Array1<f64>,
    pub(crate) s_corr: f64,
    /// Scratch space of lengths `q` and `m` reused by solver steps.
    pub(crate) scratch_q: Array1<f64>,
    pub(crate) scratch_m: Array1<f64>,
}

impl Iterate {
    pub fn new(sq: &SqueezedProblem, point: PrimalPoint, counter: &mut OpCounter) -> Result<Self> {
        if point.xbar.len() != sq.q() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} free coefficients, squeezed problem has {}",
                point.xbar.len(),
                sq.q()
            )));
        }
        let mut it = Self {
            point,
            residual: Array1::zeros(sq.m()),
            corr: Array1::zeros(sq.q()),
            s_corr: 0.0,
            scratch_q: Array1::zeros(sq.q()),
            scratch_m: Array1::zeros(sq.m()),
        };
        it.refresh(sq, counter);
        Ok(it)
    }

    /// Recomputes the residual and correlations from the primal point.
    pub fn refresh(&mut self, sq: &SqueezedProblem, counter: &mut OpCounter) {
        let mut r = sq.y().to_owned();
        if self.point.xbar.iter().any(|&v| v != 0.0) {
            r -= &counted_gemv(sq.a_comp(), &self.point.xbar, counter);
        }
        if !sq.s_is_zero() && self.point.w != 0.0 {
            counter.add(sq.m());
            r.scaled_add(-self.point.w, &sq.s());
        }
        self.residual = r;
        self.update_correlations(sq, counter);
    }

    pub(crate) fn update_correlations(&mut self, sq: &SqueezedProblem, counter: &mut OpCounter) {
        counter.add_matvec(sq.m(), sq.q());
        gemv_t_into(sq.a_comp(), &self.residual, &mut self.corr);
        self.s_corr = if sq.s_is_zero() {
            0.0
        } else {
            counter.add(sq.m());
            sq.s().dot(&self.residual)
        };
    }

    pub fn point(&self) -> &PrimalPoint {
        &self.point
    }

    pub fn residual(&self) -> ArrayView1<'_, f64> {
        self.residual.view()
    }

    /// `A_{∁I}ᵀr` at the current point.
    pub fn correlations(&self) -> ArrayView1<'_, f64> {
        self.corr.view()
    }

    pub fn s_correlation(&self) -> f64 {
        self.s_corr
    }

    /// `½‖r‖² + λw`, not charged (bookkeeping only).
    pub fn objective(&self, sq: &SqueezedProblem) -> f64 {
        0.5 * self.residual.dot(&self.residual) + sq.lambda() * self.point.w
    }

    /// Dual scaling of the residual and the resulting duality gap.
    ///
    /// With `L = ‖A_{∁I}ᵀr‖₁ + sᵀr` and `κ = λ/L` (or `1` when `L ≤ 0`), the gap is
    /// `½(1−κ)²‖r‖² + κ·Σᵢ(|cᵢ|w − cᵢx̄ᵢ) + (λ − κL)·w`, a sum of nonnegative terms
    /// for feasible points.
    pub fn certificate(&self, sq: &SqueezedProblem, counter: &mut OpCounter) -> Certificate {
        let w = self.point.w;
        let l1: f64 = self.corr.iter().map(|c| c.abs()).sum();
        let l = l1 + self.s_corr;
        let kappa = if l <= 0.0 { 1.0 } else { sq.lambda() / l };
        counter.add(sq.m() + 2 * sq.q() + 5 + usize::from(l <= 0.0));
        let rr = self.residual.dot(&self.residual);
        let slack: f64 = self
            .corr
            .iter()
            .zip(self.point.xbar.iter())
            .map(|(&c, &x)| c.abs() * w - c * x)
            .sum();
        let tail = if l <= 0.0 { (sq.lambda() - l) * w } else { 0.0 };
        let gap = 0.5 * (1.0 - kappa).powi(2) * rr + kappa * slack + tail;
        Certificate { kappa, gap }
    }

    pub fn dual_point(&self, cert: &Certificate) -> DualPoint {
        DualPoint::new(self.residual.mapv(|v| v * cert.kappa))
    }

    pub fn into_point(self) -> PrimalPoint {
        self.point
    }
}

/// `out = A·v` for a column-major `A`, accumulated column by column.
pub(crate) fn gemv_into(a: &Array2<f64>, v: &Array1<f64>, out: &mut Array1<f64>) {
    let m = a.nrows();
    let out = out.as_slice_mut().expect("contiguous");
    out.fill(0.0);
    match a.as_slice_memory_order().filter(|_| a.t().is_standard_layout()) {
        Some(data) if m > 0 => {
            for (col, &vj) in data.chunks_exact(m).zip(v.iter()) {
                for (o, &aij) in out.iter_mut().zip(col) {
                    *o += aij * vj;
                }
            }
        }
        _ => {
            for (col, &vj) in a.columns().into_iter().zip(v.iter()) {
                for (o, &aij) in out.iter_mut().zip(col.iter()) {
                    *o += aij * vj;
                }
            }
        }
    }
}

/// `A·v`, charged `m·q`.
pub(crate) fn counted_gemv(a: &Array2<f64>, v: &Array1<f64>, counter: &mut OpCounter) -> Array1<f64> {
    counter.add_matvec(a.nrows(), a.ncols());
    let mut out = Array1::zeros(a.nrows());
    gemv_into(a, v, &mut out);
    out
}

/// `out = Aᵀ·v` for a column-major `A`.
pub(crate) fn gemv_t_into(a: &Array2<f64>, v: &Array1<f64>, out: &mut Array1<f64>) {
    let m = a.nrows();
    let v = v.as_slice().expect("contiguous");
    match a.as_slice_memory_order().filter(|_| a.t().is_standard_layout()) {
        Some(data) if m > 0 => {
            for (o, col) in out.iter_mut().zip(data.chunks_exact(m)) {
                *o = col.iter().zip(v).map(|(x, y)| x * y).sum();
            }
        }
        _ => {
            for (o, col) in out.iter_mut().zip(a.columns()) {
                *o = col.iter().zip(v).map(|(x, y)| x * y).sum();
            }
        }
    }
}

/// `(1/2λ)‖y − A_{∁I}x̄ − s·w‖² + w`, an upper bound on the optimal `w*`.
pub fn bound_m(instance: &ProblemInstance, sq: &SqueezedProblem, point: &PrimalPoint) -> Result<f64> {
    if point.xbar.len() != sq.q() {
        return Err(Error::DimensionMismatch("point does not match the squeezed problem".into()));
    }
    if !point.is_feasible(1e-12) {
        return Err(Error::Infeasible("bound_m needs a feasible point".into()));
    }
    let r = sq.residual(point);
    Ok(r.dot(&r) / (2.0 * instance.lambda()) + point.w)
}

/// `‖s‖₂` when `s ≠ 0`, else `1`.
pub fn choose_alpha(s: ArrayView1<'_, f64>) -> f64 {
    let norm = s.dot(&s).sqrt();
    if norm > 0.0 {
        norm
    } else {
        1.0
    }
}

/// Solver options shared by the experiment layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Frank-Wolfe on the bounded squeezed problem.
    Fw,
    /// Rescaled projected gradient.
    Pg,
}

/// Projected-gradient reference solve of the unsqueezed problem.
///
/// Returns the full solution, the dual point obtained by dual scaling of its
/// residual and the final gap. Used to produce high-accuracy references.
pub fn reference_solve(instance: &ProblemInstance, gap_tol: f64, max_iters: usize) -> Result<ReferenceSolution> {
    let sets = SaturationSets::empty();
    let sq = SqueezedProblem::new(instance, &sets)?;
    let mut counter = OpCounter::new();
    if instance.has_zero_solution() {
        return Ok(ReferenceSolution {
            x: Array1::zeros(instance.n()),
            u: DualPoint::new(instance.y().to_owned()),
            gap: 0.0,
            converged: true,
            iterations: 0,
        });
    }
    let mut it = Iterate::new(&sq, PrimalPoint::zero(sq.q()), &mut counter)?;
    let alpha = choose_alpha(sq.s());
    let mut cert = it.certificate(&sq, &mut counter);
    let mut iterations = 0;
    while cert.gap > gap_tol && iterations < max_iters {
        it.pg_step(&sq, alpha, &mut counter);
        iterations += 1;
        if iterations % DEFAULT_REFRESH_EVERY == 0 {
            it.refresh(&sq, &mut counter);
        }
        cert = it.certificate(&sq, &mut counter);
        if cert.gap <= gap_tol {
            it.refresh(&sq, &mut counter);
            cert = it.certificate(&sq, &mut counter);
        }
    }
    let u = it.dual_point(&cert);
    Ok(ReferenceSolution {
        x: sq.expand(it.point()),
        u,
        gap: cert.gap,
        converged: cert.gap <= gap_tol,
        iterations,
    })
}

#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub x: Array1<f64>,
    pub u: DualPoint,
    pub gap: f64,
    pub converged: bool,
    pub iterations: usize,
}

impl ReferenceSolution {
    pub fn linf(&self) -> f64 {
        self.x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// Entries with `|x[i]| ≥ ‖x‖∞ − margin`, split by sign.
    pub fn saturated(&self, margin: f64) -> SaturationSets {
        saturated_sets(self.x.view(), margin)
    }
}

/// Entries of `x` within `margin` of `‖x‖∞`, split by sign. Empty for `x = 0`.
pub fn saturated_sets(x: ArrayView1<'_, f64>, margin: f64) -> SaturationSets {
    let linf = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if linf == 0.0 {
        return SaturationSets::empty();
    }
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (i, &v) in x.iter().enumerate() {
        if v.abs() >= linf - margin {
            if v > 0.0 {
                plus.push(i);
            } else {
                minus.push(i);
            }
        }
    }
    SaturationSets::new(plus, minus).expect("disjoint by construction")
}
