use ndarray::Array1;

use super::projection::project_feasible_counted;
use super::{counted_gemv, Iterate};
use crate::metrics::OpCounter;
use crate::problem::PrimalPoint;
use crate::squeeze::SqueezedProblem;
use crate::Result;

const CURVATURE_EPS: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgConfig {
    /// Rescaling `α > 0` of the saturation variable, `w̃ = α·w`.
    pub alpha: f64,
    pub max_iters: usize,
    pub gap_tol: f64,
}

/// Outcome of one projected-gradient step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgStep {
    /// Exact gradient step length `η`.
    pub eta: f64,
    /// Weight `1 − γ` put on the projected point.
    pub step: f64,
    pub projection_iterations: usize,
}

impl Iterate {
    /// One step of the rescaled projected gradient method.
    ///
    /// Works in the variables `(w̃, x̄)` with `w̃ = α·w`, where the cost reads
    /// `½‖y − A_{∁I}x̄ − (s/α)w̃‖² + (λ/α)w̃`: exact line search along the negative
    /// gradient, projection onto `{α|x̄| ≤ w̃}`, then exact search on the segment
    /// between the current and projected points.
    pub fn pg_step(&mut self, sq: &SqueezedProblem, alpha: f64, counter: &mut OpCounter) -> PgStep {
        let q = sq.q();
        let m = sq.m();
        let with_s = !sq.s_is_zero();
        counter.add(2);
        let wt = alpha * self.point.w;

        // descent direction d = −∇f
        let dir_w = (self.s_corr - sq.lambda()) / alpha;
        counter.add(q + 1);
        let dir_norm2 = self.corr.dot(&self.corr) + dir_w * dir_w;
        if dir_norm2 == 0.0 {
            return PgStep { eta: 0.0, step: 0.0, projection_iterations: 0 };
        }
        let mut bd = counted_gemv(sq.a_comp(), &self.corr, counter);
        if with_s {
            counter.add(m + 1);
            bd.scaled_add(dir_w / alpha, &sq.s());
        }
        counter.add(m);
        let curvature = bd.dot(&bd);
        let eta = if curvature > CURVATURE_EPS {
            counter.add(1);
            dir_norm2 / curvature
        } else {
            1.0
        };

        counter.add(q + 1);
        let mut half_x = self.point.xbar.clone();
        half_x.scaled_add(eta, &self.corr);
        let half_w = wt + eta * dir_w;
        let proj = project_feasible_counted(half_x.view(), half_w, alpha, counter);

        // segment search between the current point and its projected gradient step
        let seg_x: Array1<f64> = &proj.xbar - &self.point.xbar;
        let seg_w = proj.wtilde - wt;
        let mut be = counted_gemv(sq.a_comp(), &seg_x, counter);
        if with_s {
            counter.add(m + 1);
            be.scaled_add(seg_w / alpha, &sq.s());
        }
        counter.add(m + q + 1);
        let seg_curv = be.dot(&be);
        let slope = -(self.corr.dot(&seg_x) + dir_w * seg_w);
        let step = if seg_curv > CURVATURE_EPS {
            counter.add(1);
            (-slope / seg_curv).clamp(0.0, 1.0)
        } else if slope < 0.0 {
            1.0
        } else {
            0.0
        };
        if step == 0.0 {
            return PgStep { eta, step, projection_iterations: proj.iterations };
        }
        counter.add(m + 1);
        // a full step lands exactly on the projected point
        if step == 1.0 {
            self.point.w = proj.wtilde / alpha;
            self.point.xbar = proj.xbar;
        } else {
            counter.add(q + 1);
            self.point.xbar.scaled_add(step, &seg_x);
            self.point.w = (wt + step * seg_w) / alpha;
        }
        self.residual.scaled_add(-step, &be);
        self.update_correlations(sq, counter);
        PgStep { eta, step, projection_iterations: proj.iterations }
    }
}

/// One rescaled projected-gradient step from `state`.
pub fn projected_gradient_step(sq: &SqueezedProblem, state: &PrimalPoint, alpha: f64) -> Result<PrimalPoint> {
    let mut counter = OpCounter::new();
    let mut it = Iterate::new(sq, state.clone(), &mut counter)?;
    it.pg_step(sq, alpha, &mut counter);
    Ok(it.into_point())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ProblemInstance, SaturationSets};
    use crate::squeeze::build_squeezed;
    use ndarray::array;

    #[test]
    fn stationary_point_is_kept() {
        // y = 0 and λ > 0: the origin is optimal but the gradient in w̃ is λ/α ≠ 0,
        // so check an iterate whose projected step returns to itself instead.
        let p = ProblemInstance::new(ndarray::Array2::eye(2), array![0.0, 0.0], 1.0).unwrap();
        let sq = build_squeezed(&p, &SaturationSets::empty()).unwrap();
        let next = projected_gradient_step(&sq, &PrimalPoint::zero(2), 1.0).unwrap();
        assert_eq!(next, PrimalPoint::zero(2));
    }

    #[test]
    fn step_decreases_objective_and_stays_feasible() {
        let a = array![[1.0, 0.2, -0.4], [0.3, 1.0, 0.5]];
        let p = ProblemInstance::new(a, array![1.0, -2.0], 0.3).unwrap();
        let sets = SaturationSets::new(vec![], vec![1]).unwrap();
        let sq = build_squeezed(&p, &sets).unwrap();
        let alpha = super::super::choose_alpha(sq.s());
        let mut pt = PrimalPoint::zero(2);
        let mut prev = sq.primal_objective(&pt);
        for _ in 0..20 {
            pt = projected_gradient_step(&sq, &pt, alpha).unwrap();
            let f = sq.primal_objective(&pt);
            assert!(f <= prev + 1e-12);
            assert!(pt.is_feasible(1e-12));
            prev = f;
        }
    }
}
