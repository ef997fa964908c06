use ndarray::Zip;

use super::{gemv_into, Iterate};
use crate::metrics::OpCounter;
use crate::problem::PrimalPoint;
use crate::squeeze::SqueezedProblem;
use crate::Result;

/// Below this squared norm of `B·(v − p)` the segment search does not move.
const SEGMENT_EPS: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwConfig {
    /// Upper bound `M ≥ w*` making the feasible set compact.
    pub bound: f64,
    pub max_iters: usize,
    pub gap_tol: f64,
}

/// Outcome of one Frank-Wolfe step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwStep {
    /// Weight `1 − γ` put on the vertex.
    pub step: f64,
    pub vertex_w: f64,
}

impl Iterate {
    /// One Frank-Wolfe step on `{|x̄| ≤ w ≤ M}` with exact segment search.
    ///
    /// The linear minimization oracle picks `(M, M·sign(A_{∁I}ᵀr))` when the
    /// linear coefficient of `w`, `λ − sᵀr − ‖A_{∁I}ᵀr‖₁`, is negative and the
    /// origin otherwise.
    pub fn fw_step(&mut self, sq: &SqueezedProblem, bound: f64, counter: &mut OpCounter) -> FwStep {
        let q = sq.q();
        let m = sq.m();
        let l1: f64 = self.corr.iter().map(|c| c.abs()).sum();
        let grad_w = sq.lambda() - self.s_corr;
        let vertex_w = if grad_w - l1 < 0.0 { bound } else { 0.0 };

        // direction towards the vertex (vertex_w·sign(c), vertex_w)
        Zip::from(&mut self.scratch_q).and(&self.corr).and(&self.point.xbar).for_each(|d, &c, &x| {
            let v = if c > 0.0 {
                vertex_w
            } else if c < 0.0 {
                -vertex_w
            } else {
                0.0
            };
            *d = v - x;
        });
        let dir_w = vertex_w - self.point.w;

        counter.add_matvec(m, q);
        gemv_into(sq.a_comp(), &self.scratch_q, &mut self.scratch_m);
        if !sq.s_is_zero() {
            counter.add(m);
            self.scratch_m.scaled_add(dir_w, &sq.s());
        }
        counter.add(m + q + 1);
        let curvature = self.scratch_m.dot(&self.scratch_m);
        let slope = grad_w * dir_w - self.corr.dot(&self.scratch_q);

        let step = if curvature < SEGMENT_EPS {
            0.0
        } else {
            counter.add(1);
            (-slope / curvature).clamp(0.0, 1.0)
        };
        if step == 0.0 {
            return FwStep { step, vertex_w };
        }
        counter.add(q + 1 + m);
        self.point.xbar.scaled_add(step, &self.scratch_q);
        self.point.w += step * dir_w;
        self.residual.scaled_add(-step, &self.scratch_m);
        self.update_correlations(sq, counter);
        FwStep { step, vertex_w }
    }
}

/// One Frank-Wolfe step from `state` with bound `m_bound`.
pub fn frank_wolfe_step(sq: &SqueezedProblem, state: &PrimalPoint, m_bound: f64) -> Result<PrimalPoint> {
    let mut counter = OpCounter::new();
    let mut it = Iterate::new(sq, state.clone(), &mut counter)?;
    it.fw_step(sq, m_bound, &mut counter);
    Ok(it.into_point())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ProblemInstance, SaturationSets};
    use crate::squeeze::build_squeezed;
    use ndarray::array;

    #[test]
    fn vertex_follows_correlation_signs() {
        // A = I₂, y chosen so that Aᵀy = (0.3, -0.7); λ small so the w-coefficient is negative
        let p = ProblemInstance::new(ndarray::Array2::eye(2), array![0.3, -0.7], 0.1).unwrap();
        let sq = build_squeezed(&p, &SaturationSets::empty()).unwrap();
        let mut c = OpCounter::new();
        let mut it = Iterate::new(&sq, PrimalPoint::zero(2), &mut c).unwrap();
        let before = it.objective(&sq);
        let step = it.fw_step(&sq, 2.0, &mut c);
        assert_eq!(step.vertex_w, 2.0);
        // moved towards (2, 2, -2)
        let pt = it.point();
        assert!((pt.xbar[0] / pt.w - 1.0).abs() < 1e-12);
        assert!((pt.xbar[1] / pt.w + 1.0).abs() < 1e-12);
        assert!(it.objective(&sq) < before);
    }

    #[test]
    fn origin_vertex_when_w_coefficient_nonnegative() {
        let p = ProblemInstance::new(ndarray::Array2::eye(2), array![0.3, -0.7], 5.0).unwrap();
        let sq = build_squeezed(&p, &SaturationSets::empty()).unwrap();
        let start = PrimalPoint { w: 0.5, xbar: array![0.5, -0.5] };
        let next = frank_wolfe_step(&sq, &start, 2.0).unwrap();
        assert!(next.w < 0.5);
        assert!(sq.primal_objective(&next) < sq.primal_objective(&start));
    }

    #[test]
    fn state_at_vertex_does_not_move() {
        // optimum of the bounded problem sits at the vertex itself
        let p = ProblemInstance::new(ndarray::Array2::eye(2), array![10.0, -10.0], 0.1).unwrap();
        let sq = build_squeezed(&p, &SaturationSets::empty()).unwrap();
        let vertex = PrimalPoint { w: 2.0, xbar: array![2.0, -2.0] };
        let next = frank_wolfe_step(&sq, &vertex, 2.0).unwrap();
        assert_eq!(next, vertex);
    }
}
