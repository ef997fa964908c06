//! Safe spheres, the sphere squeezing test and the squeezed problem.
//!
//! Given a sphere `B(c, r)` known to contain the dual optimum `u*`, any column
//! with `|aᵢᵀc| > r‖aᵢ‖` is saturated in the primal minimizer, with the sign of
//! `aᵢᵀc`. Saturated columns are folded into `s = Σ_{I⁺} aᵢ − Σ_{I⁻} aᵢ`.

use ndarray::{Array1, Array2, ArrayView1, ShapeBuilder};

use crate::problem::{dual_value, DualPoint, PrimalPoint, ProblemInstance, SaturationSets};
use crate::{Error, Result};

/// Rounding allowance for a computed gap, relative to the size of the terms
/// that cancel in it. Without it a converged gap rounds to zero and the test
/// flags free entries whose correlation is pure rounding noise.
const GAP_ROUNDING: f64 = 1e-13;
/// Gaps below this indicate an infeasible primal-dual pair.
const GAP_ERROR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SafeSphere {
    center: Array1<f64>,
    radius: f64,
}

impl SafeSphere {
    pub fn new(center: Array1<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) {
            return Err(Error::InvalidArgument(format!("sphere radius must be nonnegative, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> ArrayView1<'_, f64> {
        self.center.view()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Same center, radius increased by `r0 ≥ 0`.
    pub fn inflated(&self, r0: f64) -> Result<Self> {
        Self::new(self.center.clone(), self.radius + r0)
    }

    pub fn contains(&self, u: ArrayView1<'_, f64>) -> bool {
        let d = &u - &self.center;
        d.dot(&d).sqrt() <= self.radius
    }
}

/// Which safe sphere to build from a primal-dual pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SphereKind {
    /// Center `y`, radius `‖y − u‖`.
    St1,
    /// Center `u`, radius `sqrt(2·gap)`.
    Gap,
}

impl SphereKind {
    pub fn name(self) -> &'static str {
        match self {
            SphereKind::St1 => "st1",
            SphereKind::Gap => "gap",
        }
    }
}

/// The problem restricted to the columns outside `I⁺ ∪ I⁻`, with the saturated
/// columns folded into the signed-sum vector `s`.
#[derive(Debug, Clone)]
pub struct SqueezedProblem {
    a_comp: Array2<f64>,
    s: Array1<f64>,
    sets: SaturationSets,
    comp_index: Vec<usize>,
    comp_norms: Vec<f64>,
    y: Array1<f64>,
    lambda: f64,
    n: usize,
}

impl SqueezedProblem {
    pub fn new(instance: &ProblemInstance, sets: &SaturationSets) -> Result<Self> {
        let n = instance.n();
        let m = instance.m();
        if let Some(i) = sets.max_index().filter(|&i| i >= n) {
            return Err(Error::InvalidArgument(format!("saturated index {i} out of range for n = {n}")));
        }
        // re-validate disjointness for sets built by hand through serde
        let sets = SaturationSets::new(sets.plus().to_vec(), sets.minus().to_vec())?;
        let a = instance.a();
        let comp_index: Vec<usize> = (0..n).filter(|&i| !sets.contains(i)).collect();
        let mut a_comp = Array2::<f64>::zeros((m, comp_index.len()).f());
        for (k, &j) in comp_index.iter().enumerate() {
            a_comp.column_mut(k).assign(&a.column(j));
        }
        let mut s = Array1::<f64>::zeros(m);
        for &i in sets.plus() {
            s += &a.column(i);
        }
        for &i in sets.minus() {
            s -= &a.column(i);
        }
        let comp_norms = comp_index.iter().map(|&j| instance.column_norms()[j]).collect();
        Ok(Self {
            a_comp,
            s,
            sets,
            comp_index,
            comp_norms,
            y: instance.y().to_owned(),
            lambda: instance.lambda(),
            n,
        })
    }

    pub fn a_comp(&self) -> &Array2<f64> {
        &self.a_comp
    }

    pub fn s(&self) -> ArrayView1<'_, f64> {
        self.s.view()
    }

    /// `true` when no index is squeezed, so `s` is identically zero.
    pub fn s_is_zero(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &SaturationSets {
        &self.sets
    }

    pub fn comp_index(&self) -> &[usize] {
        &self.comp_index
    }

    pub fn comp_norms(&self) -> &[f64] {
        &self.comp_norms
    }

    pub fn y(&self) -> ArrayView1<'_, f64> {
        self.y.view()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m(&self) -> usize {
        self.y.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of free coefficients `n − |I|`.
    pub fn q(&self) -> usize {
        self.comp_index.len()
    }

    /// `y − A_{∁I}x̄ − s·w`.
    pub fn residual(&self, point: &PrimalPoint) -> Array1<f64> {
        let mut r = self.y.clone();
        if self.q() > 0 {
            r -= &self.a_comp.dot(&point.xbar);
        }
        r.scaled_add(-point.w, &self.s);
        r
    }

    pub fn primal_objective(&self, point: &PrimalPoint) -> f64 {
        let r = self.residual(point);
        0.5 * r.dot(&r) + self.lambda * point.w
    }

    pub fn dual_objective(&self, u: ArrayView1<'_, f64>) -> f64 {
        dual_value(self.y.view(), u)
    }

    /// `‖A_{∁I}ᵀu‖₁ + sᵀu`; the dual feasible set is where this is `≤ λ`.
    pub fn dual_constraint(&self, u: ArrayView1<'_, f64>) -> f64 {
        let l1: f64 = self.a_comp.t().dot(&u).iter().map(|v| v.abs()).sum();
        l1 + self.s.dot(&u)
    }

    pub fn dual_scaling(&self, z: ArrayView1<'_, f64>) -> DualPoint {
        let l = self.dual_constraint(z);
        if l <= 0.0 {
            DualPoint::new(z.to_owned())
        } else {
            DualPoint::new(z.mapv(|v| v * (self.lambda / l)))
        }
    }

    /// Duality gap without feasibility checks.
    pub fn duality_gap(&self, point: &PrimalPoint, u: ArrayView1<'_, f64>) -> f64 {
        let r = self.residual(point);
        let d = &r - &u;
        let atu = self.a_comp.t().dot(&u);
        0.5 * d.dot(&d) + self.lambda * point.w - atu.dot(&point.xbar) - self.s.dot(&u) * point.w
    }

    /// Full coefficient vector: `±w` on `I±`, `x̄` on the complement.
    pub fn expand(&self, point: &PrimalPoint) -> Array1<f64> {
        let mut x = Array1::<f64>::zeros(self.n);
        for &i in self.sets.plus() {
            x[i] = point.w;
        }
        for &i in self.sets.minus() {
            x[i] = -point.w;
        }
        for (k, &j) in self.comp_index.iter().enumerate() {
            x[j] = point.xbar[k];
        }
        x
    }

    /// Restricts a point of `self` to the complement of a larger squeezed
    /// problem `target`: coordinates newly saturated in `target` are dropped
    /// and `w` is kept.
    pub fn carry_over(&self, point: &PrimalPoint, target: &SqueezedProblem) -> PrimalPoint {
        let mut position = vec![usize::MAX; self.n];
        for (k, &j) in self.comp_index.iter().enumerate() {
            position[j] = k;
        }
        let xbar = target.comp_index.iter().map(|&j| point.xbar[position[j]]).collect();
        PrimalPoint { w: point.w, xbar }
    }
}

/// Builds the squeezed problem for the given sets.
pub fn build_squeezed(instance: &ProblemInstance, sets: &SaturationSets) -> Result<SqueezedProblem> {
    SqueezedProblem::new(instance, sets)
}

/// Expands a squeezed iterate to a full coefficient vector of length `n`.
pub fn expand_solution(sq: &SqueezedProblem, point: &PrimalPoint) -> Array1<f64> {
    sq.expand(point)
}

/// ST1 sphere: center `y`, radius `‖y − u‖`.
pub fn sphere_st1(instance: &ProblemInstance, u: &DualPoint) -> Result<SafeSphere> {
    if u.u.len() != instance.m() {
        return Err(Error::DimensionMismatch("dual point length differs from m".into()));
    }
    let d = &instance.y() - &u.u;
    SafeSphere::new(instance.y().to_owned(), d.dot(&d).sqrt())
}

/// GAP sphere: center `u`, radius `sqrt(2·gap(w, x̄, u))`.
pub fn sphere_gap(
    instance: &ProblemInstance,
    sets: &SaturationSets,
    point: &PrimalPoint,
    u: &DualPoint,
) -> Result<SafeSphere> {
    let sq = SqueezedProblem::new(instance, sets)?;
    sphere_gap_squeezed(&sq, point, u)
}

pub fn sphere_gap_squeezed(sq: &SqueezedProblem, point: &PrimalPoint, u: &DualPoint) -> Result<SafeSphere> {
    if u.u.len() != sq.m() || point.xbar.len() != sq.q() {
        return Err(Error::DimensionMismatch("point sizes do not match the squeezed problem".into()));
    }
    let gap = sq.duality_gap(point, u.u.view());
    let y = sq.y();
    SafeSphere::new(u.u.clone(), gap_radius(gap, gap_scale(y.dot(&y), sq.lambda(), point.w))?)
}

/// Magnitude of the terms of a duality gap at `w`: `½‖y‖² + λw`.
pub fn gap_scale(y_norm_sq: f64, lambda: f64, w: f64) -> f64 {
    0.5 * y_norm_sq + lambda * w.abs()
}

/// `sqrt(2·gap)` widened by the rounding allowance for a gap computed from
/// terms of size `scale`; small negative gaps count as zero.
pub fn gap_radius(gap: f64, scale: f64) -> Result<f64> {
    if gap < -GAP_ERROR_TOL || gap.is_nan() {
        return Err(Error::Infeasible(format!("negative duality gap {gap}")));
    }
    Ok((2.0 * (gap.max(0.0) + GAP_ROUNDING * scale)).sqrt())
}

/// Flags `i ∈ I⁺` when `aᵢᵀc > r‖aᵢ‖` and `i ∈ I⁻` when `aᵢᵀc < −r‖aᵢ‖`.
pub fn squeezing_test(instance: &ProblemInstance, sphere: &SafeSphere) -> Result<SaturationSets> {
    if sphere.center.len() != instance.m() {
        return Err(Error::DimensionMismatch("sphere center length differs from m".into()));
    }
    let corr = instance.a().t().dot(&sphere.center);
    let indices: Vec<usize> = (0..instance.n()).collect();
    test_correlations(&indices, corr.view(), instance.column_norms(), sphere.radius)
}

/// Squeezing test on precomputed correlations `corr[k] = a_{idx[k]}ᵀc`.
pub(crate) fn test_correlations(
    indices: &[usize],
    corr: ArrayView1<'_, f64>,
    norms: &[f64],
    radius: f64,
) -> Result<SaturationSets> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (k, &i) in indices.iter().enumerate() {
        let threshold = radius * norms[k];
        if corr[k] > threshold {
            plus.push(i);
        } else if corr[k] < -threshold {
            minus.push(i);
        }
    }
    SaturationSets::new(plus, minus)
}

/// Componentwise union; an index with opposite signs in the two inputs is an error.
pub fn merge_sets(old: &SaturationSets, new: &SaturationSets) -> Result<SaturationSets> {
    let mut plus = old.plus().to_vec();
    let mut minus = old.minus().to_vec();
    plus.extend_from_slice(new.plus());
    minus.extend_from_slice(new.minus());
    SaturationSets::new(plus, minus).map_err(|e| match e {
        Error::OverlappingSets(i) => Error::ContradictoryFlags(i),
        other => other,
    })
}
