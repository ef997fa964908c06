//! Problem instances, primal and dual objectives, the duality gap and dual scaling.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, ShapeBuilder};

use crate::squeeze::SqueezedProblem;
use crate::{Error, Result, DUAL_FEASIBILITY_TOL};

/// Primal feasibility slack accepted by [`duality_gap`].
const PRIMAL_FEASIBILITY_TOL: f64 = 1e-12;

/// An ℓ∞-penalized least-squares instance `½‖y − Ax‖² + λ‖x‖∞`.
///
/// Columns of `A` are normalized to unit Euclidean norm on construction; the
/// original norms are kept in [`ProblemInstance::column_scales`] so a solution
/// `x` of the normalized problem maps back to `x[i] / scale[i]`.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    a: Array2<f64>,
    y: Array1<f64>,
    lambda: f64,
    column_scales: Vec<f64>,
    column_norms: Vec<f64>,
}

impl ProblemInstance {
    pub fn new(a: Array2<f64>, y: Array1<f64>, lambda: f64) -> Result<Self> {
        let (m, n) = a.dim();
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!("dictionary must be non-empty, got {m}x{n}")));
        }
        if y.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "dictionary has {m} rows, observation has length {}",
                y.len()
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be positive and finite, got {lambda}")));
        }
        let mut cols = to_column_major(a);
        let mut column_scales = Vec::with_capacity(n);
        for (j, mut col) in cols.columns_mut().into_iter().enumerate() {
            let norm = col.dot(&col).sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::ZeroColumn(j));
            }
            col.mapv_inplace(|v| v / norm);
            column_scales.push(norm);
        }
        let column_norms = cols.columns().into_iter().map(|c| c.dot(&c).sqrt()).collect();
        Ok(Self { a: cols, y, lambda, column_scales, column_norms })
    }

    /// Same dictionary and observation with a different penalty.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(Self { lambda, ..self.clone() })
    }

    pub fn a(&self) -> ArrayView2<'_, f64> {
        self.a.view()
    }

    pub fn y(&self) -> ArrayView1<'_, f64> {
        self.y.view()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    /// Norms of the columns as supplied, before normalization.
    pub fn column_scales(&self) -> &[f64] {
        &self.column_scales
    }

    /// Norms of the stored (normalized) columns.
    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    pub fn lambda_max(&self) -> f64 {
        self.a.t().dot(&self.y).iter().map(|v| v.abs()).sum()
    }

    /// `true` when `λ ≥ ‖Aᵀy‖₁`, i.e. the minimizer is the zero vector.
    pub fn has_zero_solution(&self) -> bool {
        self.lambda >= self.lambda_max()
    }

    /// Full objective `½‖y − Ax‖² + λ‖x‖∞`.
    pub fn objective(&self, x: ArrayView1<'_, f64>) -> Result<f64> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch(format!("expected {} coefficients, got {}", self.n(), x.len())));
        }
        let r = &self.y - &self.a.dot(&x);
        let linf = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        Ok(0.5 * r.dot(&r) + self.lambda * linf)
    }
}

pub(crate) fn to_column_major(a: Array2<f64>) -> Array2<f64> {
    if a.t().is_standard_layout() {
        return a;
    }
    let dim = a.dim();
    let mut out = Array2::<f64>::zeros(dim.f());
    out.assign(&a);
    out
}

/// `‖Aᵀy‖₁`, the smallest penalty for which the minimizer is zero.
pub fn lambda_max(a: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> Result<f64> {
    if a.nrows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "dictionary has {} rows, observation has length {}",
            a.nrows(),
            y.len()
        )));
    }
    Ok(a.t().dot(&y).iter().map(|v| v.abs()).sum())
}

/// Disjoint sets of indices proven saturated at `+‖x*‖∞` (`plus`) and `−‖x*‖∞` (`minus`).
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SaturationSets {
    plus: Vec<usize>,
    minus: Vec<usize>,
}

impl SaturationSets {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds the sets, sorting and deduplicating each side.
    pub fn new(mut plus: Vec<usize>, mut minus: Vec<usize>) -> Result<Self> {
        plus.sort_unstable();
        plus.dedup();
        minus.sort_unstable();
        minus.dedup();
        if let Some(&i) = plus.iter().find(|i| minus.binary_search(i).is_ok()) {
            return Err(Error::OverlappingSets(i));
        }
        Ok(Self { plus, minus })
    }

    pub fn plus(&self) -> &[usize] {
        &self.plus
    }

    pub fn minus(&self) -> &[usize] {
        &self.minus
    }

    pub fn len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }

    /// `Some(+1.0)` / `Some(-1.0)` for saturated indices, `None` otherwise.
    pub fn sign_of(&self, i: usize) -> Option<f64> {
        if self.plus.binary_search(&i).is_ok() {
            Some(1.0)
        } else if self.minus.binary_search(&i).is_ok() {
            Some(-1.0)
        } else {
            None
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.sign_of(i).is_some()
    }

    /// `true` when every index of `self` appears with the same sign in `other`.
    pub fn is_subset_of(&self, other: &SaturationSets) -> bool {
        self.plus.iter().all(|i| other.plus.binary_search(i).is_ok())
            && self.minus.iter().all(|i| other.minus.binary_search(i).is_ok())
    }

    pub fn max_index(&self) -> Option<usize> {
        self.plus.last().copied().max(self.minus.last().copied())
    }
}

/// Iterate `(w, x̄)` of the squeezed problem: `w` is the common magnitude of the
/// saturated entries and `x̄` holds the free coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalPoint {
    pub w: f64,
    pub xbar: Array1<f64>,
}

impl PrimalPoint {
    pub fn zero(q: usize) -> Self {
        Self { w: 0.0, xbar: Array1::zeros(q) }
    }

    /// Point of the unsqueezed problem for a full coefficient vector.
    pub fn from_full(x: ArrayView1<'_, f64>) -> Self {
        let w = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        Self { w, xbar: x.to_owned() }
    }

    pub fn is_feasible(&self, tol: f64) -> bool {
        self.w >= -tol && self.xbar.iter().all(|v| v.abs() <= self.w + tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualPoint {
    pub u: Array1<f64>,
}

impl DualPoint {
    pub fn new(u: Array1<f64>) -> Self {
        Self { u }
    }
}

fn squeezed(instance: &ProblemInstance, sets: &SaturationSets) -> Result<SqueezedProblem> {
    SqueezedProblem::new(instance, sets)
}

fn check_point(sq: &SqueezedProblem, point: &PrimalPoint) -> Result<()> {
    if point.xbar.len() != sq.q() {
        return Err(Error::DimensionMismatch(format!(
            "squeezed problem has {} free coefficients, point has {}",
            sq.q(),
            point.xbar.len()
        )));
    }
    Ok(())
}

fn check_dual(instance: &ProblemInstance, u: &DualPoint) -> Result<()> {
    if u.u.len() != instance.m() {
        return Err(Error::DimensionMismatch(format!(
            "dual point has length {}, expected {}",
            u.u.len(),
            instance.m()
        )));
    }
    Ok(())
}

/// `½‖y − A_{∁I}x̄ − s·w‖² + λw`.
pub fn primal_objective(instance: &ProblemInstance, sets: &SaturationSets, point: &PrimalPoint) -> Result<f64> {
    let sq = squeezed(instance, sets)?;
    check_point(&sq, point)?;
    Ok(sq.primal_objective(point))
}

/// `½‖y‖² − ½‖y − u‖²`.
pub fn dual_objective(instance: &ProblemInstance, u: &DualPoint) -> Result<f64> {
    check_dual(instance, u)?;
    Ok(dual_value(instance.y(), u.u.view()))
}

pub(crate) fn dual_value(y: ArrayView1<'_, f64>, u: ArrayView1<'_, f64>) -> f64 {
    let d = &y - &u;
    0.5 * y.dot(&y) - 0.5 * d.dot(&d)
}

/// Primal minus dual objective for a feasible primal-dual pair.
///
/// Evaluated as `½‖r − u‖² + λw − uᵀ(A_{∁I}x̄ + s·w)` with `r` the residual,
/// which equals the plain difference of objectives but avoids cancelling two
/// large numbers.
pub fn duality_gap(
    instance: &ProblemInstance,
    sets: &SaturationSets,
    point: &PrimalPoint,
    u: &DualPoint,
) -> Result<f64> {
    check_dual(instance, u)?;
    let sq = squeezed(instance, sets)?;
    check_point(&sq, point)?;
    if !point.is_feasible(PRIMAL_FEASIBILITY_TOL) {
        return Err(Error::Infeasible("primal point violates |x̄| ≤ w".into()));
    }
    let lhs = sq.dual_constraint(u.u.view());
    if lhs > instance.lambda() + DUAL_FEASIBILITY_TOL {
        return Err(Error::Infeasible(format!(
            "dual point violates the constraint: {lhs} > λ = {}",
            instance.lambda()
        )));
    }
    Ok(sq.duality_gap(point, u.u.view()))
}

/// Rescales `z` onto the dual feasible set: `z` itself when
/// `L = ‖A_{∁I}ᵀz‖₁ + sᵀz ≤ 0`, otherwise `(λ/L)·z`.
pub fn dual_scaling(instance: &ProblemInstance, sets: &SaturationSets, z: ArrayView1<'_, f64>) -> Result<DualPoint> {
    if z.len() != instance.m() {
        return Err(Error::DimensionMismatch(format!("z has length {}, expected {}", z.len(), instance.m())));
    }
    let sq = squeezed(instance, sets)?;
    Ok(sq.dual_scaling(z))
}

/// `‖A_{∁I}ᵀu‖₁ + sᵀu ≤ λ + 1e-12`.
pub fn is_dual_feasible(instance: &ProblemInstance, sets: &SaturationSets, u: &DualPoint) -> Result<bool> {
    check_dual(instance, u)?;
    let sq = squeezed(instance, sets)?;
    Ok(sq.dual_constraint(u.u.view()) <= instance.lambda() + DUAL_FEASIBILITY_TOL)
}
