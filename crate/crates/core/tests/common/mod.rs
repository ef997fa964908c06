//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the solver or squeezing code: every value is
//! recomputed from the problem data with plain loops or dense linear algebra.

#![allow(dead_code)]

use antisparse::ProblemInstance;
use nalgebra::{DMatrix, DVector};
use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

/// `Σⱼ |aⱼᵀy|` by explicit loops.
pub fn naive_lambda_max(a: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>) -> f64 {
    let (m, n) = a.dim();
    (0..n).map(|j| (0..m).map(|i| a[[i, j]] * y[i]).sum::<f64>().abs()).sum()
}

pub fn naive_matvec(a: ArrayView2<'_, f64>, x: ArrayView1<'_, f64>) -> Array1<f64> {
    let (m, n) = a.dim();
    Array1::from_iter((0..m).map(|i| (0..n).map(|j| a[[i, j]] * x[j]).sum::<f64>()))
}

pub fn naive_primal(a: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>, lambda: f64, x: ArrayView1<'_, f64>) -> f64 {
    let ax = naive_matvec(a, x);
    let rr: f64 = y.iter().zip(ax.iter()).map(|(yi, axi)| (yi - axi).powi(2)).sum();
    let linf = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    0.5 * rr + lambda * linf
}

pub fn naive_dual(y: ArrayView1<'_, f64>, u: ArrayView1<'_, f64>) -> f64 {
    let yy: f64 = y.iter().map(|v| v * v).sum();
    let d: f64 = y.iter().zip(u.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    0.5 * yy - 0.5 * d
}

/// `‖Aᵀu‖₁`, the left-hand side of the dual constraint.
pub fn naive_dual_lhs(a: ArrayView2<'_, f64>, u: ArrayView1<'_, f64>) -> f64 {
    naive_lambda_max(a, u)
}

/// Signed saturated-column sum `Σ_{I⁺} aᵢ − Σ_{I⁻} aᵢ`.
pub fn naive_s(a: ArrayView2<'_, f64>, plus: &[usize], minus: &[usize]) -> Array1<f64> {
    let m = a.nrows();
    Array1::from_iter((0..m).map(|i| {
        plus.iter().map(|&j| a[[i, j]]).sum::<f64>() - minus.iter().map(|&j| a[[i, j]]).sum::<f64>()
    }))
}

/// Minimizer of `½‖y − Ax‖² + λ‖x‖∞` by enumerating sign patterns.
///
/// For each pattern `σ ∈ {−1, 0, 1}ⁿ` with at least one nonzero entry, saturated
/// coordinates are `σᵢ·t` and the others are free. Stationarity in `(x_F, t)`
/// is a linear system; a pattern is accepted when `t > 0`, every free entry
/// satisfies `|xᵢ| ≤ t` and every saturated correlation has the sign of `σᵢ`.
/// Returns the accepted candidate with the lowest objective.
pub fn kkt_enumerate(a: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>, lambda: f64) -> Array1<f64> {
    let (m, n) = a.dim();
    if naive_lambda_max(a, y) <= lambda {
        return Array1::zeros(n);
    }
    let mut best: Option<(f64, Array1<f64>)> = None;
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut sigma = vec![0i8; n];
        let mut c = code;
        for s in sigma.iter_mut() {
            *s = (c % 3) as i8 - 1;
            c /= 3;
        }
        let free: Vec<usize> = (0..n).filter(|&j| sigma[j] == 0).collect();
        if free.len() == n || free.len() + 1 > m {
            continue;
        }
        let k = free.len() + 1;
        let mut b = DMatrix::<f64>::zeros(m, k);
        for i in 0..m {
            for (col, &j) in free.iter().enumerate() {
                b[(i, col)] = a[[i, j]];
            }
            b[(i, k - 1)] = (0..n).map(|j| f64::from(sigma[j]) * a[[i, j]]).sum();
        }
        let yv = DVector::from_iterator(m, y.iter().copied());
        let gram = b.transpose() * &b;
        let mut rhs = b.transpose() * &yv;
        rhs[k - 1] -= lambda;
        let Some(z) = gram.clone().lu().solve(&rhs) else { continue };
        if gram.determinant().abs() < 1e-12 {
            continue;
        }
        let t = z[k - 1];
        if t <= 1e-12 {
            continue;
        }
        let mut x = Array1::zeros(n);
        for j in 0..n {
            x[j] = f64::from(sigma[j]) * t;
        }
        for (col, &j) in free.iter().enumerate() {
            x[j] = z[col];
        }
        if free.iter().any(|&j| x[j].abs() > t * (1.0 + 1e-9)) {
            continue;
        }
        let r = &y - &naive_matvec(a, x.view());
        let signs_ok = (0..n).filter(|&j| sigma[j] != 0).all(|j| {
            let c: f64 = (0..m).map(|i| a[[i, j]] * r[i]).sum();
            f64::from(sigma[j]) * c >= -1e-9
        });
        if !signs_ok {
            continue;
        }
        let obj = naive_primal(a, y, lambda, x.view());
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, x));
        }
    }
    best.expect("a feasible sign pattern exists for λ < λmax").1
}

/// Exact projection of `(w0, x0)` onto `{(w̃, x̄) : α|x̄ᵢ| ≤ w̃}` by enumerating active sets.
///
/// For an active set `Q` the clipped entries are `sign(x0ᵢ)·w̃/α` and the
/// optimal level is `w̃ = (w0 + Σ_Q |x0ᵢ|/α) / (1 + |Q|/α²)`. The apex
/// `(0, 0)` is added as a candidate. The projection is the feasible candidate
/// closest to the input.
pub fn projection_enumerate(x0: &[f64], w0: f64, alpha: f64) -> (f64, Vec<f64>) {
    let q = x0.len();
    let mut best: (f64, f64, Vec<f64>) = (apex_distance(x0, w0), 0.0, vec![0.0; q]);
    for mask in 0u32..(1 << q) {
        let k = mask.count_ones() as f64;
        let sum: f64 = (0..q).filter(|i| mask >> i & 1 == 1).map(|i| x0[i].abs()).sum();
        let wt = (w0 + sum / alpha) / (1.0 + k / (alpha * alpha));
        if wt < 0.0 {
            continue;
        }
        let x: Vec<f64> = (0..q)
            .map(|i| if mask >> i & 1 == 1 { (wt / alpha).copysign(x0[i]) } else { x0[i] })
            .collect();
        if x.iter().any(|v| alpha * v.abs() > wt * (1.0 + 1e-12) + 1e-300) {
            continue;
        }
        let d = (wt - w0).powi(2) + x.iter().zip(x0).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
        if d < best.0 {
            best = (d, wt, x);
        }
    }
    (best.1, best.2)
}

fn apex_distance(x0: &[f64], w0: f64) -> f64 {
    w0 * w0 + x0.iter().map(|v| v * v).sum::<f64>()
}

/// Minimum over the vertices `d ∈ {−1, 1}ⁿ` of the directional derivative of
/// the primal objective at zero, `−yᵀAd + λ‖d‖∞`. Zero is optimal iff it is `≥ 0`.
pub fn min_directional_derivative_at_zero(a: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>, lambda: f64) -> f64 {
    let (m, n) = a.dim();
    let aty: Vec<f64> = (0..n).map(|j| (0..m).map(|i| a[[i, j]] * y[i]).sum()).collect();
    let mut best = f64::INFINITY;
    for code in 0u32..(1 << n) {
        let dot: f64 = (0..n).map(|j| if code >> j & 1 == 1 { aty[j] } else { -aty[j] }).sum();
        best = best.min(lambda - dot);
    }
    best
}

/// Deterministic xorshift stream for test inputs that must not depend on the crate's RNG.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }
}

/// Random dense `m × n` instance with unit-norm columns and `λ = ratio·λmax`.
pub fn random_instance(rng: &mut TestRng, m: usize, n: usize, ratio: f64) -> ProblemInstance {
    let a = Array2::from_shape_fn((m, n), |_| rng.uniform(-1.0, 1.0));
    let y = Array1::from_shape_fn(m, |_| rng.uniform(-1.0, 1.0));
    let p = ProblemInstance::new(a, y, 1.0).unwrap();
    let lmax = p.lambda_max();
    p.with_lambda(ratio * lmax).unwrap()
}

pub fn linf(x: ArrayView1<'_, f64>) -> f64 {
    x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn max_abs_diff(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}
