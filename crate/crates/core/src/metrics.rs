//! Multiplication counting and Dolan-Moré performance profiles.
//!
//! Only multiplications (and divisions) are charged. Additions, comparisons,
//! sorting and random number generation are free. A product that is kept
//! around and reused later is charged once, when it is first computed.

use ndarray::{Array1, ArrayView1, ArrayView2};

use crate::{Error, Result};

/// Running multiplication count of one solver run.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    mults: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mults(&self) -> u64 {
        self.mults
    }

    pub fn add(&mut self, n: usize) {
        self.mults = self.mults.saturating_add(n as u64);
    }

    /// Charge the cost of a dense `rows × cols` matrix-vector product.
    pub fn add_matvec(&mut self, rows: usize, cols: usize) {
        self.add(rows * cols);
    }
}

/// `A · v`, charging `m·k` multiplications.
pub fn counted_matvec(
    a: ArrayView2<'_, f64>,
    v: ArrayView1<'_, f64>,
    counter: &mut OpCounter,
) -> Result<Array1<f64>> {
    let (m, k) = a.dim();
    if v.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {k} columns, vector has length {}",
            v.len()
        )));
    }
    counter.add_matvec(m, k);
    if k == 0 {
        return Ok(Array1::zeros(m));
    }
    Ok(a.dot(&v))
}

/// `Aᵀ · v`, charging `m·k` multiplications.
pub fn counted_matvec_t(
    a: ArrayView2<'_, f64>,
    v: ArrayView1<'_, f64>,
    counter: &mut OpCounter,
) -> Result<Array1<f64>> {
    let (m, k) = a.dim();
    if v.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "matrix has {m} rows, vector has length {}",
            v.len()
        )));
    }
    counter.add_matvec(m, k);
    if k == 0 {
        return Ok(Array1::zeros(0));
    }
    Ok(a.t().dot(&v))
}

pub fn counted_dot(x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>, counter: &mut OpCounter) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    counter.add(x.len());
    x.dot(&y)
}

pub fn counted_norm_sq(x: ArrayView1<'_, f64>, counter: &mut OpCounter) -> f64 {
    counter.add(x.len());
    x.dot(&x)
}

/// Performance profile of one solver over a fixed τ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCurve {
    pub taus: Vec<f64>,
    /// Percentage of runs with achieved gap `≤ τ`, one entry per τ.
    pub rho: Vec<f64>,
}

/// Computes `ρ_s(τ) = 100/p · |{j : d[j][s] ≤ τ}|` for every solver column `s`.
///
/// `gaps[j][s]` is the dual gap achieved by solver `s` on run `j`; use `+∞` for
/// runs that produced no certificate. NaN gaps never count as solved.
pub fn performance_profile(gaps: &[Vec<f64>], taus: &[f64]) -> Result<Vec<ProfileCurve>> {
    let runs = gaps.len();
    if runs == 0 {
        return Err(Error::InvalidArgument("performance profile needs at least one run".into()));
    }
    let solvers = gaps[0].len();
    if gaps.iter().any(|row| row.len() != solvers) {
        return Err(Error::DimensionMismatch("ragged gap matrix".into()));
    }
    let curves = (0..solvers)
        .map(|s| {
            let rho = taus
                .iter()
                .map(|&tau| {
                    let solved = gaps.iter().filter(|row| row[s] <= tau).count();
                    100.0 * solved as f64 / runs as f64
                })
                .collect();
            ProfileCurve { taus: taus.to_vec(), rho }
        })
        .collect();
    Ok(curves)
}

/// Logarithmic grid `10^lo, …, 10^hi` with `points` entries, ascending.
pub fn log_grid(lo_exp: f64, hi_exp: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![10f64.powf(lo_exp)],
        _ => (0..points)
            .map(|k| {
                let t = k as f64 / (points - 1) as f64;
                10f64.powf(lo_exp + t * (hi_exp - lo_exp))
            })
            .collect(),
    }
}

/// Default τ grid: 33 points from 1e-16 to 1.
pub fn default_tau_grid() -> Vec<f64> {
    log_grid(-16.0, 0.0, 33)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn matvec_charges_m_times_k() {
        let a = Array1::linspace(0.0, 1.0, 12).into_shape_with_order((3, 4)).unwrap();
        let v = array![1.0, 2.0, 3.0, 4.0];
        let mut c = OpCounter::new();
        let r = counted_matvec(a.view(), v.view(), &mut c).unwrap();
        assert_eq!(c.mults(), 12);
        assert_eq!(r.len(), 3);
    }

    #[test]
    fn empty_matvec_is_free() {
        let a = ndarray::Array2::<f64>::zeros((3, 0));
        let v = Array1::<f64>::zeros(0);
        let mut c = OpCounter::new();
        let r = counted_matvec(a.view(), v.view(), &mut c).unwrap();
        assert_eq!(c.mults(), 0);
        assert_eq!(r, Array1::<f64>::zeros(3));
    }

    #[test]
    fn matvec_rejects_mismatch() {
        let a = ndarray::Array2::<f64>::zeros((3, 2));
        let v = Array1::<f64>::zeros(3);
        let mut c = OpCounter::new();
        assert!(counted_matvec(a.view(), v.view(), &mut c).is_err());
        assert!(counted_matvec_t(a.view(), array![1.0, 2.0].view(), &mut c).is_err());
        assert_eq!(c.mults(), 0);
    }

    #[test]
    fn profile_counts() {
        let gaps = vec![vec![1e-8], vec![1e-3]];
        let curves = performance_profile(&gaps, &[1e-5, f64::INFINITY, 1e-9]).unwrap();
        assert_eq!(curves[0].rho, vec![50.0, 100.0, 0.0]);
    }

    #[test]
    fn profile_rejects_empty() {
        assert!(performance_profile(&[], &[1.0]).is_err());
    }

    #[test]
    fn profile_treats_infinite_gap_as_unsolved() {
        let gaps = vec![vec![f64::INFINITY, 0.0], vec![1.0, f64::NAN]];
        let curves = performance_profile(&gaps, &[1e300]).unwrap();
        assert_eq!(curves[0].rho, vec![50.0]);
        assert_eq!(curves[1].rho, vec![50.0]);
    }

    #[test]
    fn default_grid_shape() {
        let g = default_tau_grid();
        assert_eq!(g.len(), 33);
        assert!((g[0] - 1e-16).abs() < 1e-30);
        assert!((g[32] - 1.0).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
