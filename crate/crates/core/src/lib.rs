//! Safe squeezing for antisparse coding.
//!
//! The crate solves the ℓ∞-penalized least-squares problem
//!
//! ```text
//! minimize  ½‖y − A x‖² + λ‖x‖∞
//! ```
//!
//! and detects *saturated* entries of the minimizer (entries with
//! `|x[i]| = ‖x‖∞`) with tests that are certified by a safe sphere around the
//! dual optimum. Detected entries are folded into a single signed-sum column,
//! which shrinks the problem to `n − |I| + 1` unknowns.
//!
//! Layout:
//! - [`problem`]: problem instance, primal/dual objectives, duality gap, dual scaling.
//! - [`dictgen`]: reproducible Gaussian/Uniform/DCT/Toeplitz dictionaries and observations.
//! - [`squeeze`]: safe spheres, the sphere squeezing test, squeezed problems.
//! - [`solvers`]: Frank-Wolfe, rescaled projected gradient (with its finite-step
//!   projection) and an accelerated proximal-gradient baseline.
//! - [`dynamic`]: static squeezing and the dynamic squeezing loop.
//! - [`metrics`]: multiplication counting and performance profiles.
//! - [`experiments`]: detection, operation-count and profile experiments plus CSV/JSON I/O.

pub mod dictgen;
pub mod dynamic;
mod error;
pub mod experiments;
pub mod metrics;
pub mod problem;
pub mod solvers;
pub mod squeeze;

pub use error::{Error, Result};
pub use problem::{
    dual_objective, dual_scaling, duality_gap, lambda_max, primal_objective, DualPoint,
    PrimalPoint, ProblemInstance, SaturationSets,
};

/// Absolute tolerance used for dual feasibility checks.
pub const DUAL_FEASIBILITY_TOL: f64 = 1e-12;
