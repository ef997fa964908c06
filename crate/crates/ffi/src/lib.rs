//! C ABI for the antisparse library.
//!
//! Problems and solve reports are opaque heap handles created and released
//! through this API. Every fallible function returns an [`AntisparseStatus`];
//! on failure a description is stored per thread and can be read with
//! [`antisparse_last_error_message`]. Panics never cross the boundary.
//!
//! Matrices are passed row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use antisparse::dictgen::DictionaryVariant;
use antisparse::experiments::{make_instance, run_solver, BenchRun, BenchSolver};
use antisparse::{Error, ProblemInstance};
use ndarray::{Array1, Array2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntisparseStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    ZeroColumn = 4,
    Infeasible = 5,
    ContradictoryFlags = 6,
    Parse = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntisparseDictionary {
    Gaussian = 0,
    Uniform = 1,
    Dct = 2,
    Toeplitz = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AntisparseSolver {
    /// Accelerated proximal gradient on the full problem.
    Fitra = 0,
    /// Frank-Wolfe without squeezing.
    Fw = 1,
    /// Projected gradient with dynamic squeezing.
    Pgs = 2,
    /// Frank-Wolfe with dynamic squeezing.
    Fws = 3,
}

/// Opaque problem instance.
pub struct AntisparseProblem(ProblemInstance);

/// Opaque solve report.
pub struct AntisparseReport(BenchRun);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> AntisparseStatus {
    match err {
        Error::DimensionMismatch(_) => AntisparseStatus::DimensionMismatch,
        Error::InvalidArgument(_) => AntisparseStatus::InvalidArgument,
        Error::ZeroColumn(_) => AntisparseStatus::ZeroColumn,
        Error::ContradictoryFlags(_) | Error::OverlappingSets(_) => AntisparseStatus::ContradictoryFlags,
        Error::Infeasible(_) => AntisparseStatus::Infeasible,
        Error::Parse { .. } | Error::Json(_) => AntisparseStatus::Parse,
        Error::Io(_) => AntisparseStatus::Io,
    }
}

struct Failure(AntisparseStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AntisparseStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AntisparseStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AntisparseStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            AntisparseStatus::Panic
        }
    }
}

// Selectors arrive as plain integers: an out-of-range value must be an error,
// not an invalid enum.
fn variant(d: u32) -> Result<DictionaryVariant, Failure> {
    match d {
        x if x == AntisparseDictionary::Gaussian as u32 => Ok(DictionaryVariant::Gaussian),
        x if x == AntisparseDictionary::Uniform as u32 => Ok(DictionaryVariant::Uniform),
        x if x == AntisparseDictionary::Dct as u32 => Ok(DictionaryVariant::Dct),
        x if x == AntisparseDictionary::Toeplitz as u32 => Ok(DictionaryVariant::Toeplitz),
        other => Err(Failure(AntisparseStatus::InvalidArgument, format!("unknown dictionary kind {other}"))),
    }
}

fn solver(s: u32) -> Result<BenchSolver, Failure> {
    match s {
        x if x == AntisparseSolver::Fitra as u32 => Ok(BenchSolver::Fitra),
        x if x == AntisparseSolver::Fw as u32 => Ok(BenchSolver::Fw),
        x if x == AntisparseSolver::Pgs as u32 => Ok(BenchSolver::Pgs),
        x if x == AntisparseSolver::Fws as u32 => Ok(BenchSolver::Fws),
        other => Err(Failure(AntisparseStatus::InvalidArgument, format!("unknown solver {other}"))),
    }
}

/// Copies `src` into `(buf, cap)`; `buf` may be null when only the length is wanted.
unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, cap: usize, len_out: *mut usize) -> Result<(), Failure> {
    if !len_out.is_null() {
        *len_out = src.len();
    }
    if buf.is_null() {
        return if cap == 0 { Ok(()) } else { Err(null("output buffer")) };
    }
    if cap < src.len() {
        return Err(Failure(
            AntisparseStatus::BufferTooSmall,
            format!("buffer holds {cap} values, {} needed", src.len()),
        ));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    Ok(())
}

/// Copies the last error message of this thread, NUL-terminated, into `buf`.
///
/// Returns the message length without the terminator (0 when there is no
/// error). The message is truncated when `cap` is too small.
///
/// # Safety
/// `buf` must be null or point to `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn antisparse_last_error_message(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => {
            if !buf.is_null() && cap > 0 {
                *buf = 0;
            }
            0
        }
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && cap > 0 {
                let n = bytes.len().min(cap - 1);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn antisparse_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a problem from a row-major `m × n` dictionary, an observation of
/// length `m` and a penalty `lambda > 0`. Columns are normalized to unit norm.
///
/// # Safety
/// `a` must point to `m·n` doubles, `y` to `m` doubles, `out` to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn antisparse_problem_new(
    a: *const f64,
    m: usize,
    n: usize,
    y: *const f64,
    lambda: f64,
    out: *mut *mut AntisparseProblem,
) -> AntisparseStatus {
    guard(|| {
        if a.is_null() {
            return Err(null("a"));
        }
        if y.is_null() {
            return Err(null("y"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let len = m.checked_mul(n).ok_or_else(|| Failure(AntisparseStatus::InvalidArgument, "m*n overflows".into()))?;
        let a = Array2::from_shape_vec((m, n), std::slice::from_raw_parts(a, len).to_vec())
            .map_err(|e| Failure(AntisparseStatus::DimensionMismatch, e.to_string()))?;
        let y = Array1::from(std::slice::from_raw_parts(y, m).to_vec());
        let p = ProblemInstance::new(a, y, lambda)?;
        *out = Box::into_raw(Box::new(AntisparseProblem(p)));
        Ok(())
    })
}

/// Generates a reproducible instance with `lambda = lambda_ratio · lambda_max`.
///
/// `dict` is an [`AntisparseDictionary`] value.
///
/// # Safety
/// `out` must point to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn antisparse_problem_generate(
    dict: u32,
    m: usize,
    n: usize,
    seed: u64,
    lambda_ratio: f64,
    out: *mut *mut AntisparseProblem,
) -> AntisparseStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = make_instance(variant(dict)?, m, n, seed, lambda_ratio)?;
        *out = Box::into_raw(Box::new(AntisparseProblem(p)));
        Ok(())
    })
}

/// Releases a problem; null is ignored.
///
/// # Safety
/// `p` must be null or a handle returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn antisparse_problem_free(p: *mut AntisparseProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Writes the dictionary dimensions.
///
/// # Safety
/// `p` must be a live handle; `m` and `n` writable.
#[no_mangle]
pub unsafe extern "C" fn antisparse_problem_dims(p: *const AntisparseProblem, m: *mut usize, n: *mut usize) -> AntisparseStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        if m.is_null() || n.is_null() {
            return Err(null("output"));
        }
        *m = p.0.m();
        *n = p.0.n();
        Ok(())
    })
}

/// Writes `lambda` and `lambda_max = ‖Aᵀy‖₁`.
///
/// # Safety
/// `p` must be a live handle; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn antisparse_problem_lambda(
    p: *const AntisparseProblem,
    lambda: *mut f64,
    lambda_max: *mut f64,
) -> AntisparseStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        if lambda.is_null() || lambda_max.is_null() {
            return Err(null("output"));
        }
        *lambda = p.0.lambda();
        *lambda_max = p.0.lambda_max();
        Ok(())
    })
}

/// Solves `p` until the dual gap is at most `gap_tol` or `budget`
/// multiplications are spent (`budget = 0` means unlimited). `kind` is an
/// [`AntisparseSolver`] value.
///
/// # Safety
/// `p` must be a live handle; `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn antisparse_solve(
    p: *const AntisparseProblem,
    kind: u32,
    gap_tol: f64,
    budget: u64,
    out: *mut *mut AntisparseReport,
) -> AntisparseStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("problem"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(gap_tol >= 0.0) {
            return Err(Failure(AntisparseStatus::InvalidArgument, format!("gap_tol must be nonnegative, got {gap_tol}")));
        }
        let budget = (budget > 0).then_some(budget);
        let run = run_solver(solver(kind)?, &p.0, gap_tol, budget, None)?;
        *out = Box::into_raw(Box::new(AntisparseReport(run)));
        Ok(())
    })
}

/// Releases a report; null is ignored.
///
/// # Safety
/// `r` must be null or a handle returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn antisparse_report_free(r: *mut AntisparseReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Scalar summary of a report. Any output pointer may be null.
///
/// # Safety
/// `r` must be a live handle; non-null outputs writable.
#[no_mangle]
pub unsafe extern "C" fn antisparse_report_summary(
    r: *const AntisparseReport,
    gap: *mut f64,
    converged: *mut bool,
    iterations: *mut usize,
    mults: *mut u64,
) -> AntisparseStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("report"))?.0;
        if !gap.is_null() {
            *gap = r.gap;
        }
        if !converged.is_null() {
            *converged = r.converged;
        }
        if !iterations.is_null() {
            *iterations = r.iterations;
        }
        if !mults.is_null() {
            *mults = r.mults;
        }
        Ok(())
    })
}

/// Copies the solution (length `n`) into `buf`; `len` receives `n`.
///
/// Pass `buf = NULL, cap = 0` to query the length only.
///
/// # Safety
/// `r` must be a live handle; `buf` null or `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn antisparse_report_x(r: *const AntisparseReport, buf: *mut f64, cap: usize, len: *mut usize) -> AntisparseStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("report"))?.0;
        copy_out(r.x.as_slice().expect("contiguous"), buf, cap, len)
    })
}

/// Copies the dual point (length `m`) into `buf`; `len` receives `m`.
///
/// # Safety
/// `r` must be a live handle; `buf` null or `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn antisparse_report_u(r: *const AntisparseReport, buf: *mut f64, cap: usize, len: *mut usize) -> AntisparseStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("report"))?.0;
        copy_out(r.u.u.as_slice().expect("contiguous"), buf, cap, len)
    })
}

/// Copies the positively (`negative = false`) or negatively saturated
/// indices detected by squeezing; `len` receives their count.
///
/// # Safety
/// `r` must be a live handle; `buf` null or `cap` writable entries.
#[no_mangle]
pub unsafe extern "C" fn antisparse_report_saturated(
    r: *const AntisparseReport,
    negative: bool,
    buf: *mut usize,
    cap: usize,
    len: *mut usize,
) -> AntisparseStatus {
    guard(|| {
        let r = &r.as_ref().ok_or_else(|| null("report"))?.0;
        let set = if negative { r.sets.minus() } else { r.sets.plus() };
        copy_out(set, buf, cap, len)
    })
}
