use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use antisparse_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe { antisparse_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn generate_solve_and_read_back() {
    unsafe {
        let mut p = ptr::null_mut();
        let st = antisparse_problem_generate(AntisparseDictionary::Gaussian as u32, 10, 15, 7, 0.5, &mut p);
        assert_eq!(st, AntisparseStatus::Ok);
        let (mut m, mut n) = (0, 0);
        assert_eq!(antisparse_problem_dims(p, &mut m, &mut n), AntisparseStatus::Ok);
        assert_eq!((m, n), (10, 15));
        let (mut lambda, mut lmax) = (0.0, 0.0);
        assert_eq!(antisparse_problem_lambda(p, &mut lambda, &mut lmax), AntisparseStatus::Ok);
        assert!((lambda / lmax - 0.5).abs() < 1e-15);

        let mut r = ptr::null_mut();
        assert_eq!(antisparse_solve(p, AntisparseSolver::Pgs as u32, 1e-10, 0, &mut r), AntisparseStatus::Ok);
        let (mut gap, mut conv, mut iters, mut mults) = (0.0, false, 0usize, 0u64);
        assert_eq!(antisparse_report_summary(r, &mut gap, &mut conv, &mut iters, &mut mults), AntisparseStatus::Ok);
        assert!(conv && gap <= 1e-10 && iters > 0 && mults > 0);

        let mut len = 0;
        assert_eq!(antisparse_report_x(r, ptr::null_mut(), 0, &mut len), AntisparseStatus::Ok);
        assert_eq!(len, 15);
        let mut x = vec![0.0; len];
        assert_eq!(antisparse_report_x(r, x.as_mut_ptr(), x.len(), &mut len), AntisparseStatus::Ok);
        let linf = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(linf > 0.0);

        let mut small = [0.0; 3];
        assert_eq!(antisparse_report_x(r, small.as_mut_ptr(), 3, &mut len), AntisparseStatus::BufferTooSmall);
        assert!(last_error().contains("needed"));

        let mut np = 0;
        let mut nm = 0;
        antisparse_report_saturated(r, false, ptr::null_mut(), 0, &mut np);
        antisparse_report_saturated(r, true, ptr::null_mut(), 0, &mut nm);
        let mut plus = vec![0usize; np];
        assert_eq!(antisparse_report_saturated(r, false, plus.as_mut_ptr(), np, &mut np), AntisparseStatus::Ok);
        for &i in &plus {
            assert!((x[i] - linf).abs() < 1e-12);
        }
        // a solution with n − m + 1 = 6 or more saturated entries is generic
        assert!(np + nm >= 6, "{np} + {nm}");

        let mut u = vec![0.0; 10];
        assert_eq!(antisparse_report_u(r, u.as_mut_ptr(), 10, &mut len), AntisparseStatus::Ok);
        assert_eq!(len, 10);

        antisparse_report_free(r);
        antisparse_problem_free(p);
    }
}

#[test]
fn problem_from_buffers_and_zero_solution() {
    // A = I₂, y = (1, 1): λmax = 2
    let a = [1.0, 0.0, 0.0, 1.0];
    let y = [1.0, 1.0];
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(antisparse_problem_new(a.as_ptr(), 2, 2, y.as_ptr(), 3.0, &mut p), AntisparseStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(antisparse_solve(p, AntisparseSolver::Fitra as u32, 1e-9, 0, &mut r), AntisparseStatus::Ok);
        let mut x = [1.0; 2];
        let mut len = 0;
        antisparse_report_x(r, x.as_mut_ptr(), 2, &mut len);
        assert_eq!(x, [0.0, 0.0]);
        antisparse_report_free(r);
        antisparse_problem_free(p);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let a = [1.0, 0.0, 0.0, 0.0];
    let y = [1.0, 1.0];
    unsafe {
        let mut p = ptr::null_mut();
        assert_eq!(antisparse_problem_new(a.as_ptr(), 2, 2, y.as_ptr(), 1.0, &mut p), AntisparseStatus::ZeroColumn);
        assert!(p.is_null());
        assert!(last_error().contains("column 1"));
        assert_eq!(antisparse_problem_new(ptr::null(), 2, 2, y.as_ptr(), 1.0, &mut p), AntisparseStatus::NullPointer);
        assert_eq!(antisparse_problem_generate(99, 4, 6, 0, 0.5, &mut p), AntisparseStatus::InvalidArgument);
        assert_eq!(
            antisparse_problem_generate(AntisparseDictionary::Dct as u32, 8, 4, 0, 0.5, &mut p),
            AntisparseStatus::InvalidArgument
        );
        assert_eq!(
            antisparse_problem_new([1.0, 1.0].as_ptr(), 2, 1, y.as_ptr(), -1.0, &mut p),
            AntisparseStatus::InvalidArgument
        );
        assert_eq!(antisparse_problem_generate(0, 4, 6, 0, 0.5, &mut p), AntisparseStatus::Ok);
        let mut r = ptr::null_mut();
        assert_eq!(antisparse_solve(p, 42, 1e-8, 0, &mut r), AntisparseStatus::InvalidArgument);
        assert_eq!(antisparse_solve(ptr::null(), 0, 1e-8, 0, &mut r), AntisparseStatus::NullPointer);
        antisparse_problem_free(p);
        antisparse_problem_free(ptr::null_mut());
        antisparse_report_free(ptr::null_mut());
    }
}

#[test]
fn budget_is_respected() {
    unsafe {
        let mut p = ptr::null_mut();
        antisparse_problem_generate(AntisparseDictionary::Gaussian as u32, 20, 30, 1, 0.3, &mut p);
        let mut r = ptr::null_mut();
        assert_eq!(antisparse_solve(p, AntisparseSolver::Fw as u32, 1e-14, 10_000, &mut r), AntisparseStatus::Ok);
        let (mut conv, mut mults) = (true, 0u64);
        antisparse_report_summary(r, ptr::null_mut(), &mut conv, ptr::null_mut(), &mut mults);
        assert!(!conv);
        // one FW iteration on 20×30 costs well under 2000 multiplications
        assert!((10_000..12_000).contains(&mults), "{mults}");
        antisparse_report_free(r);
        antisparse_problem_free(p);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(antisparse_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/antisparse.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 10);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

/// Compiles a small C client against the header and the static library.
#[test]
fn c_client_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let profile_dir = tmp.parent().unwrap().join(if cfg!(debug_assertions) { "debug" } else { "release" });
    let lib = profile_dir.join("libantisparse_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: static library or C compiler unavailable");
        return;
    }
    let exe = tmp.join("antisparse_c_client");
    let status = Command::new("cc")
        .arg(manifest.join("tests/client.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C client failed to compile");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("converged=1"));
}
