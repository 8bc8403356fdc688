use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use hadwiger_ffi::*;

fn fixture(name: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(hw_last_error()) }.to_str().unwrap().to_owned()
}

fn load(name: &str) -> *mut HwFunction {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { hw_function_from_file(fixture(name).as_ptr(), &mut h) }, HwStatus::Ok, "{}", last_error());
    h
}

fn integral(h: *const HwFunction, k: usize, b: HwBound, samples: usize, seed: u64) -> HwIntegral {
    let mut out = HwIntegral::default();
    assert_eq!(unsafe { hw_hadwiger_integral(h, k, b, samples, seed, &mut out) }, HwStatus::Ok, "{}", last_error());
    out
}

#[test]
fn tent_lower_and_upper() {
    let h = load("tent.json");
    unsafe {
        assert!(hw_function_is_pl(h));
        assert_eq!(hw_function_dim(h), 1);
    }
    assert_eq!(integral(h, 0, HwBound::Lower, 1, 0).value, 1.0);
    assert_eq!(integral(h, 0, HwBound::Upper, 1, 0).value, -1.0);
    let mut step = HwIntegral::default();
    assert_eq!(unsafe { hw_step_integral(h, 10, 0, HwBound::Lower, 1, 0, &mut step) }, HwStatus::Ok);
    assert!((step.value - 1.0).abs() <= 0.1);
    unsafe { hw_function_free(h) };
}

#[test]
fn grid_function_from_arrays() {
    // 1 on the open square (0,3)×(0,2), 0 elsewhere
    let counts = [2usize, 2];
    let breakpoints = [0.0, 3.0, 0.0, 2.0];
    let mut values = [0.0; 9];
    values[4] = 1.0;
    let mut h = ptr::null_mut();
    let status =
        unsafe { hw_grid_function_new(2, counts.as_ptr(), breakpoints.as_ptr(), values.as_ptr(), 9, &mut h) };
    assert_eq!(status, HwStatus::Ok);
    assert!(!unsafe { hw_function_is_pl(h) });
    let expected = [1.0, -5.0, 6.0];
    for (k, want) in expected.iter().enumerate() {
        let r = integral(h, k, HwBound::Lower, 1, 0);
        assert!((r.value - want).abs() < 1e-12, "k = {k}: {}", r.value);
        assert_eq!(r.std_error, 0.0);
    }
    unsafe { hw_function_free(h) };
}

#[test]
fn sampled_integral_is_reproducible() {
    let h = load("pyramid.json");
    let a = integral(h, 1, HwBound::Lower, 2000, 9);
    let b = integral(h, 1, HwBound::Lower, 2000, 9);
    assert_eq!(a, b);
    assert!((a.value - 2.0).abs() < 4.0 * a.std_error + 0.05, "{a:?}");
    unsafe { hw_function_free(h) };
}

#[test]
fn errors_set_status_and_message() {
    let mut h = ptr::null_mut();
    let bad = CString::new("{\"kind\": \"grid-region\",").unwrap();
    assert_eq!(unsafe { hw_function_from_json(bad.as_ptr(), &mut h) }, HwStatus::Parse);
    assert!(h.is_null());
    assert!(last_error().contains("line"));

    assert_eq!(unsafe { hw_function_from_json(ptr::null(), &mut h) }, HwStatus::NullArgument);

    let h = load("box_3x2.json");
    let mut out = HwIntegral::default();
    assert_eq!(unsafe { hw_hadwiger_integral(h, 3, HwBound::Lower, 1, 0, &mut out) }, HwStatus::Validation);
    assert!(!last_error().is_empty());
    assert_eq!(integral(h, 1, HwBound::Lower, 1, 0).value, 5.0);
    assert!(last_error().is_empty());
    assert_eq!(unsafe { hw_hadwiger_integral(ptr::null(), 0, HwBound::Lower, 1, 0, &mut out) }, HwStatus::NullArgument);
    unsafe {
        hw_function_free(h);
        hw_function_free(ptr::null_mut());
    }
}

#[test]
fn image_and_version() {
    let mut h = ptr::null_mut();
    let status = unsafe { hw_function_from_pgm(fixture("small.pgm").as_ptr(), HwSkeleton::Max, &mut h) };
    assert_eq!(status, HwStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { hw_function_dim(h) }, 2);
    unsafe { hw_function_free(h) };
    let v = unsafe { CStr::from_ptr(hw_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/hadwiger.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("check.c");
    std::fs::write(
        &src,
        format!(
            "#include <stdio.h>\n#include \"{}\"\nint main(void) {{ HwIntegral r = {{0}}; HwFunction *h = NULL; \
             (void)r; (void)h; return HW_STATUS_OK; }}\n",
            header.display()
        ),
    )
    .unwrap();
    let Ok(out) = std::process::Command::new("cc").args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"]).arg(&src).output()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
