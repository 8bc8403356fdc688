//! C ABI for the hadwiger library.
//!
//! Functions are exposed through the opaque `HwFunction` handle. Every call
//! returns an `HwStatus`; on failure `hw_last_error` holds a message for the
//! calling thread. Handles are freed with `hw_function_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::{Mutex, OnceLock};

use hadwiger::complex::GridComplex;
use hadwiger::function::{ConstructibleFunction, PLFunction};
use hadwiger::integrals::{
    hadwiger_constructible, hadwiger_pl, step_integral_constructible, step_integral_pl, Bound, IntegralResult,
    MonteCarlo,
};
use hadwiger::io::{load_image, Document, Skeleton};
use hadwiger::volumes::{CroftonConstants, CALIBRATION_SEED, DEFAULT_CALIBRATION_SAMPLES, MAX_MC_K};
use hadwiger::{Error, ErrorKind};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HwStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Numerical = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HwBound {
    Lower = 0,
    Upper = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HwSkeleton {
    Max = 0,
    Min = 1,
}

/// An integral value. `std_error` is 0 and `samples` is 1 on exact paths.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HwIntegral {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Opaque handle: a grid (constructible) or piecewise-linear function.
pub struct HwFunction(Inner);

enum Inner {
    Grid(ConstructibleFunction),
    Pl(PLFunction),
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

/// Crofton constants shared by every sampled call in the process.
fn constants() -> &'static Mutex<CroftonConstants> {
    static TABLE: OnceLock<Mutex<CroftonConstants>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(CroftonConstants::new()))
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: HwStatus, message: &str) -> HwStatus {
    set_error(message);
    status
}

fn from_error(e: Error) -> HwStatus {
    let status = match e.kind() {
        ErrorKind::Parse => HwStatus::Parse,
        ErrorKind::Validation => HwStatus::Validation,
        ErrorKind::Numerical => HwStatus::Numerical,
    };
    fail(status, &e.to_string())
}

/// Runs `f`, turning errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), HwStatus>) -> HwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            HwStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(HwStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char, name: &str) -> Result<&'a str, HwStatus> {
    if ptr.is_null() {
        return Err(fail(HwStatus::NullArgument, &format!("{name} is null")));
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| fail(HwStatus::InvalidUtf8, &format!("{name} is not UTF-8")))
}

unsafe fn handle_arg<'a>(h: *const HwFunction) -> Result<&'a Inner, HwStatus> {
    h.as_ref().map(|h| &h.0).ok_or_else(|| fail(HwStatus::NullArgument, "function handle is null"))
}

unsafe fn publish(out: *mut *mut HwFunction, inner: Inner) -> Result<(), HwStatus> {
    if out.is_null() {
        return Err(fail(HwStatus::NullArgument, "out is null"));
    }
    *out = Box::into_raw(Box::new(HwFunction(inner)));
    Ok(())
}

fn from_document(doc: Document) -> Result<Inner, HwStatus> {
    Ok(match doc {
        Document::GridFunction(h) => Inner::Grid(h),
        Document::GridRegion(r) => Inner::Grid(ConstructibleFunction::indicator(&r)),
        Document::SimplicialFunction(h) => Inner::Pl(h),
        Document::SimplicialSet(s) => {
            let ones = vec![1.0; s.vertices().len()];
            Inner::Pl(PLFunction::new(s, ones).map_err(from_error)?)
        }
    })
}

/// Message describing the last failure on this thread; empty after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a JSON document (grid-function, grid-region, simplicial-set or
/// simplicial-function). Regions and sets become their indicator functions.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hw_function_from_json(json: *const c_char, out: *mut *mut HwFunction) -> HwStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let inner = from_document(Document::parse(text).map_err(from_error)?)?;
        publish(out, inner)
    })
}

/// Like `hw_function_from_json`, reading the document from a file.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hw_function_from_file(path: *const c_char, out: *mut *mut HwFunction) -> HwStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let inner = from_document(Document::load(Path::new(path)).map_err(from_error)?)?;
        publish(out, inner)
    })
}

/// Reads a PGM image as a grid function on unit pixels.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hw_function_from_pgm(
    path: *const c_char,
    skeleton: HwSkeleton,
    out: *mut *mut HwFunction,
) -> HwStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let skeleton = match skeleton {
            HwSkeleton::Max => Skeleton::Max,
            HwSkeleton::Min => Skeleton::Min,
        };
        let h = load_image(Path::new(path), skeleton).map_err(from_error)?;
        publish(out, Inner::Grid(h))
    })
}

/// Builds a grid function of dimension `dim`. Axis `a` has `counts[a]`
/// breakpoints, stored consecutively in `breakpoints`. `values` holds one
/// value per open cell, `value_count` in total, in linear cell order (axis 0
/// fastest, parity index: even = breakpoint, odd = open interval).
///
/// # Safety
/// `counts` must hold `dim` entries, `breakpoints` their sum, and `values`
/// `value_count` entries; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hw_grid_function_new(
    dim: usize,
    counts: *const usize,
    breakpoints: *const f64,
    values: *const f64,
    value_count: usize,
    out: *mut *mut HwFunction,
) -> HwStatus {
    guard(|| {
        if counts.is_null() || breakpoints.is_null() || values.is_null() {
            return Err(fail(HwStatus::NullArgument, "counts, breakpoints and values must be non-null"));
        }
        let counts = std::slice::from_raw_parts(counts, dim);
        let flat = std::slice::from_raw_parts(breakpoints, counts.iter().sum());
        let mut axes = Vec::with_capacity(dim);
        let mut start = 0;
        for &c in counts {
            axes.push(flat[start..start + c].to_vec());
            start += c;
        }
        let complex = GridComplex::new(axes).map_err(from_error)?;
        let values = std::slice::from_raw_parts(values, value_count).to_vec();
        let h = ConstructibleFunction::new(complex, values).map_err(from_error)?;
        publish(out, Inner::Grid(h))
    })
}

/// Frees a handle. Null is ignored.
///
/// # Safety
/// `h` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hw_function_free(h: *mut HwFunction) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Ambient dimension, or 0 for a null handle.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hw_function_dim(h: *const HwFunction) -> usize {
    match h.as_ref().map(|h| &h.0) {
        Some(Inner::Grid(f)) => f.dim(),
        Some(Inner::Pl(f)) => f.ambient_dim(),
        None => 0,
    }
}

/// True when the handle holds a piecewise-linear function.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hw_function_is_pl(h: *const HwFunction) -> bool {
    matches!(h.as_ref().map(|h| &h.0), Some(Inner::Pl(_)))
}

/// Replaces the process-wide Crofton constants with a calibration table in
/// the CLI's JSON format. Constants missing from the table are calibrated on
/// first use.
///
/// # Safety
/// `json` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn hw_load_calibration(json: *const c_char) -> HwStatus {
    guard(|| {
        let table = CroftonConstants::from_json(str_arg(json, "json")?).map_err(from_error)?;
        *constants().lock().unwrap_or_else(|p| p.into_inner()) = table;
        Ok(())
    })
}

fn bound(b: HwBound) -> Bound {
    match b {
        HwBound::Lower => Bound::Lower,
        HwBound::Upper => Bound::Upper,
    }
}

fn integral(
    h: &Inner,
    k: usize,
    samples: usize,
    seed: u64,
    exact: impl FnOnce(&ConstructibleFunction) -> hadwiger::Result<IntegralResult>,
    sampled: impl FnOnce(&PLFunction, &MonteCarlo) -> hadwiger::Result<IntegralResult>,
) -> Result<IntegralResult, HwStatus> {
    match h {
        Inner::Grid(f) => exact(f).map_err(from_error),
        Inner::Pl(f) => {
            let n = f.ambient_dim();
            let table = {
                let mut t = constants().lock().unwrap_or_else(|p| p.into_inner());
                if k > 0 && k < n && k <= MAX_MC_K {
                    t.ensure(n, k, DEFAULT_CALIBRATION_SAMPLES, CALIBRATION_SEED).map_err(from_error)?;
                }
                t.clone()
            };
            let mc = MonteCarlo { samples, seed, constants: &table };
            sampled(f, &mc).map_err(from_error)
        }
    }
}

unsafe fn write(out: *mut HwIntegral, r: IntegralResult) -> Result<(), HwStatus> {
    if out.is_null() {
        return Err(fail(HwStatus::NullArgument, "out is null"));
    }
    *out = HwIntegral { value: r.value, std_error: r.stderr, samples: r.samples, seed: r.seed };
    Ok(())
}

/// Lower or upper Hadwiger integral ∫h dμ_k. Grid functions and the k = 0
/// and k = n terms of PL functions are exact; other PL terms are sliced
/// Monte Carlo with `samples` flats drawn from `seed`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hw_hadwiger_integral(
    h: *const HwFunction,
    k: usize,
    b: HwBound,
    samples: usize,
    seed: u64,
    out: *mut HwIntegral,
) -> HwStatus {
    guard(|| {
        let h = handle_arg(h)?;
        let r = integral(
            h,
            k,
            samples,
            seed,
            |f| hadwiger_constructible(f, k, bound(b)),
            |f, mc| hadwiger_pl(f, k, bound(b), mc),
        )?;
        write(out, r)
    })
}

/// Step approximant (1/m)∫⌊mh⌋dμ_k (lower) or (1/m)∫⌈mh⌉dμ_k (upper).
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hw_step_integral(
    h: *const HwFunction,
    m: usize,
    k: usize,
    b: HwBound,
    samples: usize,
    seed: u64,
    out: *mut HwIntegral,
) -> HwStatus {
    guard(|| {
        let h = handle_arg(h)?;
        let r = integral(
            h,
            k,
            samples,
            seed,
            |f| step_integral_constructible(f, m, k, bound(b)),
            |f, mc| step_integral_pl(f, m, k, bound(b), mc),
        )?;
        write(out, r)
    })
}
