//! C ABI over `isosym`.
//!
//! Objects are opaque handles created by `isosym_*_new` style constructors and
//! released by the matching `*_free`. Every fallible call returns an
//! [`IsosymStatus`]; on failure the message is kept per thread and read with
//! [`isosym_last_error_message`]. Strings returned to C are owned by the caller
//! and released with [`isosym_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use isosym::cli::{run_suite, MeasureKind, Suite, SuiteConfig};
use isosym::grid::Grid;
use isosym::measures::{
    exact_profile, make_cauchy, make_estimator, make_gaussian, make_subexp, ConvexEstimator, EstimatorFamily,
    ProductMeasure,
};
use isosym::operators::{beta1, peso_constant, recover_estimator};
use isosym::rearrange::QuantileProfile;
use isosym::rispace::{quasinorm, RISpace};
use isosym::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsosymStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    NullArgument = 1,
    /// A parameter outside its admissible range.
    InvalidParameter = 2,
    /// An argument outside the domain of the operation.
    Domain = 3,
    /// Integrability, convergence or oscillation failures.
    Numerical = 4,
    /// Parse, I/O or serialization failures.
    Io = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Parametric estimator families.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsosymEstimatorKind {
    /// `param` is α.
    CauchyAlpha = 0,
    /// `param` is p.
    SubExpP = 1,
    /// `param` is N < 0.
    NegDimN = 2,
    /// `param` is ignored.
    GaussianConcave = 3,
}

/// Product of a one-dimensional model measure.
pub struct IsosymMeasure(ProductMeasure);

/// Convex isoperimetric estimator.
pub struct IsosymEstimator(ConvexEstimator);

/// Graded quadrature grid on (0,1).
pub struct IsosymGrid(Grid);

/// Rearrangement-invariant quasi-normed space.
pub struct IsosymSpace(RISpace);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> IsosymStatus {
    match e {
        Error::ParameterDomain(_) | Error::Usage(_) | Error::Kind(_) => IsosymStatus::InvalidParameter,
        Error::Domain(_) | Error::EmptyInput(_) => IsosymStatus::Domain,
        Error::Integrability(_) | Error::Convergence(_) | Error::Oscillation(_) => IsosymStatus::Numerical,
        _ => IsosymStatus::Io,
    }
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IsosymStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            IsosymStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null or invalid argument: {what}"));
            IsosymStatus::NullArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal error: {msg}"));
            IsosymStatus::Internal
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn text<'a>(s: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Failure::Null(what))
}

unsafe fn put_boxed<T>(out: *mut *mut T, v: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(Box::into_raw(Box::new(v)));
    Ok(())
}

unsafe fn drop_boxed<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Library version as a static NUL-terminated string (do not free).
#[no_mangle]
pub extern "C" fn isosym_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null when the last call
/// succeeded. Release with `isosym_string_free`.
#[no_mangle]
pub extern "C" fn isosym_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a pointer returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn isosym_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Cauchy-type measure `(α/2)(1+|s|)^{-(1+α)}` on `R^dim`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isosym_measure_cauchy(alpha: f64, dim: usize, out: *mut *mut IsosymMeasure) -> IsosymStatus {
    guard(|| put_boxed(out, IsosymMeasure(ProductMeasure::new(make_cauchy(alpha)?, dim)?), "out"))
}

/// Sub-exponential measure with exponent `p` on `R^dim`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isosym_measure_subexp(p: f64, dim: usize, out: *mut *mut IsosymMeasure) -> IsosymStatus {
    guard(|| put_boxed(out, IsosymMeasure(ProductMeasure::new(make_subexp(p)?, dim)?), "out"))
}

/// Standard Gaussian measure on `R^dim`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isosym_measure_gaussian(dim: usize, out: *mut *mut IsosymMeasure) -> IsosymStatus {
    guard(|| put_boxed(out, IsosymMeasure(ProductMeasure::new(make_gaussian(), dim)?), "out"))
}

/// # Safety
/// `m` must be null or a live measure handle.
#[no_mangle]
pub unsafe extern "C" fn isosym_measure_free(m: *mut IsosymMeasure) {
    drop_boxed(m)
}

/// One-dimensional density at `s`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isosym_measure_density(m: *const IsosymMeasure, s: f64, out: *mut f64) -> IsosymStatus {
    guard(|| put(out, get(m, "measure")?.0.base().density(s), "out"))
}

/// One-dimensional quantile `H⁻¹(t)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isosym_measure_quantile(m: *const IsosymMeasure, t: f64, out: *mut f64) -> IsosymStatus {
    guard(|| put(out, get(m, "measure")?.0.base().quantile(t)?, "out"))
}

/// Exact isoperimetric profile `I_μ(t)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isosym_exact_profile(m: *const IsosymMeasure, t: f64, out: *mut f64) -> IsosymStatus {
    guard(|| put(out, exact_profile(get(m, "measure")?.0.base(), t)?, "out"))
}

/// Parametric estimator `c·I(t)` on `R^dim`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isosym_estimator_new(
    kind: IsosymEstimatorKind,
    param: f64,
    dim: usize,
    c: f64,
    out: *mut *mut IsosymEstimator,
) -> IsosymStatus {
    guard(|| {
        let family = match kind {
            IsosymEstimatorKind::CauchyAlpha => EstimatorFamily::CauchyAlpha { alpha: param },
            IsosymEstimatorKind::SubExpP => EstimatorFamily::SubExpP { p: param },
            IsosymEstimatorKind::NegDimN => EstimatorFamily::NegDimN { n: param },
            IsosymEstimatorKind::GaussianConcave => EstimatorFamily::GaussianConcave,
        };
        put_boxed(out, IsosymEstimator(make_estimator(family, dim, c)?), "out")
    })
}

/// The exact one-dimensional profile of `m` used as an estimator.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isosym_estimator_exact(
    m: *const IsosymMeasure,
    out: *mut *mut IsosymEstimator,
) -> IsosymStatus {
    guard(|| {
        let base = *get(m, "measure")?.0.base();
        put_boxed(out, IsosymEstimator(ConvexEstimator::exact(base)), "out")
    })
}

/// # Safety
/// `e` must be null or a live estimator handle.
#[no_mangle]
pub unsafe extern "C" fn isosym_estimator_free(e: *mut IsosymEstimator) {
    drop_boxed(e)
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isosym_estimator_eval(e: *const IsosymEstimator, t: f64, out: *mut f64) -> IsosymStatus {
    guard(|| put(out, get(e, "estimator")?.0.eval(t), "out"))
}

/// Graded grid with `n` points (a power of two, at least 64).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isosym_grid_new(n: usize, out: *mut *mut IsosymGrid) -> IsosymStatus {
    guard(|| {
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::ParameterDomain(format!("grid size must be a power of two >= 64, got {n}")).into());
        }
        put_boxed(out, IsosymGrid(Grid::graded(n)), "out")
    })
}

/// # Safety
/// `g` must be null or a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn isosym_grid_free(g: *mut IsosymGrid) {
    drop_boxed(g)
}

/// Space from a descriptor such as `lp:2`, `lorentz:2,1` or `lz:1,1,0.5`.
///
/// # Safety
/// `descriptor` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn isosym_space_parse(descriptor: *const c_char, out: *mut *mut IsosymSpace) -> IsosymStatus {
    guard(|| {
        let space: RISpace = text(descriptor, "descriptor")?.parse()?;
        put_boxed(out, IsosymSpace(space), "out")
    })
}

/// # Safety
/// `s` must be null or a live space handle.
#[no_mangle]
pub unsafe extern "C" fn isosym_space_free(s: *mut IsosymSpace) {
    drop_boxed(s)
}

/// Quasi-norm of the indicator of a set of measure `u`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isosym_space_norm_indicator(
    s: *const IsosymSpace,
    u: f64,
    g: *const IsosymGrid,
    out: *mut f64,
) -> IsosymStatus {
    guard(|| {
        let v = quasinorm(&get(s, "space")?.0, &QuantileProfile::indicator(u)?, &get(g, "grid")?.0)?;
        put(out, v, "out")
    })
}

/// Bobkov modulus `β₁(s)`, `s ∈ (0,1/2)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isosym_beta1(
    e: *const IsosymEstimator,
    s: f64,
    g: *const IsosymGrid,
    out: *mut f64,
) -> IsosymStatus {
    guard(|| put(out, beta1(&get(e, "estimator")?.0, s, &get(g, "grid")?.0)?, "out"))
}

/// Estimator recovered from `β₁` at `t ∈ (0,1/2]`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isosym_recover_estimator(
    e: *const IsosymEstimator,
    t: f64,
    g: *const IsosymGrid,
    out: *mut f64,
) -> IsosymStatus {
    guard(|| put(out, recover_estimator(&get(e, "estimator")?.0, t, &get(g, "grid")?.0)?, "out"))
}

/// Smallest constant of the peso condition (may be `+inf`).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn isosym_peso_constant(
    e: *const IsosymEstimator,
    g: *const IsosymGrid,
    out: *mut f64,
) -> IsosymStatus {
    guard(|| put(out, peso_constant(&get(e, "estimator")?.0, &get(g, "grid")?.0), "out"))
}

/// Runs a verification suite with default settings for everything but the
/// arguments, and returns its certificates as a JSON array in `*json_out`
/// (release with `isosym_string_free`). `worst_status_out`, when non-null,
/// receives the process-style exit code of the run (0, 1 or 2).
///
/// # Safety
/// `suite` and `measure` must be NUL-terminated strings; `json_out` valid.
#[no_mangle]
pub unsafe extern "C" fn isosym_run_suite(
    suite: *const c_char,
    measure: *const c_char,
    param: f64,
    grid: usize,
    seed: u64,
    json_out: *mut *mut c_char,
    worst_status_out: *mut i32,
) -> IsosymStatus {
    guard(|| {
        let suite: Suite = text(suite, "suite")?.parse()?;
        let kind: MeasureKind = text(measure, "measure")?.parse()?;
        let mut cfg = SuiteConfig::new(suite);
        cfg.measure = kind;
        match kind {
            MeasureKind::Cauchy => cfg.alpha = param,
            MeasureKind::Subexp => cfg.p = Some(param),
            MeasureKind::Gaussian => {}
        }
        cfg.grid = grid;
        cfg.seed = seed;
        let out = run_suite(&cfg)?;
        let json = serde_json::to_string(&out.certificates).map_err(Error::from)?;
        if !worst_status_out.is_null() {
            worst_status_out.write(isosym::cli::exit_code(isosym::verify::worst_status(&out.certificates)));
        }
        put(json_out, CString::new(json).map_err(|_| Failure::Null("json"))?.into_raw(), "json_out")
    })
}
