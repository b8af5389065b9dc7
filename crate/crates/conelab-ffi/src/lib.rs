//! C ABI for conelab.
//!
//! Algebras are opaque handles; every function returns a status code and
//! writes results through out-pointers. Vectors are dense `double` arrays of
//! the algebra's dimension. The last error message is kept per thread and can
//! be fetched with `conelab_last_error_message`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use nalgebra::DVector;

use conelab::error::Error;
use conelab::jalg::{catalog, io as algebra_io};
use conelab::order;
use conelab::orient::{self, SolveOptions, SolveOutcome};
use conelab::{geom, AlgebraSpec};

/// Opaque algebra handle.
pub struct ConelabAlgebra {
    spec: AlgebraSpec,
}

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConelabStatus {
    Ok = 0,
    InvalidArgument = 1,
    DimensionMismatch = 2,
    NotInterior = 3,
    DegenerateSpectrum = 4,
    Json = 5,
    NullPointer = 6,
    Internal = 7,
}

/// Cone membership verdict.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConelabPositivity {
    Interior = 0,
    Boundary = 1,
    Outside = 2,
}

/// Orientation search verdict.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConelabOrientationVerdict {
    Found = 0,
    NotFound = 1,
    Inconclusive = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(e: &Error) -> ConelabStatus {
    let msg = CString::new(e.to_string()).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
    match e {
        Error::DimensionMismatch { .. } => ConelabStatus::DimensionMismatch,
        Error::NotInterior { .. } | Error::PropernessViolated { .. } => ConelabStatus::NotInterior,
        Error::DegenerateSpectrum { .. } | Error::FunctionDomain { .. } => {
            ConelabStatus::DegenerateSpectrum
        }
        Error::Json(_) => ConelabStatus::Json,
        Error::UnknownCatalog { .. }
        | Error::InvalidParameter(_)
        | Error::AsymmetricStructure { .. }
        | Error::IdentityViolation { .. }
        | Error::TraceFormNotPositive { .. } => ConelabStatus::InvalidArgument,
        _ => ConelabStatus::Internal,
    }
}

fn set_error_msg(msg: &str) -> ConelabStatus {
    let msg = CString::new(msg).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
    ConelabStatus::NullPointer
}

/// Message describing the most recent error on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn conelab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len))
    }
}

/// Builds a catalog algebra: `sym_real`, `herm_complex`, `herm_quat`,
/// `spin_factor` (alias `spin`) or `abelian`, with the given size parameter.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conelab_algebra_catalog(
    name: *const c_char,
    param: usize,
    out: *mut *mut ConelabAlgebra,
) -> ConelabStatus {
    if name.is_null() || out.is_null() {
        return set_error_msg("null pointer argument");
    }
    let name = match CStr::from_ptr(name).to_str() {
        Ok(s) => s,
        Err(_) => return set_error_msg("catalog name is not valid UTF-8"),
    };
    match catalog::by_name(name, param) {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(ConelabAlgebra { spec }));
            ConelabStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Parses an algebra from its JSON description (same schema as the CLI
/// `--file` input).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn conelab_algebra_from_json(
    json: *const c_char,
    out: *mut *mut ConelabAlgebra,
) -> ConelabStatus {
    if json.is_null() || out.is_null() {
        return set_error_msg("null pointer argument");
    }
    let text = match CStr::from_ptr(json).to_str() {
        Ok(s) => s,
        Err(_) => return set_error_msg("JSON input is not valid UTF-8"),
    };
    match algebra_io::algebra_from_json(text) {
        Ok(spec) => {
            *out = Box::into_raw(Box::new(ConelabAlgebra { spec }));
            ConelabStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Releases an algebra handle. Passing NULL is a no-op.
///
/// # Safety
/// `alg` must come from a conelab constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn conelab_algebra_free(alg: *mut ConelabAlgebra) {
    if !alg.is_null() {
        drop(Box::from_raw(alg));
    }
}

/// Dimension of the algebra, or 0 for NULL.
///
/// # Safety
/// `alg` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn conelab_algebra_dim(alg: *const ConelabAlgebra) -> usize {
    alg.as_ref().map(|a| a.spec.dim()).unwrap_or(0)
}

/// Writes the identity element's coordinates into `out` (length = dim).
///
/// # Safety
/// `alg` must be a live handle; `out` must hold `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn conelab_identity(
    alg: *const ConelabAlgebra,
    out: *mut f64,
) -> ConelabStatus {
    let Some(a) = alg.as_ref() else { return set_error_msg("null algebra handle") };
    if out.is_null() {
        return set_error_msg("null output pointer");
    }
    let e = a.spec.identity();
    ptr::copy_nonoverlapping(e.as_ptr(), out, e.len());
    ConelabStatus::Ok
}

/// Jordan product `x ∘ y` into `out` (all arrays of length dim).
///
/// # Safety
/// All pointers must reference `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn conelab_product(
    alg: *const ConelabAlgebra,
    x: *const f64,
    y: *const f64,
    out: *mut f64,
) -> ConelabStatus {
    let Some(a) = alg.as_ref() else { return set_error_msg("null algebra handle") };
    let dim = a.spec.dim();
    let (Some(xs), Some(ys)) = (slice_arg(x, dim), slice_arg(y, dim)) else {
        return set_error_msg("null vector argument");
    };
    if out.is_null() {
        return set_error_msg("null output pointer");
    }
    match a.spec.product(&DVector::from_column_slice(xs), &DVector::from_column_slice(ys)) {
        Ok(p) => {
            ptr::copy_nonoverlapping(p.as_ptr(), out, dim);
            ConelabStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Spectral values of `x`, ascending. `out_values` must hold `dim` doubles;
/// the number actually written lands in `out_count`.
///
/// # Safety
/// Pointer contracts as in `conelab_product`.
#[no_mangle]
pub unsafe extern "C" fn conelab_spectral_values(
    alg: *const ConelabAlgebra,
    x: *const f64,
    out_values: *mut f64,
    out_count: *mut usize,
) -> ConelabStatus {
    let Some(a) = alg.as_ref() else { return set_error_msg("null algebra handle") };
    let dim = a.spec.dim();
    let Some(xs) = slice_arg(x, dim) else { return set_error_msg("null vector argument") };
    if out_values.is_null() || out_count.is_null() {
        return set_error_msg("null output pointer");
    }
    match a.spec.spectral_values(&DVector::from_column_slice(xs)) {
        Ok(values) => {
            let n = values.len().min(dim);
            ptr::copy_nonoverlapping(values.as_ptr(), out_values, n);
            *out_count = n;
            ConelabStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Order-unit norm `max |λ_i(x)|` at the identity base point.
///
/// # Safety
/// Pointer contracts as in `conelab_product`.
#[no_mangle]
pub unsafe extern "C" fn conelab_order_unit_norm(
    alg: *const ConelabAlgebra,
    x: *const f64,
    out: *mut f64,
) -> ConelabStatus {
    let Some(a) = alg.as_ref() else { return set_error_msg("null algebra handle") };
    let dim = a.spec.dim();
    let Some(xs) = slice_arg(x, dim) else { return set_error_msg("null vector argument") };
    if out.is_null() {
        return set_error_msg("null output pointer");
    }
    match a.spec.spectral_radius(&DVector::from_column_slice(xs)) {
        Ok(n) => {
            *out = n;
            ConelabStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Cone membership verdict for `x`.
///
/// # Safety
/// Pointer contracts as in `conelab_product`.
#[no_mangle]
pub unsafe extern "C" fn conelab_cone_member(
    alg: *const ConelabAlgebra,
    x: *const f64,
    out: *mut ConelabPositivity,
) -> ConelabStatus {
    let Some(a) = alg.as_ref() else { return set_error_msg("null algebra handle") };
    let dim = a.spec.dim();
    let Some(xs) = slice_arg(x, dim) else { return set_error_msg("null vector argument") };
    if out.is_null() {
        return set_error_msg("null output pointer");
    }
    match order::positivity(&a.spec, &DVector::from_column_slice(xs)) {
        Ok(order::Positivity::Interior) => {
            *out = ConelabPositivity::Interior;
            ConelabStatus::Ok
        }
        Ok(order::Positivity::Boundary) => {
            *out = ConelabPositivity::Boundary;
            ConelabStatus::Ok
        }
        Ok(order::Positivity::Outside) => {
            *out = ConelabPositivity::Outside;
            ConelabStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Point symmetry `s_p(x)` of the cone (p must be interior, x invertible).
///
/// # Safety
/// Pointer contracts as in `conelab_product`.
#[no_mangle]
pub unsafe extern "C" fn conelab_cone_symmetry(
    alg: *const ConelabAlgebra,
    p: *const f64,
    x: *const f64,
    out: *mut f64,
) -> ConelabStatus {
    let Some(a) = alg.as_ref() else { return set_error_msg("null algebra handle") };
    let dim = a.spec.dim();
    let (Some(ps), Some(xs)) = (slice_arg(p, dim), slice_arg(x, dim)) else {
        return set_error_msg("null vector argument");
    };
    if out.is_null() {
        return set_error_msg("null output pointer");
    }
    match geom::symmetry_at(&a.spec, &DVector::from_column_slice(ps), &DVector::from_column_slice(xs))
    {
        Ok(s) => {
            ptr::copy_nonoverlapping(s.as_ptr(), out, dim);
            ConelabStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Exponential chart `exp(L_v)(e)`; the result is always interior.
///
/// # Safety
/// Pointer contracts as in `conelab_product`.
#[no_mangle]
pub unsafe extern "C" fn conelab_cone_exp(
    alg: *const ConelabAlgebra,
    v: *const f64,
    out: *mut f64,
) -> ConelabStatus {
    let Some(a) = alg.as_ref() else { return set_error_msg("null algebra handle") };
    let dim = a.spec.dim();
    let Some(vs) = slice_arg(v, dim) else { return set_error_msg("null vector argument") };
    if out.is_null() {
        return set_error_msg("null output pointer");
    }
    match geom::exp_chart(&a.spec, &DVector::from_column_slice(vs)) {
        Ok(p) => {
            ptr::copy_nonoverlapping(p.as_ptr(), out, dim);
            ConelabStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Verifies the JB axioms on seeded samples; writes the max residual and the
/// overall verdict.
///
/// # Safety
/// `alg`, `out_max_residual` and `out_pass` must be valid.
#[no_mangle]
pub unsafe extern "C" fn conelab_verify_jb(
    alg: *const ConelabAlgebra,
    samples: usize,
    seed: u64,
    out_max_residual: *mut f64,
    out_pass: *mut bool,
) -> ConelabStatus {
    let Some(a) = alg.as_ref() else { return set_error_msg("null algebra handle") };
    if out_max_residual.is_null() || out_pass.is_null() {
        return set_error_msg("null output pointer");
    }
    match a.spec.verify_jb(samples, seed) {
        Ok(r) => {
            *out_max_residual = r
                .commutativity
                .max(r.jordan_identity)
                .max(r.norm_submultiplicative)
                .max(r.square_norm_identity)
                .max(r.square_sum_monotone)
                .max(r.power_associativity);
            *out_pass = r.pass;
            ConelabStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}

/// Runs the orientation search and reports the verdict with the residual
/// (Found residual on success, best floor otherwise).
///
/// # Safety
/// `alg`, `out_verdict` and `out_residual` must be valid.
#[no_mangle]
pub unsafe extern "C" fn conelab_solve_orientation(
    alg: *const ConelabAlgebra,
    seed: u64,
    restarts: usize,
    tol_success: f64,
    tol_fail: f64,
    out_verdict: *mut ConelabOrientationVerdict,
    out_residual: *mut f64,
) -> ConelabStatus {
    let Some(a) = alg.as_ref() else { return set_error_msg("null algebra handle") };
    if out_verdict.is_null() || out_residual.is_null() {
        return set_error_msg("null output pointer");
    }
    if tol_success >= tol_fail || tol_success.is_nan() || tol_fail.is_nan() {
        return set_error(&Error::InvalidParameter("tol_success must be below tol_fail".into()));
    }
    let opts = SolveOptions {
        seed,
        restarts: restarts.max(1),
        tol_success,
        tol_fail,
        ..SolveOptions::default()
    };
    match orient::solve_orientation(&a.spec, &opts) {
        Ok(outcome) => {
            *out_residual = outcome.best_residual();
            *out_verdict = match outcome {
                SolveOutcome::Found(_) => ConelabOrientationVerdict::Found,
                SolveOutcome::NotFound { .. } => ConelabOrientationVerdict::NotFound,
                SolveOutcome::Inconclusive { .. } => ConelabOrientationVerdict::Inconclusive,
            };
            ConelabStatus::Ok
        }
        Err(e) => set_error(&e),
    }
}
