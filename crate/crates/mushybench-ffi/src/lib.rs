//! C ABI for the mushy-zone benchmark core: opaque handles, integer status
//! codes, and a thread-local last-error message in the dlerror style. Every
//! entry point catches panics instead of unwinding across the boundary.
//!
//! Lifecycle: parse a material (`mb_material_*`), solve the linearization
//! (`mb_linearize`), assemble the exact solution (`mb_exact_new`), then
//! evaluate fields and front kinematics. Each handle is released with its
//! matching `*_free`; freeing NULL is a no-op.

use std::cell::RefCell;
use std::ffi::{CStr, CString, c_char};
use std::panic::{self, AssertUnwindSafe};
use std::ptr;

use mushybench::linearization::{LinearizationResult, SearchParams, solve_mushy_diffusivity};
use mushybench::material::MaterialProperties;
use mushybench::similarity::{ExactSolution, SimilarityError};

/// Status code returned by every fallible call. On anything but
/// `MB_STATUS_OK`, `mb_last_error()` carries the message.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input was understood but rejected (bad JSON, bad property values,
    /// out-of-domain sample point).
    InvalidInput = 3,
    /// A root search or assembly step failed to converge.
    SolverFailure = 4,
    /// An internal panic was caught at the boundary; state may be stale but
    /// the process is intact.
    Panic = 5,
}

/// Opaque alloy property set.
pub struct MbMaterial(MaterialProperties);

/// Opaque linearization result (the three constant phase diffusivities and
/// the closed-form fraction model).
pub struct MbLinearization(LinearizationResult);

/// Opaque exact two-front similarity solution.
pub struct MbExact(ExactSolution);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn set_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let text = CString::new(bytes).expect("interior NULs stripped");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn fail(status: MbStatus, message: impl Into<String>) -> MbStatus {
    set_error(message);
    status
}

/// Runs a body with panic containment and a cleared error slot.
fn guarded(body: impl FnOnce() -> MbStatus) -> MbStatus {
    clear_error();
    match panic::catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let detail = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic payload".to_string());
            fail(MbStatus::Panic, format!("internal panic: {detail}"))
        }
    }
}

/// Message for the most recent failed call on this thread, or NULL if the
/// most recent call succeeded. The pointer stays valid until the next
/// library call on the same thread; copy it if you need to keep it.
#[unsafe(no_mangle)]
pub extern "C" fn mb_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |text| text.as_ptr())
    })
}

/// Library version as a static NUL-terminated string.
#[unsafe(no_mangle)]
pub extern "C" fn mb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn read_utf8<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, MbStatus> {
    unsafe { CStr::from_ptr(ptr) }
        .to_str()
        .map_err(|e| fail(MbStatus::InvalidUtf8, format!("{what} is not UTF-8: {e}")))
}

/// Parses a material property set from a JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid location; the
/// returned handle must be released with `mb_material_free`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_material_from_json(
    json: *const c_char,
    out: *mut *mut MbMaterial,
) -> MbStatus {
    guarded(|| {
        if json.is_null() || out.is_null() {
            return fail(MbStatus::NullArgument, "json and out must be non-NULL");
        }
        let text = match unsafe { read_utf8(json, "json") } {
            Ok(text) => text,
            Err(status) => return status,
        };
        match MaterialProperties::from_json_str(text) {
            Ok(props) => {
                unsafe { *out = Box::into_raw(Box::new(MbMaterial(props))) };
                MbStatus::Ok
            }
            Err(e) => fail(MbStatus::InvalidInput, e.to_string()),
        }
    })
}

/// Reads and parses a material property file (UTF-8 JSON).
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid location; the
/// returned handle must be released with `mb_material_free`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_material_from_json_file(
    path: *const c_char,
    out: *mut *mut MbMaterial,
) -> MbStatus {
    guarded(|| {
        if path.is_null() || out.is_null() {
            return fail(MbStatus::NullArgument, "path and out must be non-NULL");
        }
        let path = match unsafe { read_utf8(path, "path") } {
            Ok(path) => path,
            Err(status) => return status,
        };
        match MaterialProperties::from_json_file(std::path::Path::new(path)) {
            Ok(props) => {
                unsafe { *out = Box::into_raw(Box::new(MbMaterial(props))) };
                MbStatus::Ok
            }
            Err(e) => fail(MbStatus::InvalidInput, format!("{path}: {e}")),
        }
    })
}

/// Releases a material handle; NULL is ignored.
///
/// # Safety
/// `material` must be a handle from this library that has not been freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_material_free(material: *mut MbMaterial) {
    if !material.is_null() {
        drop(unsafe { Box::from_raw(material) });
    }
}

/// Solves for the constant mushy diffusivity with the standard search window.
///
/// # Safety
/// `material` must be a live handle and `out` a valid location; the returned
/// handle must be released with `mb_linearization_free`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_linearize(
    material: *const MbMaterial,
    out: *mut *mut MbLinearization,
) -> MbStatus {
    guarded(|| {
        if material.is_null() || out.is_null() {
            return fail(MbStatus::NullArgument, "material and out must be non-NULL");
        }
        let props = unsafe { &(*material).0 };
        match solve_mushy_diffusivity(props, &SearchParams::default()) {
            Ok(lin) => {
                unsafe { *out = Box::into_raw(Box::new(MbLinearization(lin))) };
                MbStatus::Ok
            }
            Err(e) => fail(MbStatus::SolverFailure, e.to_string()),
        }
    })
}

/// Releases a linearization handle; NULL is ignored.
///
/// # Safety
/// `lin` must be a handle from this library that has not been freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_linearization_free(lin: *mut MbLinearization) {
    if !lin.is_null() {
        drop(unsafe { Box::from_raw(lin) });
    }
}

/// Writes the solid, mushy, and liquid diffusivities in m²/s.
///
/// # Safety
/// `lin` must be a live handle; the three output pointers must be valid.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_linearization_diffusivities(
    lin: *const MbLinearization,
    alpha_s: *mut f64,
    alpha_sl: *mut f64,
    alpha_l: *mut f64,
) -> MbStatus {
    guarded(|| {
        if lin.is_null() || alpha_s.is_null() || alpha_sl.is_null() || alpha_l.is_null() {
            return fail(MbStatus::NullArgument, "all arguments must be non-NULL");
        }
        let result = unsafe { &(*lin).0 };
        unsafe {
            *alpha_s = result.alpha_s;
            *alpha_sl = result.alpha_sl;
            *alpha_l = result.alpha_l;
        }
        MbStatus::Ok
    })
}

/// Writes |λ(T_s) − λ0| at the converged mushy diffusivity.
///
/// # Safety
/// `lin` must be a live handle and `residual` a valid location.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_linearization_residual(
    lin: *const MbLinearization,
    residual: *mut f64,
) -> MbStatus {
    guarded(|| {
        if lin.is_null() || residual.is_null() {
            return fail(MbStatus::NullArgument, "lin and residual must be non-NULL");
        }
        unsafe { *residual = (*lin).0.residual };
        MbStatus::Ok
    })
}

fn assembly_status(e: &SimilarityError) -> MbStatus {
    match e {
        SimilarityError::Material(_) | SimilarityError::BoundaryOrdering { .. } => {
            MbStatus::InvalidInput
        }
        _ => MbStatus::SolverFailure,
    }
}

/// Assembles the exact two-front solution for a chilled boundary at `t_out`
/// °C and an initial melt at `t_init` °C (requires
/// t_out < solidus < liquidus < t_init).
///
/// # Safety
/// `material` and `lin` must be live handles and `out` a valid location; the
/// returned handle must be released with `mb_exact_free`.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_new(
    material: *const MbMaterial,
    lin: *const MbLinearization,
    t_out: f64,
    t_init: f64,
    out: *mut *mut MbExact,
) -> MbStatus {
    guarded(|| {
        if material.is_null() || lin.is_null() || out.is_null() {
            return fail(
                MbStatus::NullArgument,
                "material, lin, and out must be non-NULL",
            );
        }
        let props = unsafe { &(*material).0 };
        let lin = unsafe { &(*lin).0 };
        match ExactSolution::assemble(props, lin.clone(), t_out, t_init) {
            Ok(sol) => {
                unsafe { *out = Box::into_raw(Box::new(MbExact(sol))) };
                MbStatus::Ok
            }
            Err(e) => fail(assembly_status(&e), e.to_string()),
        }
    })
}

/// Releases an exact-solution handle; NULL is ignored.
///
/// # Safety
/// `exact` must be a handle from this library that has not been freed.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_free(exact: *mut MbExact) {
    if !exact.is_null() {
        drop(unsafe { Box::from_raw(exact) });
    }
}

/// Writes the front coefficients k_s, k_l in m/s^½ (X = k·√t).
///
/// # Safety
/// `exact` must be a live handle; `k_s` and `k_l` must be valid locations.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_front_coefficients(
    exact: *const MbExact,
    k_s: *mut f64,
    k_l: *mut f64,
) -> MbStatus {
    guarded(|| {
        if exact.is_null() || k_s.is_null() || k_l.is_null() {
            return fail(MbStatus::NullArgument, "all arguments must be non-NULL");
        }
        let roots = unsafe { &(*exact).0 }.roots;
        unsafe {
            *k_s = roots.k_s;
            *k_l = roots.k_l;
        }
        MbStatus::Ok
    })
}

/// Writes the front positions X_s(t), X_l(t) in m at `t` seconds (t ≥ 0).
///
/// # Safety
/// `exact` must be a live handle; `x_s` and `x_l` must be valid locations.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_front_positions(
    exact: *const MbExact,
    t: f64,
    x_s: *mut f64,
    x_l: *mut f64,
) -> MbStatus {
    guarded(|| {
        if exact.is_null() || x_s.is_null() || x_l.is_null() {
            return fail(MbStatus::NullArgument, "all arguments must be non-NULL");
        }
        match unsafe { &(*exact).0 }.roots.front_position(t) {
            Ok((s, l)) => {
                unsafe {
                    *x_s = s;
                    *x_l = l;
                }
                MbStatus::Ok
            }
            Err(e) => fail(MbStatus::InvalidInput, e.to_string()),
        }
    })
}

unsafe fn eval_field(
    exact: *const MbExact,
    out: *mut f64,
    eval: impl FnOnce(&ExactSolution) -> Result<f64, SimilarityError>,
) -> MbStatus {
    if exact.is_null() || out.is_null() {
        return fail(MbStatus::NullArgument, "exact and out must be non-NULL");
    }
    match eval(unsafe { &(*exact).0 }) {
        Ok(value) => {
            unsafe { *out = value };
            MbStatus::Ok
        }
        Err(e) => fail(MbStatus::InvalidInput, e.to_string()),
    }
}

/// Writes the temperature in °C at (`x` m, `t` s) with x ≥ 0, t > 0.
///
/// # Safety
/// `exact` must be a live handle and `out` a valid location.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_temperature(
    exact: *const MbExact,
    x: f64,
    t: f64,
    out: *mut f64,
) -> MbStatus {
    guarded(|| unsafe { eval_field(exact, out, |sol| sol.temperature_at(x, t)) })
}

/// Writes the volumetric enthalpy in J/m³ at (`x` m, `t` s).
///
/// # Safety
/// `exact` must be a live handle and `out` a valid location.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_enthalpy(
    exact: *const MbExact,
    x: f64,
    t: f64,
    out: *mut f64,
) -> MbStatus {
    guarded(|| unsafe { eval_field(exact, out, |sol| sol.enthalpy_at(x, t)) })
}

/// Writes ∂T/∂x in K/m at (`x` m, `t` s). The gradient jumps across the two
/// fronts; sampling exactly on a front is rejected, nudge the point to one
/// side instead.
///
/// # Safety
/// `exact` must be a live handle and `out` a valid location.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_temperature_gradient(
    exact: *const MbExact,
    x: f64,
    t: f64,
    out: *mut f64,
) -> MbStatus {
    guarded(|| unsafe { eval_field(exact, out, |sol| sol.temperature_gradient_at(x, t, None)) })
}

/// Writes ∂T/∂t in K/s at (`x` m, `t` s); same front rule as the gradient.
///
/// # Safety
/// `exact` must be a live handle and `out` a valid location.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_cooling_rate(
    exact: *const MbExact,
    x: f64,
    t: f64,
    out: *mut f64,
) -> MbStatus {
    guarded(|| unsafe { eval_field(exact, out, |sol| sol.cooling_rate_at(x, t, None)) })
}

/// Writes G_l(t), the liquid-side temperature gradient at the liquidus front,
/// in K/m.
///
/// # Safety
/// `exact` must be a live handle and `out` a valid location.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_liquidus_gradient(
    exact: *const MbExact,
    t: f64,
    out: *mut f64,
) -> MbStatus {
    guarded(|| unsafe { eval_field(exact, out, |sol| sol.liquidus_gradient(t)) })
}

/// Writes Ṫ_l(t), the cooling rate at the liquidus front, in K/s.
///
/// # Safety
/// `exact` must be a live handle and `out` a valid location.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_liquidus_cooling_rate(
    exact: *const MbExact,
    t: f64,
    out: *mut f64,
) -> MbStatus {
    guarded(|| unsafe { eval_field(exact, out, |sol| sol.liquidus_cooling_rate(t)) })
}

/// Writes the local solidification time (1/k_s² − 1/k_l²)·x² in s: how long
/// the point at `x` m stays inside the mushy zone.
///
/// # Safety
/// `exact` must be a live handle and `out` a valid location.
#[unsafe(no_mangle)]
pub unsafe extern "C" fn mb_exact_local_solidification_time(
    exact: *const MbExact,
    x: f64,
    out: *mut f64,
) -> MbStatus {
    guarded(|| {
        if exact.is_null() || out.is_null() {
            return fail(MbStatus::NullArgument, "exact and out must be non-NULL");
        }
        if !x.is_finite() || x < 0.0 {
            return fail(
                MbStatus::InvalidInput,
                format!("position x = {x} must be finite and non-negative"),
            );
        }
        unsafe { *out = (*exact).0.roots.local_solidification_time(x) };
        MbStatus::Ok
    })
}
