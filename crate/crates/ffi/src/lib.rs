//! C ABI for `dispquad`.
//!
//! Every function returns a [`DqStatus`]. On failure the message is kept in a
//! thread-local slot readable through [`dq_last_error_message`]. Objects are
//! opaque handles created by `*_new` and released by the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dispquad::assembly::{
    assemble_preset, Boundary, BoundaryOptions, Discretization, Preset, Stencil,
};
use dispquad::cli::rule_by_name;
use dispquad::dispersion::{cutoff, solve_dispersion};
use dispquad::eigen::solve;
use dispquad::quadrature::QuadratureRule;
use dispquad::spline::MeshFamily;
use dispquad::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad names, parameters or meshes.
    InvalidInput = 3,
    /// A numerical failure such as a stop band or a non-definite matrix.
    Numerical = 4,
    /// The caller's buffer is shorter than the result.
    BufferTooSmall = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

/// Uniform-mesh stencil coefficients.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DqStencil {
    pub k0: f64,
    pub k1: f64,
    pub k2: f64,
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
}

impl From<Stencil> for DqStencil {
    fn from(s: Stencil) -> Self {
        let [k0, k1, k2, m0, m1, m2] = s.as_array();
        DqStencil {
            k0,
            k1,
            k2,
            m0,
            m1,
            m2,
        }
    }
}

impl From<DqStencil> for Stencil {
    fn from(s: DqStencil) -> Self {
        Stencil {
            k0: s.k0,
            k1: s.k1,
            k2: s.k2,
            m0: s.m0,
            m1: s.m1,
            m2: s.m2,
        }
    }
}

/// Opaque quadrature rule on [0, 1].
pub struct DqRule(QuadratureRule);

/// Opaque assembled 1D discretization.
pub struct DqSystem(Discretization);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Status(DqStatus, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DqStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => return DqStatus::Ok,
        Ok(Err(Fail::Status(s, m))) => (s, m),
        Ok(Err(Fail::Lib(e))) => {
            let s = if e.exit_code() == 2 {
                DqStatus::InvalidInput
            } else {
                DqStatus::Numerical
            };
            (s, e.to_string())
        }
        Err(_) => (DqStatus::Internal, "panic in dispquad".to_owned()),
    };
    set_error(msg);
    status
}

fn null(what: &str) -> Fail {
    Fail::Status(DqStatus::NullPointer, format!("{what} is null"))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail::Status(DqStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn copy_out(
    src: &[f64],
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> Result<(), Fail> {
    *out_ref(written, "written")? = src.len();
    if capacity < src.len() {
        return Err(Fail::Status(
            DqStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {} needed", src.len()),
        ));
    }
    if !src.is_empty() {
        if out.is_null() {
            return Err(null("out"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), out, src.len());
    }
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL terminated,
/// truncated to `len`). Returns the full message length without the NUL, or
/// 0 if no error was recorded.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn dq_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Looks up a rule by catalog or preset name (`g3`, `l4`, `nq2`, `g25-left`, `blend-g3-g2`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dq_rule_new(name: *const c_char, out: *mut *mut DqRule) -> DqStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        *slot = ptr::null_mut();
        let rule = rule_by_name(string(name, "name")?)?;
        *slot = Box::into_raw(Box::new(DqRule(rule)));
        Ok(())
    })
}

/// # Safety
/// `rule` must come from [`dq_rule_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dq_rule_free(rule: *mut DqRule) {
    if !rule.is_null() {
        drop(Box::from_raw(rule));
    }
}

/// Number of points in the rule, 0 for a null handle.
///
/// # Safety
/// `rule` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dq_rule_len(rule: *const DqRule) -> usize {
    rule.as_ref().map_or(0, |r| r.0.len())
}

/// Copies the nodes into `out`; `written` receives the node count.
///
/// # Safety
/// `rule` must be a live handle and `out` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn dq_rule_nodes(
    rule: *const DqRule,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> DqStatus {
    guard(|| {
        let r = rule.as_ref().ok_or_else(|| null("rule"))?;
        copy_out(r.0.nodes(), out, capacity, written)
    })
}

/// Copies the weights into `out`; `written` receives the weight count.
///
/// # Safety
/// Same as [`dq_rule_nodes`].
#[no_mangle]
pub unsafe extern "C" fn dq_rule_weights(
    rule: *const DqRule,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> DqStatus {
    guard(|| {
        let r = rule.as_ref().ok_or_else(|| null("rule"))?;
        copy_out(r.0.weights(), out, capacity, written)
    })
}

/// Stencil obtained when the rule is used for both stiffness and mass.
///
/// # Safety
/// `rule` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dq_rule_stencil(rule: *const DqRule, out: *mut DqStencil) -> DqStatus {
    guard(|| {
        let r = rule.as_ref().ok_or_else(|| null("rule"))?;
        *out_ref(out, "out")? = Stencil::from_rule(&r.0).into();
        Ok(())
    })
}

/// Stencil of a named preset.
///
/// # Safety
/// `preset` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dq_preset_stencil(preset: *const c_char, out: *mut DqStencil) -> DqStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        let p: Preset = string(preset, "preset")?.parse()?;
        *slot = p.stencil()?.into();
        Ok(())
    })
}

/// Upper edge of the propagating band, in units of the mesh frequency.
///
/// # Safety
/// `stencil` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dq_dispersion_cutoff(
    stencil: *const DqStencil,
    out: *mut f64,
) -> DqStatus {
    guard(|| {
        let st = *stencil.as_ref().ok_or_else(|| null("stencil"))?;
        *out_ref(out, "out")? = cutoff(&st.into());
        Ok(())
    })
}

/// Discrete wavenumber `mu_h` for the normalized frequency `lambda`.
///
/// # Safety
/// `stencil` and `mu_h` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dq_dispersion_solve(
    stencil: *const DqStencil,
    lambda: f64,
    mu_h: *mut f64,
) -> DqStatus {
    guard(|| {
        let st = *stencil.as_ref().ok_or_else(|| null("stencil"))?;
        let slot = out_ref(mu_h, "mu_h")?;
        *slot = solve_dispersion(&st.into(), lambda)?.mu_h;
        Ok(())
    })
}

/// Assembles a 1D system on the unit interval with the default boundary
/// treatment. `family` is `open-uniform`, `open-stretched` or
/// `periodic-uniform`; `bc` is `dirichlet` or `periodic`.
///
/// # Safety
/// String arguments must be NUL terminated and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dq_system_new(
    preset: *const c_char,
    family: *const c_char,
    elements: usize,
    stretch: f64,
    bc: *const c_char,
    out: *mut *mut DqSystem,
) -> DqStatus {
    guard(|| {
        let slot = out_ref(out, "out")?;
        *slot = ptr::null_mut();
        let preset: Preset = string(preset, "preset")?.parse()?;
        let family: MeshFamily = string(family, "family")?.parse()?;
        let bc: Boundary = string(bc, "bc")?.parse()?;
        let disc = assemble_preset(
            preset,
            family,
            elements,
            stretch,
            bc,
            BoundaryOptions::default(),
        )?;
        *slot = Box::into_raw(Box::new(DqSystem(disc)));
        Ok(())
    })
}

/// # Safety
/// `system` must come from [`dq_system_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dq_system_free(system: *mut DqSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Number of free degrees of freedom, 0 for a null handle.
///
/// # Safety
/// `system` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dq_system_dim(system: *const DqSystem) -> usize {
    system.as_ref().map_or(0, |s| s.0.dim())
}

/// Writes all discrete eigenvalues in ascending order.
///
/// # Safety
/// `system` must be a live handle and `out` must hold `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn dq_system_eigenvalues(
    system: *const DqSystem,
    out: *mut f64,
    capacity: usize,
    written: *mut usize,
) -> DqStatus {
    guard(|| {
        let s = system.as_ref().ok_or_else(|| null("system"))?;
        let dim = s.0.dim();
        if capacity < dim {
            *out_ref(written, "written")? = dim;
            return Err(Fail::Status(
                DqStatus::BufferTooSmall,
                format!("buffer holds {capacity} values, {dim} needed"),
            ));
        }
        let values: Vec<f64> = solve(&s.0)?.iter().map(|p| p.lambda_h).collect();
        copy_out(&values, out, capacity, written)
    })
}
