//! C interface to `nonlocal-decay`.
//!
//! Every fallible call returns an [`NldStatus`]; on failure the message is kept per thread
//! and read back with [`nld_last_error`]. Handles come from the constructor and solve
//! functions and are released with the matching `nld_*_free`.

use nonlocal_decay::kernel::{Family, KernelPair, TimeGrid};
use nonlocal_decay::ode::{solve_scalar, ScalarProblem};
use nonlocal_decay::relaxation::{check_bounds, solve_relaxation, RelaxationCurve};
use nonlocal_decay::special::mittag_leffler_neg;
use nonlocal_decay::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NldStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Numerical = 3,
    Usage = 4,
    InvalidInput = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Kernel pair (k, l).
pub struct NldKernel(KernelPair);

/// Time grid 0 = t_0 < ... < t_N.
pub struct NldGrid(TimeGrid);

/// Relaxation curve on a grid.
pub struct NldCurve(RelaxationCurve);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn fail(e: Error) -> NldStatus {
    let status = match e {
        Error::Domain(_) => NldStatus::Domain,
        Error::Numerical { .. } => NldStatus::Numerical,
        Error::Usage(_) => NldStatus::Usage,
    };
    set_error(e.to_string());
    status
}

fn guard(f: impl FnOnce() -> NldStatus) -> NldStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            NldStatus::Panic
        }
    }
}

fn null(what: &str) -> NldStatus {
    set_error(format!("{what} is null"));
    NldStatus::NullPointer
}

unsafe fn store<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

unsafe fn copy_out(src: &[f64], buf: *mut f64, len: usize) -> NldStatus {
    if buf.is_null() {
        return null("buffer");
    }
    if len < src.len() {
        set_error(format!("buffer holds {len} values, {} needed", src.len()));
        return NldStatus::BufferTooSmall;
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    NldStatus::Ok
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nld_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn nld_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Fractional pair with order alpha in (0, 1).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn nld_kernel_fractional(alpha: f64, out: *mut *mut NldKernel) -> NldStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match KernelPair::fractional(alpha) {
            Ok(p) => {
                store(out, NldKernel(p));
                NldStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Pair from a JSON family description such as `{"family":"fractional_exp","alpha":0.5,"gamma":1}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nld_kernel_from_json(json: *const c_char, out: *mut *mut NldKernel) -> NldStatus {
    guard(|| {
        if json.is_null() {
            return null("json");
        }
        if out.is_null() {
            return null("out");
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => {
                set_error("json is not UTF-8");
                return NldStatus::InvalidInput;
            }
        };
        let family: Family = match serde_json::from_str(text) {
            Ok(f) => f,
            Err(e) => {
                set_error(format!("invalid family: {e}"));
                return NldStatus::InvalidInput;
            }
        };
        match KernelPair::new(family) {
            Ok(p) => {
                store(out, NldKernel(p));
                NldStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `kernel` must come from a kernel constructor and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nld_kernel_free(kernel: *mut NldKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// k(t) for t > 0.
///
/// # Safety
/// `kernel` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn nld_kernel_eval_k(kernel: *const NldKernel, t: f64, value: *mut f64) -> NldStatus {
    guard(|| {
        if kernel.is_null() || value.is_null() {
            return null("kernel or value");
        }
        match (*kernel).0.eval_k(t) {
            Ok(v) => {
                *value = v;
                NldStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// l(t) for t > 0, by Laplace inversion when l has no closed form.
///
/// # Safety
/// `kernel` must be a live handle and `value` writable.
#[no_mangle]
pub unsafe extern "C" fn nld_kernel_eval_l(kernel: *const NldKernel, t: f64, value: *mut f64) -> NldStatus {
    guard(|| {
        if kernel.is_null() || value.is_null() {
            return null("kernel or value");
        }
        match (*kernel).0.eval_l(t) {
            Ok(v) => {
                *value = v;
                NldStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Graded grid t_i = t_end (i/n)^r.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nld_grid_graded(t_end: f64, n: usize, r: f64, out: *mut *mut NldGrid) -> NldStatus {
    guard(|| {
        if out.is_null() {
            return null("out");
        }
        match TimeGrid::graded(t_end, n, r) {
            Ok(g) => {
                store(out, NldGrid(g));
                NldStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Number of nodes, including t = 0; zero for a null handle.
///
/// # Safety
/// `grid` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn nld_grid_len(grid: *const NldGrid) -> usize {
    if grid.is_null() {
        0
    } else {
        (*grid).0.len()
    }
}

/// # Safety
/// `grid` must be a live handle and `buf` hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn nld_grid_nodes(grid: *const NldGrid, buf: *mut f64, len: usize) -> NldStatus {
    guard(|| {
        if grid.is_null() {
            return null("grid");
        }
        copy_out((*grid).0.nodes(), buf, len)
    })
}

/// # Safety
/// `grid` must come from a grid constructor and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nld_grid_free(grid: *mut NldGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Relaxation function s_mu on the grid.
///
/// # Safety
/// `kernel` and `grid` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nld_relaxation_solve(kernel: *const NldKernel, mu: f64, grid: *const NldGrid, out: *mut *mut NldCurve) -> NldStatus {
    guard(|| {
        if kernel.is_null() || grid.is_null() || out.is_null() {
            return null("kernel, grid or out");
        }
        match solve_relaxation(&(*kernel).0, mu, &(*grid).0) {
            Ok(c) => {
                store(out, NldCurve(c));
                NldStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `curve` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn nld_curve_len(curve: *const NldCurve) -> usize {
    if curve.is_null() {
        0
    } else {
        (*curve).0.values.len()
    }
}

/// # Safety
/// `curve` must be a live handle and `buf` hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn nld_curve_values(curve: *const NldCurve, buf: *mut f64, len: usize) -> NldStatus {
    guard(|| {
        if curve.is_null() {
            return null("curve");
        }
        copy_out(&(*curve).0.values, buf, len)
    })
}

/// Checks the two-sided envelope of the curve; `pass` receives 1 or 0.
///
/// # Safety
/// `curve` and `kernel` must be live handles and `pass` writable.
#[no_mangle]
pub unsafe extern "C" fn nld_curve_check_bounds(curve: *const NldCurve, kernel: *const NldKernel, pass: *mut i32) -> NldStatus {
    guard(|| {
        if curve.is_null() || kernel.is_null() || pass.is_null() {
            return null("curve, kernel or pass");
        }
        match check_bounds(&(*curve).0, &(*kernel).0) {
            Ok(r) => {
                *pass = r.pass as i32;
                NldStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `curve` must come from a solve and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn nld_curve_free(curve: *mut NldCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// E_alpha(-x) for alpha in (0, 1] and x >= 0; `error` (may be null) receives the estimate.
///
/// # Safety
/// `value` must be writable; `error` writable or null.
#[no_mangle]
pub unsafe extern "C" fn nld_mittag_leffler(alpha: f64, x: f64, value: *mut f64, error: *mut f64) -> NldStatus {
    guard(|| {
        if value.is_null() {
            return null("value");
        }
        match mittag_leffler_neg(alpha, x) {
            Ok(m) => {
                *value = m.value;
                if !error.is_null() {
                    *error = m.error;
                }
                NldStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Solves the scalar problem d/dt(g_{1-alpha} * [u - u0]) + nu |u|^{gamma-1} u = 0 on the grid.
///
/// # Safety
/// `grid` must be a live handle and `buf` hold `len >= nld_grid_len(grid)` values.
#[no_mangle]
pub unsafe extern "C" fn nld_scalar_solve(alpha: f64, nu: f64, gamma: f64, u0: f64, grid: *const NldGrid, buf: *mut f64, len: usize) -> NldStatus {
    guard(|| {
        if grid.is_null() {
            return null("grid");
        }
        let sol = ScalarProblem::new(alpha, nu, gamma, u0, (*grid).0.clone()).and_then(|p| solve_scalar(&p));
        match sol {
            Ok(u) => copy_out(&u, buf, len),
            Err(e) => fail(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last() -> String {
        unsafe { CStr::from_ptr(nld_last_error()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn version_is_package_version() {
        let v = unsafe { CStr::from_ptr(nld_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn domain_errors_carry_a_message() {
        let mut k = ptr::null_mut();
        let s = unsafe { nld_kernel_fractional(1.5, &mut k) };
        assert_eq!(s, NldStatus::Domain);
        assert!(k.is_null());
        assert!(last().contains("alpha"));
    }

    #[test]
    fn null_pointers_are_rejected() {
        assert_eq!(unsafe { nld_kernel_fractional(0.5, ptr::null_mut()) }, NldStatus::NullPointer);
        assert_eq!(unsafe { nld_mittag_leffler(0.5, 1.0, ptr::null_mut(), ptr::null_mut()) }, NldStatus::NullPointer);
        assert_eq!(unsafe { nld_grid_len(ptr::null()) }, 0);
        unsafe { nld_kernel_free(ptr::null_mut()) };
    }

    #[test]
    fn bad_json_is_invalid_input() {
        let mut k = ptr::null_mut();
        let s = unsafe { nld_kernel_from_json(c"{\"family\":\"nope\"}".as_ptr(), &mut k) };
        assert_eq!(s, NldStatus::InvalidInput);
    }
}
