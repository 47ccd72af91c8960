//! C ABI for the multi-copy solver core.
//!
//! Conventions: every fallible call returns a [`QodeStatus`]; results come
//! back through out-pointers; solver state lives behind an opaque handle
//! that the caller frees with `qode_solver_free`. On any non-OK status a
//! thread-local message is retrievable with `qode_last_error`. The matching
//! header is generated into `include/qode.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CString};

use qode_core::baselines;
use qode_core::copy_solver;
use qode_core::ode::OdeSpec;
use qode_core::Error;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QodeStatus {
    /// The call succeeded.
    QodeOk = 0,
    /// A required pointer argument was null.
    QodeNullPointer = 1,
    /// An argument violated a precondition (bad step size, too few copies, ...).
    QodeInvalidArgument = 2,
    /// The request exceeded the configured memory budget.
    QodeResourceLimit = 3,
    /// A numerical failure such as a singular readout.
    QodeNumerical = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: QodeStatus, message: &str) -> QodeStatus {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).expect("nul bytes removed");
    });
    status
}

fn fail_with(err: Error) -> QodeStatus {
    let status = match err {
        Error::Resource { .. } => QodeStatus::QodeResourceLimit,
        Error::ReadoutSingular(_) => QodeStatus::QodeNumerical,
        _ => QodeStatus::QodeInvalidArgument,
    };
    fail(status, &err.to_string())
}

/// Opaque handle over one solved trajectory.
pub struct QodeSolver {
    trajectory: Vec<f64>,
}

/// Crate version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qode_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Copy the last error message (NUL-terminated) into `buf` and return the
/// full length including the terminator; `buf` may be null to query the
/// length first. The message is per-thread and overwritten on each failure.
#[no_mangle]
pub unsafe extern "C" fn qode_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

fn build_spec(linear: f64, alpha: f64, dt: f64, steps: usize, x0: f64) -> Result<OdeSpec, Error> {
    let spec = OdeSpec {
        linear_coeff: linear,
        cubic_coeff: alpha,
        dt,
        steps,
        x0,
    };
    spec.validate()?;
    Ok(spec)
}

/// Run the multi-copy solver for ẋ = linear·x − alpha·x³ and hand back an
/// opaque handle holding the readout trajectory (steps + 1 samples).
#[no_mangle]
pub unsafe extern "C" fn qode_solver_new(
    linear: f64,
    alpha: f64,
    dt: f64,
    steps: usize,
    x0: f64,
    copies: usize,
    out: *mut *mut QodeSolver,
) -> QodeStatus {
    if out.is_null() {
        return fail(QodeStatus::QodeNullPointer, "out handle is null");
    }
    *out = std::ptr::null_mut();
    let spec = match build_spec(linear, alpha, dt, steps, x0) {
        Ok(s) => s,
        Err(e) => return fail_with(e),
    };
    let history = match copy_solver::solve_history(&spec, copies) {
        Ok(h) => h,
        Err(e) => return fail_with(e),
    };
    let trajectory = match history.trajectory(spec.dt) {
        Ok(t) => t.into_iter().map(|(_, x)| x).collect(),
        Err(e) => return fail_with(e),
    };
    *out = Box::into_raw(Box::new(QodeSolver { trajectory }));
    QodeStatus::QodeOk
}

/// Number of trajectory samples held by the handle (steps + 1).
#[no_mangle]
pub unsafe extern "C" fn qode_solver_len(solver: *const QodeSolver) -> usize {
    if solver.is_null() {
        return 0;
    }
    (*solver).trajectory.len()
}

/// Copy the trajectory into `out`, which must hold `len` doubles;
/// `len` must equal `qode_solver_len`.
#[no_mangle]
pub unsafe extern "C" fn qode_solver_trajectory(
    solver: *const QodeSolver,
    out: *mut f64,
    len: usize,
) -> QodeStatus {
    if solver.is_null() || out.is_null() {
        return fail(QodeStatus::QodeNullPointer, "solver or out is null");
    }
    let trajectory = &(*solver).trajectory;
    if len != trajectory.len() {
        return fail(
            QodeStatus::QodeInvalidArgument,
            "len does not match qode_solver_len",
        );
    }
    std::ptr::copy_nonoverlapping(trajectory.as_ptr(), out, len);
    QodeStatus::QodeOk
}

/// Release a handle; a null pointer is a no-op.
#[no_mangle]
pub unsafe extern "C" fn qode_solver_free(solver: *mut QodeSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Forward-Euler reference trajectory; `out` must hold `steps + 1` doubles
/// and `len` must equal that count.
#[no_mangle]
pub unsafe extern "C" fn qode_euler(
    linear: f64,
    alpha: f64,
    dt: f64,
    steps: usize,
    x0: f64,
    out: *mut f64,
    len: usize,
) -> QodeStatus {
    if out.is_null() {
        return fail(QodeStatus::QodeNullPointer, "out is null");
    }
    let spec = match build_spec(linear, alpha, dt, steps, x0) {
        Ok(s) => s,
        Err(e) => return fail_with(e),
    };
    if len != steps + 1 {
        return fail(QodeStatus::QodeInvalidArgument, "len must be steps + 1");
    }
    let trajectory = match baselines::euler(&spec) {
        Ok(t) => t,
        Err(e) => return fail_with(e),
    };
    for (i, &(_, x)) in trajectory.points.iter().enumerate() {
        *out.add(i) = x;
    }
    QodeStatus::QodeOk
}

/// Closed-form solution at time `t`, written to `*out`.
#[no_mangle]
pub unsafe extern "C" fn qode_analytic(
    linear: f64,
    alpha: f64,
    x0: f64,
    t: f64,
    out: *mut f64,
) -> QodeStatus {
    if out.is_null() {
        return fail(QodeStatus::QodeNullPointer, "out is null");
    }
    let spec = match build_spec(linear, alpha, 1.0, 1, x0) {
        Ok(s) => s,
        Err(e) => return fail_with(e),
    };
    match baselines::analytic(&spec, t) {
        Ok(x) => {
            *out = x;
            QodeStatus::QodeOk
        }
        Err(e) => fail_with(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    unsafe fn last_error_string() -> String {
        let needed = qode_last_error(std::ptr::null_mut(), 0);
        let mut buf = vec![0i8; needed];
        qode_last_error(buf.as_mut_ptr() as *mut c_char, buf.len());
        std::ffi::CStr::from_ptr(buf.as_ptr() as *const c_char)
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn version_is_nul_terminated_package_version() {
        let s = unsafe { std::ffi::CStr::from_ptr(qode_version()) };
        assert_eq!(s.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }

    #[test]
    fn solver_roundtrip_matches_core() {
        unsafe {
            let mut handle: *mut QodeSolver = std::ptr::null_mut();
            let status = qode_solver_new(1.0, 2.0, 0.05, 10, 0.1, 5, &mut handle);
            assert_eq!(status, QodeStatus::QodeOk);
            let len = qode_solver_len(handle);
            assert_eq!(len, 11);
            let mut traj = vec![0.0f64; len];
            assert_eq!(
                qode_solver_trajectory(handle, traj.as_mut_ptr(), len),
                QodeStatus::QodeOk
            );
            qode_solver_free(handle);

            let spec = OdeSpec::new(2.0, 0.05, 10, 0.1).unwrap();
            let expected = copy_solver::solve_history(&spec, 5)
                .unwrap()
                .trajectory(spec.dt)
                .unwrap();
            for (a, (_, b)) in traj.iter().zip(expected) {
                assert_eq!(*a, b);
            }
        }
    }

    #[test]
    fn bad_arguments_set_status_and_message() {
        unsafe {
            let mut handle: *mut QodeSolver = std::ptr::null_mut();
            // dt must be positive
            let status = qode_solver_new(1.0, 2.0, -0.05, 10, 0.1, 5, &mut handle);
            assert_eq!(status, QodeStatus::QodeInvalidArgument);
            assert!(handle.is_null());
            assert!(last_error_string().contains("dt"));

            // register too large for the budget
            let status = qode_solver_new(1.0, 2.0, 0.05, 10, 0.1, 25, &mut handle);
            assert_eq!(status, QodeStatus::QodeResourceLimit);
            assert!(handle.is_null());

            let status = qode_solver_new(1.0, 2.0, 0.05, 10, 0.1, 5, std::ptr::null_mut());
            assert_eq!(status, QodeStatus::QodeNullPointer);
        }
    }

    #[test]
    fn trajectory_length_mismatch_is_rejected() {
        unsafe {
            let mut handle: *mut QodeSolver = std::ptr::null_mut();
            assert_eq!(
                qode_solver_new(1.0, 2.0, 0.05, 3, 0.1, 5, &mut handle),
                QodeStatus::QodeOk
            );
            let mut short = vec![0.0f64; 2];
            assert_eq!(
                qode_solver_trajectory(handle, short.as_mut_ptr(), short.len()),
                QodeStatus::QodeInvalidArgument
            );
            qode_solver_free(handle);
        }
    }

    #[test]
    fn euler_and_analytic_match_core() {
        unsafe {
            let mut out = vec![0.0f64; 6];
            assert_eq!(
                qode_euler(1.0, 2.0, 0.05, 5, 0.1, out.as_mut_ptr(), out.len()),
                QodeStatus::QodeOk
            );
            let spec = OdeSpec::new(2.0, 0.05, 5, 0.1).unwrap();
            let expected = baselines::euler(&spec).unwrap();
            for (a, (_, b)) in out.iter().zip(expected.points) {
                assert_eq!(*a, b);
            }

            let mut x = 0.0f64;
            assert_eq!(qode_analytic(1.0, 2.0, 0.1, 1.0, &mut x), QodeStatus::QodeOk);
            assert_eq!(x, baselines::analytic(&spec, 1.0).unwrap());
        }
    }

    #[test]
    fn null_solver_free_and_len_are_safe() {
        unsafe {
            qode_solver_free(std::ptr::null_mut());
            assert_eq!(qode_solver_len(std::ptr::null()), 0);
        }
    }
}
