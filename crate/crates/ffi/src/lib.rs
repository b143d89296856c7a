//! C ABI over the `bspci` solver.
//!
//! Objects are opaque handles created and destroyed by this library. Every
//! fallible call returns a [`BspciStatus`]; the message of the most recent
//! failure on the calling thread is available from
//! [`bspci_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bspci::run::{run_solve, RunConfig, SolveReport};
use bspci::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BspciStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad key, value or combination of settings.
    Config = 3,
    /// A numerical stage failed (factorization, eigensolver, trace check).
    Numerical = 4,
    /// The Hamiltonian would exceed the memory budget.
    MemoryBudget = 5,
    /// Index past the end of an array.
    OutOfRange = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Run settings. Create with [`bspci_config_new`], free with
/// [`bspci_config_free`].
pub struct BspciConfig {
    inner: RunConfig,
}

/// Result of one solve. Free with [`bspci_report_free`].
pub struct BspciReport {
    inner: SolveReport,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> BspciStatus {
    match e {
        Error::MemoryBudgetExceeded { .. } => BspciStatus::MemoryBudget,
        Error::IndexOutOfRange { .. } => BspciStatus::OutOfRange,
        e if e.is_config_error() => BspciStatus::Config,
        _ => BspciStatus::Numerical,
    }
}

fn guarded(f: impl FnOnce() -> Result<(), (BspciStatus, String)>) -> BspciStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            BspciStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside bspci");
            BspciStatus::Panic
        }
    }
}

fn fail(e: Error) -> (BspciStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (BspciStatus, String) {
    (BspciStatus::NullPointer, format!("{what} is NULL"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, (BspciStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (BspciStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bspci_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into the library on the
/// same thread.
#[no_mangle]
pub extern "C" fn bspci_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// New config holding the defaults (He ground state, `l_max = 5`,
/// `n_max = 40`).
#[no_mangle]
pub extern "C" fn bspci_config_new() -> *mut BspciConfig {
    Box::into_raw(Box::new(BspciConfig {
        inner: RunConfig::default(),
    }))
}

/// # Safety
/// `config` must come from [`bspci_config_new`] and not be freed already.
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn bspci_config_free(config: *mut BspciConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Sets one key, using the same names and value syntax as the CLI config
/// file (`z`, `state`, `lmax`, `nmax`, `rmax`, `order`, ...).
///
/// # Safety
/// `config` must be a live handle; `key` and `value` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn bspci_config_set(
    config: *mut BspciConfig,
    key: *const c_char,
    value: *const c_char,
) -> BspciStatus {
    guarded(|| {
        let cfg = config.as_mut().ok_or_else(|| null("config"))?;
        let key = text(key, "key")?;
        let value = text(value, "value")?;
        cfg.inner.set(key, value).map_err(fail)
    })
}

/// Solves the configured state. On success `*out` receives a new report.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bspci_solve(config: *const BspciConfig, out: *mut *mut BspciReport) -> BspciStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let cfg = config.as_ref().ok_or_else(|| null("config"))?;
        let report = run_solve(&cfg.inner).map_err(fail)?;
        *out = Box::into_raw(Box::new(BspciReport { inner: report }));
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`bspci_solve`] and not be freed already. NULL
/// is ignored.
#[no_mangle]
pub unsafe extern "C" fn bspci_report_free(report: *mut BspciReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

unsafe fn read<T>(
    report: *const BspciReport,
    out: *mut T,
    get: impl FnOnce(&SolveReport) -> T,
) -> BspciStatus {
    guarded(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = get(&r.inner);
        Ok(())
    })
}

/// Total energy in hartree.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bspci_report_energy(report: *const BspciReport, out: *mut f64) -> BspciStatus {
    read(report, out, |r| r.result.energy)
}

/// Linear entropy `1 - Tr ρ²`.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bspci_report_linear_entropy(report: *const BspciReport, out: *mut f64) -> BspciStatus {
    read(report, out, |r| r.result.entropies.linear)
}

/// Von Neumann entropy in bits.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bspci_report_von_neumann_entropy(
    report: *const BspciReport,
    out: *mut f64,
) -> BspciStatus {
    read(report, out, |r| r.result.entropies.von_neumann)
}

/// Spin-weighted entanglement of the `S_z = 0` component.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bspci_report_xi(report: *const BspciReport, out: *mut f64) -> BspciStatus {
    read(report, out, |r| r.result.entropies.xi)
}

/// `Tr ρ²` of the normalized one-particle density matrix.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bspci_report_purity(report: *const BspciReport, out: *mut f64) -> BspciStatus {
    read(report, out, |r| r.result.entropies.purity)
}

/// Number of configurations in the CI expansion.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bspci_report_dimension(report: *const BspciReport, out: *mut usize) -> BspciStatus {
    read(report, out, |r| r.result.dimension)
}

/// Number of distinct occupation numbers (each with its degeneracy).
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bspci_report_occupation_count(
    report: *const BspciReport,
    out: *mut usize,
) -> BspciStatus {
    read(report, out, |r| r.result.spectrum.as_ref().map_or(0, |s| s.entries().len()))
}

/// Occupation `index`, ordered by `l` and then by decreasing eigenvalue:
/// angular momentum, eigenvalue and degeneracy `2l+1`. Any of the output
/// pointers may be NULL.
///
/// # Safety
/// `report` must be a live handle; non-NULL outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn bspci_report_occupation(
    report: *const BspciReport,
    index: usize,
    l: *mut u32,
    lambda: *mut f64,
    degeneracy: *mut u32,
) -> BspciStatus {
    guarded(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let entries = r.inner.result.spectrum.as_ref().map_or(&[][..], |s| s.entries());
        let e = entries.get(index).ok_or_else(|| {
            (
                BspciStatus::OutOfRange,
                format!("occupation {index} out of range (count {})", entries.len()),
            )
        })?;
        if !l.is_null() {
            *l = e.l;
        }
        if !lambda.is_null() {
            *lambda = e.lambda;
        }
        if !degeneracy.is_null() {
            *degeneracy = e.g;
        }
        Ok(())
    })
}
