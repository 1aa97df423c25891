//! C API over orbitstrata.
//!
//! Problems are opaque handles. Every call returns an [`OsStatus`]; results
//! are NUL-terminated UTF-8 strings (canonical polynomial text or JSON
//! reports) owned by the caller and released with [`os_string_free`]. On
//! failure [`os_last_error_message`] describes the error on the calling
//! thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use orbitstrata::exactalg::Context;
use orbitstrata::invariants::{pmatrix, PHatMatrix};
use orbitstrata::io::commands::{
    parse_box, parse_point, run_classify, run_pmatrix, run_probe, run_relations, run_stratum, run_verify,
    CommandError, CommandOutput, CommandStatus, RunOptions,
};
use orbitstrata::io::{load_problem, parse_poly, parse_problem, render_poly, ProblemSpec};

/// Result codes. The first four match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OsStatus {
    Ok = 0,
    VerificationFailed = 1,
    InputError = 2,
    CapExceeded = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    OutOfRange = 6,
    Internal = 7,
}

/// Opaque loaded problem.
pub struct OsProblem {
    spec: ProblemSpec,
    phat: OnceLock<Result<PHatMatrix, String>>,
}

impl OsProblem {
    fn phat(&self) -> Result<&PHatMatrix, Failure> {
        self.phat
            .get_or_init(|| pmatrix(&self.spec.mib).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|m| Failure::new(OsStatus::InputError, m.clone()))
    }
}

struct Failure {
    status: OsStatus,
    msg: String,
}

impl Failure {
    fn new(status: OsStatus, msg: impl Into<String>) -> Self {
        Failure { status, msg: msg.into() }
    }
}

impl From<CommandError> for Failure {
    fn from(e: CommandError) -> Self {
        let status = match e.exit_code() {
            3 => OsStatus::CapExceeded,
            _ => OsStatus::InputError,
        };
        Failure::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn guard<F: FnOnce() -> Result<OsStatus, Failure>>(f: F) -> OsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            clear_error();
            s
        }
        Ok(Err(e)) => {
            set_error(&e.msg);
            e.status
        }
        Err(_) => {
            set_error("internal error (panic)");
            OsStatus::Internal
        }
    }
}

unsafe fn input<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(OsStatus::NullPointer, format!("{what} is NULL")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(OsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn problem<'a>(p: *const OsProblem) -> Result<&'a OsProblem, Failure> {
    p.as_ref().ok_or_else(|| Failure::new(OsStatus::NullPointer, "problem handle is NULL"))
}

unsafe fn write_out(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(OsStatus::NullPointer, "output pointer is NULL"));
    }
    let c = CString::new(s).map_err(|_| Failure::new(OsStatus::Internal, "output contains NUL"))?;
    *out = c.into_raw();
    Ok(())
}

unsafe fn check_out<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(OsStatus::NullPointer, "output pointer is NULL"));
    }
    *out = ptr::null_mut();
    Ok(())
}

unsafe fn emit(out: *mut *mut c_char, r: Result<CommandOutput, CommandError>) -> Result<OsStatus, Failure> {
    let r = r?;
    write_out(out, r.report.to_json_pretty())?;
    Ok(match r.status {
        CommandStatus::Ok => OsStatus::Ok,
        CommandStatus::VerificationFailed => OsStatus::VerificationFailed,
    })
}

fn opts() -> RunOptions {
    RunOptions::default()
}

fn boxed(spec: ProblemSpec) -> *mut OsProblem {
    Box::into_raw(Box::new(OsProblem { spec, phat: OnceLock::new() }))
}

/// Loads and validates a problem file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_problem_load(path: *const c_char, out: *mut *mut OsProblem) -> OsStatus {
    guard(|| {
        check_out(out)?;
        let path = input(path, "path")?;
        let spec = load_problem(path).map_err(CommandError::from)?;
        *out = boxed(spec);
        Ok(OsStatus::Ok)
    })
}

/// Parses and validates a problem document held in memory.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_problem_from_json(json: *const c_char, out: *mut *mut OsProblem) -> OsStatus {
    guard(|| {
        check_out(out)?;
        let json = input(json, "json")?;
        let spec = parse_problem(json.as_bytes()).map_err(CommandError::from)?;
        *out = boxed(spec);
        Ok(OsStatus::Ok)
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `p` must come from a load function and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn os_problem_free(p: *mut OsProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of basis elements `q`.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_problem_basis_len(p: *const OsProblem, out: *mut usize) -> OsStatus {
    guard(|| {
        let p = problem(p)?;
        let out = out.as_mut().ok_or_else(|| Failure::new(OsStatus::NullPointer, "output pointer is NULL"))?;
        *out = p.spec.mib.len();
        Ok(OsStatus::Ok)
    })
}

/// Number of strata jobs.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_problem_job_count(p: *const OsProblem, out: *mut usize) -> OsStatus {
    guard(|| {
        let p = problem(p)?;
        let out = out.as_mut().ok_or_else(|| Failure::new(OsStatus::NullPointer, "output pointer is NULL"))?;
        *out = p.spec.strata_jobs.len();
        Ok(OsStatus::Ok)
    })
}

/// Canonical text of the P̂ entry `(a, b)`, 0-based. P̂ is computed once per
/// handle.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_pmatrix_entry(p: *const OsProblem, a: usize, b: usize, out: *mut *mut c_char) -> OsStatus {
    guard(|| {
        check_out(out)?;
        let phat = problem(p)?.phat()?;
        let q = phat.size();
        if a >= q || b >= q {
            return Err(Failure::new(OsStatus::OutOfRange, format!("entry ({a}, {b}) outside {q}x{q}")));
        }
        write_out(out, render_poly(phat.mat.get(a, b)))?;
        Ok(OsStatus::Ok)
    })
}

/// `pmatrix` report as JSON.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_pmatrix_report(p: *const OsProblem, out: *mut *mut c_char) -> OsStatus {
    guard(|| {
        check_out(out)?;
        emit(out, run_pmatrix(&problem(p)?.spec, opts()))
    })
}

/// `relations` report as JSON.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_relations_report(p: *const OsProblem, max_degree: u32, out: *mut *mut c_char) -> OsStatus {
    guard(|| {
        check_out(out)?;
        emit(out, run_relations(&problem(p)?.spec, max_degree, opts()))
    })
}

/// `stratum` report for job `job` as JSON. Returns
/// `OS_STATUS_VERIFICATION_FAILED` with the report when a check fails.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_stratum_report(p: *const OsProblem, job: usize, out: *mut *mut c_char) -> OsStatus {
    guard(|| {
        check_out(out)?;
        emit(out, run_stratum(&problem(p)?.spec, job, opts()))
    })
}

/// `verify` report as JSON.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn os_verify_report(p: *const OsProblem, out: *mut *mut c_char) -> OsStatus {
    guard(|| {
        check_out(out)?;
        emit(out, run_verify(&problem(p)?.spec, opts()))
    })
}

/// `classify` report for a comma-separated point.
///
/// # Safety
/// `p` must be a live handle; `point` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn os_classify_report(
    p: *const OsProblem,
    point: *const c_char,
    tol: f64,
    out: *mut *mut c_char,
) -> OsStatus {
    guard(|| {
        check_out(out)?;
        let spec = &problem(p)?.spec;
        let x = parse_point(input(point, "point")?, spec.field_d, spec.x_vars().arity())?;
        emit(out, run_classify(spec, &x, tol, opts()))
    })
}

/// `probe` report for job `job`; `box_spec` is `lo:hi[,lo:hi...]`.
///
/// # Safety
/// `p` must be a live handle; `box_spec` NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn os_probe_report(
    p: *const OsProblem,
    job: usize,
    box_spec: *const c_char,
    samples: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> OsStatus {
    guard(|| {
        check_out(out)?;
        let spec = &problem(p)?.spec;
        let dim = spec
            .job(job)
            .map(|j| j.lambda_mib.len())
            .ok_or_else(|| Failure::new(OsStatus::OutOfRange, format!("job {job} does not exist")))?;
        let b = parse_box(input(box_spec, "box")?, dim)?;
        emit(out, run_probe(spec, job, &b, samples, seed, opts()))
    })
}

/// Canonical form of `expr` over the comma-separated variables `vars` in
/// `Q(√d)`.
///
/// # Safety
/// `expr` and `vars` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn os_canonicalize(
    expr: *const c_char,
    vars: *const c_char,
    d: u32,
    out: *mut *mut c_char,
) -> OsStatus {
    guard(|| {
        check_out(out)?;
        let expr = input(expr, "expr")?;
        let names: Vec<&str> = input(vars, "vars")?.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        let ctx = Context::new(&names);
        let f = parse_poly(expr, &ctx, d).map_err(|e| Failure::new(OsStatus::InputError, e.to_string()))?;
        write_out(out, render_poly(&f))?;
        Ok(OsStatus::Ok)
    })
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn os_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call on the same thread.
#[no_mangle]
pub extern "C" fn os_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, static.
#[no_mangle]
pub extern "C" fn os_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
