//! C ABI over `teamflow`.
//!
//! Scenarios live behind an opaque [`TfScenario`] handle. Every fallible call
//! returns a [`TfStatus`]; on failure [`tf_last_error`] describes the cause
//! for the calling thread. Profiles cross the boundary as flat `double`
//! arrays ordered by decision maker, then path. Strings returned by the
//! library are released with [`tf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use teamflow::reproduce::deviation_report;
use teamflow::scenario::{self, Scenario};
use teamflow::{cost, solve_dynamics, vi_residual, CostModel, Error, Network, Operator};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Divergence = 3,
    NotConverged = 4,
    BufferSize = 5,
    Panic = 6,
}

/// Which operator to solve or evaluate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TfMode {
    Team = 0,
    Ne = 1,
    Potential = 2,
}

/// Summary of one solve. The profile itself goes to the caller's buffer.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TfSolveInfo {
    pub cost: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub step_size: f64,
}

/// Opaque scenario handle.
pub struct TfScenario {
    scenario: Scenario,
    net: Network,
    cm: CostModel,
}

impl TfScenario {
    fn new(scenario: Scenario) -> Result<Self, Error> {
        scenario.validate()?;
        let (net, cm) = scenario.build()?;
        Ok(TfScenario { scenario, net, cm })
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Fail(TfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Divergence { .. } => TfStatus::Divergence,
            Error::NotConverged(_) | Error::NoConvergedRuns { .. } | Error::EmptySet => {
                TfStatus::NotConverged
            }
            _ => TfStatus::InvalidInput,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TfStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status and a stored message.
fn guard(f: impl FnOnce() -> Result<TfStatus, Fail>) -> TfStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            TfStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(TfStatus::InvalidInput, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a>(sc: *const TfScenario) -> Result<&'a TfScenario, Fail> {
    sc.as_ref().ok_or_else(|| null("scenario"))
}

fn operator(mode: u32) -> Result<Operator, Fail> {
    match mode {
        0 => Ok(Operator::Team),
        1 => Ok(Operator::Game),
        2 => Ok(Operator::Potential),
        m => Err(Fail(TfStatus::InvalidInput, format!("unknown mode {m}"))),
    }
}

unsafe fn profile_arg(
    sc: &TfScenario,
    p: *const f64,
    len: usize,
) -> Result<teamflow::FlowProfile, Fail> {
    if p.is_null() {
        return Err(null("profile"));
    }
    let n = sc.net.total_paths();
    if len != n {
        return Err(Fail(
            TfStatus::BufferSize,
            format!("profile length {len}, expected {n}"),
        ));
    }
    Ok(sc
        .net
        .profile(std::slice::from_raw_parts(p, len).to_vec())?)
}

/// Writes a new handle to `out`, which is NULL on any failure.
unsafe fn emit_handle(
    out: *mut *mut TfScenario,
    make: impl FnOnce() -> Result<Scenario, Fail>,
) -> Result<TfStatus, Fail> {
    let out = out.as_mut().ok_or_else(|| null("out"))?;
    *out = ptr::null_mut();
    *out = Box::into_raw(Box::new(TfScenario::new(make()?)?));
    Ok(TfStatus::Ok)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next library call on the same thread.
#[no_mangle]
pub extern "C" fn tf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses and validates a scenario from JSON text. `*out` is NULL on failure.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_scenario_from_json(
    json: *const c_char,
    out: *mut *mut TfScenario,
) -> TfStatus {
    guard(|| emit_handle(out, || Ok(Scenario::from_json(str_arg(json, "json")?)?)))
}

/// Loads one of the scenarios shipped with the library by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn tf_scenario_bundled(
    name: *const c_char,
    out: *mut *mut TfScenario,
) -> TfStatus {
    guard(|| emit_handle(out, || Ok(scenario::bundled(str_arg(name, "name")?)?)))
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `sc` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tf_scenario_free(sc: *mut TfScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

/// Number of decision makers.
///
/// # Safety
/// `sc` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_scenario_num_sources(
    sc: *const TfScenario,
    out: *mut usize,
) -> TfStatus {
    guard(|| {
        let sc = handle(sc)?;
        *out.as_mut().ok_or_else(|| null("out"))? = sc.net.num_sources();
        Ok(TfStatus::Ok)
    })
}

/// Length of a flat profile (total number of paths).
///
/// # Safety
/// `sc` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_scenario_num_paths(sc: *const TfScenario, out: *mut usize) -> TfStatus {
    guard(|| {
        let sc = handle(sc)?;
        *out.as_mut().ok_or_else(|| null("out"))? = sc.net.total_paths();
        Ok(TfStatus::Ok)
    })
}

/// Sets `rho` of the 0-based `edge`. The handle is unchanged on failure.
///
/// # Safety
/// `sc` must be a live handle not shared with another thread during the call.
#[no_mangle]
pub unsafe extern "C" fn tf_scenario_set_rho(
    sc: *mut TfScenario,
    edge: usize,
    value: f64,
) -> TfStatus {
    guard(|| {
        let sc = sc.as_mut().ok_or_else(|| null("scenario"))?;
        let updated = TfScenario::new(sc.scenario.with_rho(edge, value)?)?;
        *sc = updated;
        Ok(TfStatus::Ok)
    })
}

/// Runs the projected dynamics from the uniform split and writes the final
/// profile to `profile` (length `len`). A run that ends without meeting the
/// tolerance still fills the outputs and returns `NOT_CONVERGED`.
///
/// # Safety
/// `sc` must be a live handle, `profile` must hold `len` doubles and `info`
/// may be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn tf_solve(
    sc: *const TfScenario,
    mode: u32,
    profile: *mut f64,
    len: usize,
    info: *mut TfSolveInfo,
) -> TfStatus {
    guard(|| {
        let sc = handle(sc)?;
        let op = operator(mode)?;
        if profile.is_null() {
            return Err(null("profile"));
        }
        let n = sc.net.total_paths();
        if len != n {
            return Err(Fail(
                TfStatus::BufferSize,
                format!("profile length {len}, expected {n}"),
            ));
        }
        let res = solve_dynamics(
            &sc.net,
            &sc.cm,
            op,
            &sc.scenario.solver,
            &sc.net.uniform_profile(),
        )?;
        std::slice::from_raw_parts_mut(profile, len).copy_from_slice(res.profile.as_slice());
        if let Some(info) = info.as_mut() {
            *info = TfSolveInfo {
                cost: res.cost,
                residual: res.residual,
                iterations: res.iterations,
                converged: res.converged,
                step_size: res.step_size,
            };
        }
        if res.converged {
            Ok(TfStatus::Ok)
        } else {
            set_error(format!("residual {} above tolerance", res.residual));
            Ok(TfStatus::NotConverged)
        }
    })
}

/// Team cost of a flat profile.
///
/// # Safety
/// `sc` must be a live handle, `profile` must hold `len` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_team_cost(
    sc: *const TfScenario,
    profile: *const f64,
    len: usize,
    out: *mut f64,
) -> TfStatus {
    guard(|| {
        let sc = handle(sc)?;
        let u = profile_arg(sc, profile, len)?;
        *out.as_mut().ok_or_else(|| null("out"))? = cost::team_cost(&sc.net, &sc.cm, &u)?;
        Ok(TfStatus::Ok)
    })
}

/// Natural-map residual of the variational inequality for `mode` at a profile.
///
/// # Safety
/// `sc` must be a live handle, `profile` must hold `len` doubles, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_vi_residual(
    sc: *const TfScenario,
    mode: u32,
    profile: *const f64,
    len: usize,
    out: *mut f64,
) -> TfStatus {
    guard(|| {
        let sc = handle(sc)?;
        let op = operator(mode)?;
        let u = profile_arg(sc, profile, len)?;
        *out.as_mut().ok_or_else(|| null("out"))? = vi_residual(&sc.net, &sc.cm, op, &u)?;
        Ok(TfStatus::Ok)
    })
}

/// Deviation report between the team optimum and the equilibrium as a JSON
/// object. Free the string with [`tf_string_free`].
///
/// # Safety
/// `sc` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tf_deviation_json(
    sc: *const TfScenario,
    out: *mut *mut c_char,
) -> TfStatus {
    guard(|| {
        let sc = handle(sc)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = ptr::null_mut();
        let rep = deviation_report(&sc.scenario)?;
        let text = serde_json::to_string(&rep).expect("report serializes");
        *out = CString::new(text).expect("JSON has no NUL").into_raw();
        Ok(TfStatus::Ok)
    })
}

/// Releases a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
