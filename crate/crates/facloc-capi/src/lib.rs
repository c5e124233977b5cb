//! C ABI for the facloc solvers.
//!
//! Conventions: handles are opaque pointers created and destroyed by this
//! library; every fallible call returns a [`FaclocCode`] and writes its
//! output through an out-pointer; `facloc_last_error_message` describes the
//! most recent failure on the calling thread. Option structs are plain C
//! values with `_default` constructors, so callers can set only what they
//! need. The generated header lives at `include/facloc.h`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use facloc::events::NullSink;
use facloc::instance::{self, Instance, Variant};
use facloc::kernel::{kernel_search, KernelConfig};
use facloc::master::{self, CutMode, SolveResult, SolveStatus, SolverConfig};
use facloc::oracle::brute_force;

/// Status code returned by every fallible entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FaclocCode {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    ParseFailed = 4,
    InvalidArgument = 5,
    SolveFailed = 6,
    TooLarge = 7,
    Panic = 8,
}

/// Outcome of a solve, mirrored from the solver's status.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FaclocSolveStatus {
    Optimal = 0,
    GapLimit = 1,
    TimeLimit = 2,
    Infeasible = 3,
}

/// Opaque problem instance handle.
pub struct FaclocInstance {
    inner: Instance,
}

/// Opaque solve result handle.
pub struct FaclocResult {
    status: FaclocSolveStatus,
    cost: f64,
    lower_bound: f64,
    gap: f64,
    nodes: u64,
    cuts: u64,
    wall_time: f64,
    selection: Option<Vec<u8>>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: impl std::fmt::Display) {
    let text = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap());
}

/// Message for the most recent failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn facloc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn facloc_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

fn guard<F: FnOnce() -> FaclocCode>(f: F) -> FaclocCode {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_error("internal panic");
            FaclocCode::Panic
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, FaclocCode> {
    if ptr.is_null() {
        set_error("null string pointer");
        return Err(FaclocCode::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| {
        set_error(format!("invalid utf-8: {e}"));
        FaclocCode::InvalidUtf8
    })
}

fn emit_instance(out: *mut *mut FaclocInstance, inst: Instance) -> FaclocCode {
    if out.is_null() {
        set_error("null out pointer");
        return FaclocCode::NullPointer;
    }
    let boxed = Box::new(FaclocInstance { inner: inst });
    unsafe { *out = Box::into_raw(boxed) };
    FaclocCode::Ok
}

/// Load an instance from a file (.cap ORLIB, .fl native).
///
/// # Safety
/// `path` must be a valid NUL-terminated string; `out` must be a valid
/// pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_instance_from_file(
    path: *const c_char,
    out: *mut *mut FaclocInstance,
) -> FaclocCode {
    guard(|| {
        let path = match read_str(path) {
            Ok(s) => s,
            Err(c) => return c,
        };
        match instance::read_file(Path::new(path), None) {
            Ok(inst) => emit_instance(out, inst),
            Err(e) => {
                set_error(&e);
                match e {
                    instance::ReadError::Io { .. } => FaclocCode::Io,
                    _ => FaclocCode::ParseFailed,
                }
            }
        }
    })
}

/// Parse an instance from native-format text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn facloc_instance_parse_native(
    text: *const c_char,
    out: *mut *mut FaclocInstance,
) -> FaclocCode {
    guard(|| {
        let text = match read_str(text) {
            Ok(s) => s,
            Err(c) => return c,
        };
        match instance::parse_native(text) {
            Ok(inst) => emit_instance(out, inst),
            Err(e) => {
                set_error(e);
                FaclocCode::ParseFailed
            }
        }
    })
}

/// Parse an instance from ORLIB cap-format text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn facloc_instance_parse_orlib(
    text: *const c_char,
    out: *mut *mut FaclocInstance,
) -> FaclocCode {
    guard(|| {
        let text = match read_str(text) {
            Ok(s) => s,
            Err(c) => return c,
        };
        match instance::parse_orlib(text) {
            Ok(inst) => emit_instance(out, inst),
            Err(e) => {
                set_error(e);
                FaclocCode::ParseFailed
            }
        }
    })
}

/// Generate a reproducible random instance. `capacitated != 0` requires
/// `ratio > 1` (total capacity over total demand).
///
/// # Safety
/// `out` must be a valid pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_instance_generate(
    seed: u64,
    n_facilities: usize,
    n_customers: usize,
    capacitated: i32,
    ratio: f64,
    out: *mut *mut FaclocInstance,
) -> FaclocCode {
    guard(|| {
        let variant = if capacitated != 0 {
            Variant::Cflp
        } else {
            Variant::Uflp
        };
        let ratio = (capacitated != 0).then_some(ratio);
        match instance::generate(seed, n_facilities, n_customers, variant, ratio) {
            Ok(inst) => emit_instance(out, inst),
            Err(e) => {
                set_error(e);
                FaclocCode::InvalidArgument
            }
        }
    })
}

/// Append a recourse (dummy) facility with the given penalty, producing a new
/// handle. Pass a non-finite or non-positive penalty to use the recommended
/// one.
///
/// # Safety
/// `inst` must be a live handle from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn facloc_instance_add_recourse(
    inst: *const FaclocInstance,
    penalty: f64,
    out: *mut *mut FaclocInstance,
) -> FaclocCode {
    guard(|| {
        let Some(handle) = inst.as_ref() else {
            set_error("null instance");
            return FaclocCode::NullPointer;
        };
        let penalty = if penalty.is_finite() && penalty > 0.0 {
            penalty
        } else {
            handle.inner.recommended_recourse_penalty()
        };
        match instance::add_recourse(&handle.inner, penalty) {
            Ok(inst) => emit_instance(out, inst),
            Err(e) => {
                set_error(e);
                FaclocCode::InvalidArgument
            }
        }
    })
}

/// Number of facilities (including any recourse column); 0 for null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_instance_facilities(inst: *const FaclocInstance) -> usize {
    inst.as_ref().map_or(0, |h| h.inner.n_facilities())
}

/// Number of customers; 0 for null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_instance_customers(inst: *const FaclocInstance) -> usize {
    inst.as_ref().map_or(0, |h| h.inner.n_customers())
}

/// Serialize an instance to native-format text. Free the string with
/// `facloc_string_free`.
///
/// # Safety
/// `inst` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn facloc_instance_emit_native(
    inst: *const FaclocInstance,
    out: *mut *mut c_char,
) -> FaclocCode {
    guard(|| {
        let Some(handle) = inst.as_ref() else {
            set_error("null instance");
            return FaclocCode::NullPointer;
        };
        if out.is_null() {
            set_error("null out pointer");
            return FaclocCode::NullPointer;
        }
        let text = instance::emit_native(&handle.inner);
        match CString::new(text) {
            Ok(c) => {
                *out = c.into_raw();
                FaclocCode::Ok
            }
            Err(e) => {
                set_error(e);
                FaclocCode::InvalidArgument
            }
        }
    })
}

/// Free a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer previously returned by this library and not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn facloc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Free an instance handle.
///
/// # Safety
/// `inst` must be null or a live handle; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn facloc_instance_free(inst: *mut FaclocInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Exact-solver options; obtain defaults from
/// `facloc_solver_options_default` and override fields as needed.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct FaclocSolverOptions {
    /// Relative optimality gap tolerance.
    pub gap_tol: f64,
    /// Wall-clock limit in seconds; `<= 0` means none.
    pub time_limit: f64,
    /// Node limit; `<= 0` means none.
    pub node_limit: i64,
    /// Nonzero: epigraph covers fixed plus assignment cost instead of the
    /// split form.
    pub full_cut_mode: i32,
}

#[no_mangle]
pub extern "C" fn facloc_solver_options_default() -> FaclocSolverOptions {
    FaclocSolverOptions {
        gap_tol: 1e-6,
        time_limit: 0.0,
        node_limit: 0,
        full_cut_mode: 0,
    }
}

/// Kernel-search options; obtain defaults from
/// `facloc_kernel_options_default`.
#[repr(C)]
#[derive(Clone, Copy)]
pub struct FaclocKernelOptions {
    /// `<= 0` picks `max(2, ceil(n/10))`.
    pub bucket_size: i64,
    pub max_bucket_passes: i64,
    pub allow_removal: i32,
    pub removal_patience: u32,
    pub fixing_variant: i32,
    /// Per-restricted-MILP budget in seconds; `<= 0` means none.
    pub milp_time_limit: f64,
}

#[no_mangle]
pub extern "C" fn facloc_kernel_options_default() -> FaclocKernelOptions {
    FaclocKernelOptions {
        bucket_size: 0,
        max_bucket_passes: 1,
        allow_removal: 1,
        removal_patience: 2,
        fixing_variant: 0,
        milp_time_limit: 0.0,
    }
}

fn solver_config(opts: Option<&FaclocSolverOptions>) -> SolverConfig {
    let mut cfg = SolverConfig::default();
    if let Some(o) = opts {
        cfg.gap_tol = o.gap_tol;
        cfg.time_limit = (o.time_limit > 0.0).then_some(o.time_limit);
        cfg.node_limit = (o.node_limit > 0).then_some(o.node_limit as u64);
        cfg.cut_mode = if o.full_cut_mode != 0 {
            CutMode::Full
        } else {
            CutMode::Split
        };
    }
    cfg
}

fn kernel_config(opts: Option<&FaclocKernelOptions>) -> KernelConfig {
    let mut cfg = KernelConfig::default();
    if let Some(o) = opts {
        cfg.bucket_size = (o.bucket_size > 0).then_some(o.bucket_size as usize);
        cfg.max_bucket_passes = o.max_bucket_passes.max(1) as usize;
        cfg.allow_removal = o.allow_removal != 0;
        cfg.removal_patience = o.removal_patience.max(1);
        cfg.fixing_variant = o.fixing_variant != 0;
        cfg.milp_time_limit = (o.milp_time_limit > 0.0).then_some(o.milp_time_limit);
    }
    cfg
}

fn emit_result(out: *mut *mut FaclocResult, res: &SolveResult) -> FaclocCode {
    if out.is_null() {
        set_error("null out pointer");
        return FaclocCode::NullPointer;
    }
    let status = match res.status {
        SolveStatus::Optimal => FaclocSolveStatus::Optimal,
        SolveStatus::GapLimit => FaclocSolveStatus::GapLimit,
        SolveStatus::TimeLimit => FaclocSolveStatus::TimeLimit,
        SolveStatus::Infeasible => FaclocSolveStatus::Infeasible,
    };
    let boxed = Box::new(FaclocResult {
        status,
        cost: res.upper_bound,
        lower_bound: res.lower_bound,
        gap: res.gap,
        nodes: res.n_nodes,
        cuts: res.n_cuts,
        wall_time: res.wall_time,
        selection: res
            .best_y
            .as_ref()
            .map(|y| y.iter().map(|&b| u8::from(b)).collect()),
    });
    unsafe { *out = Box::into_raw(boxed) };
    FaclocCode::Ok
}

/// Solve exactly by branch-and-cut. `options` may be null for defaults.
///
/// # Safety
/// `inst` must be a live handle; `out` must be valid; `options` must be null
/// or point to a valid options struct.
#[no_mangle]
pub unsafe extern "C" fn facloc_solve_benders(
    inst: *const FaclocInstance,
    options: *const FaclocSolverOptions,
    out: *mut *mut FaclocResult,
) -> FaclocCode {
    guard(|| {
        let Some(handle) = inst.as_ref() else {
            set_error("null instance");
            return FaclocCode::NullPointer;
        };
        let cfg = solver_config(options.as_ref());
        match master::solve(&handle.inner, &cfg, &mut NullSink) {
            Ok(res) => emit_result(out, &res),
            Err(e) => {
                set_error(e);
                FaclocCode::SolveFailed
            }
        }
    })
}

/// Run the kernel-search heuristic. Null options mean defaults.
///
/// # Safety
/// `inst` must be a live handle; `out` must be valid; option pointers must be
/// null or valid.
#[no_mangle]
pub unsafe extern "C" fn facloc_solve_kernel(
    inst: *const FaclocInstance,
    solver_options: *const FaclocSolverOptions,
    kernel_options: *const FaclocKernelOptions,
    out: *mut *mut FaclocResult,
) -> FaclocCode {
    guard(|| {
        let Some(handle) = inst.as_ref() else {
            set_error("null instance");
            return FaclocCode::NullPointer;
        };
        let scfg = solver_config(solver_options.as_ref());
        let kcfg = kernel_config(kernel_options.as_ref());
        match kernel_search(&handle.inner, &kcfg, &scfg, &mut NullSink) {
            Ok(res) => emit_result(out, &res),
            Err(e) => {
                set_error(e);
                FaclocCode::SolveFailed
            }
        }
    })
}

/// Enumerate every selection (at most 22 non-dummy facilities).
///
/// # Safety
/// `inst` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn facloc_brute_force(
    inst: *const FaclocInstance,
    out: *mut *mut FaclocResult,
) -> FaclocCode {
    guard(|| {
        let Some(handle) = inst.as_ref() else {
            set_error("null instance");
            return FaclocCode::NullPointer;
        };
        match brute_force(&handle.inner) {
            Ok(opt) => {
                let res = SolveResult {
                    status: SolveStatus::Optimal,
                    best_y: Some(opt.y.clone()),
                    upper_bound: opt.cost,
                    lower_bound: opt.cost,
                    gap: 0.0,
                    n_nodes: opt.evaluated,
                    n_cuts: 0,
                    wall_time: 0.0,
                };
                emit_result(out, &res)
            }
            Err(e) => {
                set_error(&e);
                match e {
                    facloc::oracle::OracleError::TooLarge { .. } => FaclocCode::TooLarge,
                    facloc::oracle::OracleError::Slave(_) => FaclocCode::SolveFailed,
                }
            }
        }
    })
}

/// Solve status of a result; `Infeasible` for null.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_result_status(res: *const FaclocResult) -> FaclocSolveStatus {
    res.as_ref()
        .map_or(FaclocSolveStatus::Infeasible, |r| r.status)
}

/// Incumbent cost; NaN when there is none.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_result_cost(res: *const FaclocResult) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| {
        if r.cost.is_finite() {
            r.cost
        } else {
            f64::NAN
        }
    })
}

/// Proven lower bound; NaN for null.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_result_lower_bound(res: *const FaclocResult) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.lower_bound)
}

/// Relative gap `(cost - bound) / max(1, |cost|)`; NaN for null.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_result_gap(res: *const FaclocResult) -> f64 {
    res.as_ref().map_or(f64::NAN, |r| r.gap)
}

/// Nodes processed.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_result_nodes(res: *const FaclocResult) -> u64 {
    res.as_ref().map_or(0, |r| r.nodes)
}

/// Cuts generated.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_result_cuts(res: *const FaclocResult) -> u64 {
    res.as_ref().map_or(0, |r| r.cuts)
}

/// Wall time of the solve in seconds.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_result_wall_time(res: *const FaclocResult) -> f64 {
    res.as_ref().map_or(0.0, |r| r.wall_time)
}

/// Length of the selection vector (number of facilities), 0 when the result
/// carries no incumbent.
///
/// # Safety
/// `res` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn facloc_result_selection_len(res: *const FaclocResult) -> usize {
    res.as_ref()
        .and_then(|r| r.selection.as_ref())
        .map_or(0, Vec::len)
}

/// Copy the 0/1 selection into `buf` (capacity `len`); fails when the buffer
/// is too small or no incumbent exists.
///
/// # Safety
/// `res` must be a live handle; `buf` must point to at least `len` writable
/// bytes.
#[no_mangle]
pub unsafe extern "C" fn facloc_result_selection(
    res: *const FaclocResult,
    buf: *mut u8,
    len: usize,
) -> FaclocCode {
    guard(|| {
        let Some(r) = res.as_ref() else {
            set_error("null result");
            return FaclocCode::NullPointer;
        };
        let Some(sel) = r.selection.as_ref() else {
            set_error("result carries no incumbent");
            return FaclocCode::InvalidArgument;
        };
        if buf.is_null() {
            set_error("null buffer");
            return FaclocCode::NullPointer;
        }
        if len < sel.len() {
            set_error(format!("buffer too small: {len} < {}", sel.len()));
            return FaclocCode::InvalidArgument;
        }
        std::ptr::copy_nonoverlapping(sel.as_ptr(), buf, sel.len());
        FaclocCode::Ok
    })
}

/// Free a result handle.
///
/// # Safety
/// `res` must be null or a live handle; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn facloc_result_free(res: *mut FaclocResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}
