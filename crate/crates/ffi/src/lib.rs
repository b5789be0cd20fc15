// Copyright 2026 lecollapse Contributors
// SPDX-License-Identifier: Apache-2.0

//! C interface to `lecollapse`.
//!
//! Configurations and run results are opaque handles owned by the caller
//! and released with their `_free` function. Every fallible call returns an
//! [`LcStatus`]; the message of the last failure on the calling thread is
//! available from [`lc_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lecollapse::engine::{
    estimate_collapse_time, run_collapse, slip_delta, ChannelProbabilities, RunResult, Sign,
    SlipParams,
};
use lecollapse::io::{load_config, run_experiment, ExperimentConfig};
use lecollapse::Error;

/// Status codes; the nonzero values match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    Io = 1,
    Config = 2,
    Numerical = 3,
    Timeout = 4,
    NullArgument = 5,
    InvalidArgument = 6,
    Panic = 7,
}

/// Opaque validated experiment configuration.
pub struct LcConfig(ExperimentConfig);

/// Opaque result of one absorbed collapse run.
pub struct LcRunResult(RunResult);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let s = CString::new(msg.to_string().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn fail(status: LcStatus, msg: impl ToString) -> LcStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> LcStatus {
    let status = match e.exit_code() {
        2 => LcStatus::Config,
        3 => LcStatus::Numerical,
        4 => LcStatus::Timeout,
        _ => LcStatus::Io,
    };
    fail(status, e)
}

fn guard(f: impl FnOnce() -> LcStatus) -> LcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(LcStatus::Panic, "internal panic"),
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, LcStatus> {
    if p.is_null() {
        return Err(fail(LcStatus::NullArgument, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(LcStatus::InvalidArgument, format!("{name} is not UTF-8")))
}

/// Message of the last failure on this thread, or an empty string. Valid
/// until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lc_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version string"),
        };
    VERSION.as_ptr()
}

/// Parses configuration text. On success `*out` owns a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_config_parse(text: *const c_char, out: *mut *mut LcConfig) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullArgument, "out is null");
        }
        let text = match str_arg(text, "text") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match ExperimentConfig::parse(text) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(LcConfig(c)));
                LcStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// Reads and parses a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_config_load(path: *const c_char, out: *mut *mut LcConfig) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullArgument, "out is null");
        }
        let path = match str_arg(path, "path") {
            Ok(t) => t,
            Err(s) => return s,
        };
        match load_config(path) {
            Ok(c) => {
                *out = Box::into_raw(Box::new(LcConfig(c)));
                LcStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// # Safety
/// `config` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lc_config_free(config: *mut LcConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Writes the 64-character hex configuration hash plus NUL into `buf`,
/// which must hold at least 65 bytes.
///
/// # Safety
/// `config` must be a live handle and `buf` valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn lc_config_hash(
    config: *const LcConfig,
    buf: *mut c_char,
    len: usize,
) -> LcStatus {
    guard(|| {
        if config.is_null() || buf.is_null() {
            return fail(LcStatus::NullArgument, "config or buf is null");
        }
        let hash = (*config).0.hash();
        if len < hash.len() + 1 {
            return fail(
                LcStatus::InvalidArgument,
                format!("buffer of {len} bytes, {} needed", hash.len() + 1),
            );
        }
        ptr::copy_nonoverlapping(hash.as_ptr() as *const c_char, buf, hash.len());
        *buf.add(hash.len()) = 0;
        LcStatus::Ok
    })
}

/// Runs the configured mode into `out_dir` (or the configured directory
/// when null). Outputs and the manifest are written as by the CLI.
///
/// # Safety
/// `config` must be a live handle; `out_dir` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lc_run_experiment(
    config: *const LcConfig,
    out_dir: *const c_char,
) -> LcStatus {
    guard(|| {
        if config.is_null() {
            return fail(LcStatus::NullArgument, "config is null");
        }
        let mut c = (*config).0.clone();
        if !out_dir.is_null() {
            match str_arg(out_dir, "out_dir") {
                Ok(d) => c.out = d.into(),
                Err(s) => return s,
            }
        }
        match run_experiment(&c) {
            Ok(_) => LcStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

/// One collapse trajectory of the configured collapse settings.
/// A run that exhausts its step budget returns `LC_STATUS_TIMEOUT` and no
/// handle.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_run_collapse(
    config: *const LcConfig,
    seed: u64,
    out: *mut *mut LcRunResult,
) -> LcStatus {
    guard(|| {
        if config.is_null() || out.is_null() {
            return fail(LcStatus::NullArgument, "config or out is null");
        }
        match run_collapse(&(*config).0.collapse, seed) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(LcRunResult(r)));
                LcStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}

/// # Safety
/// `result` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lc_run_result_free(result: *mut LcRunResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Zero-based winning channel.
///
/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_run_result_winner(result: *const LcRunResult) -> usize {
    (*result).0.winner
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_run_result_collapse_time(result: *const LcRunResult) -> f64 {
    (*result).0.collapse_time
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_run_result_steps(result: *const LcRunResult) -> usize {
    (*result).0.steps
}

/// # Safety
/// `result` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lc_run_result_slip_count(result: *const LcRunResult) -> u64 {
    (*result).0.slip_count
}

fn slip_params(w: f64, n_a: f64, lambda: f64, tau: f64) -> Result<SlipParams, LcStatus> {
    SlipParams::new(w, n_a, lambda, tau).map_err(|e| from_error(e.into()))
}

/// Probability change of one slip on channel `j` (zero-based) with
/// nominal slip parameters; `sign` is +1 or -1. Writes `k` values to `out`.
///
/// # Safety
/// `p` must hold `k` values and `out` room for `k`.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn lc_slip_delta(
    p: *const f64,
    k: usize,
    j: usize,
    f_j: f64,
    f_0: f64,
    w: f64,
    n_a: f64,
    lambda: f64,
    tau: f64,
    sign: i32,
    out: *mut f64,
) -> LcStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return fail(LcStatus::NullArgument, "p or out is null");
        }
        let sign = match sign {
            1 => Sign::Plus,
            -1 => Sign::Minus,
            s => {
                return fail(
                    LcStatus::InvalidArgument,
                    format!("sign must be +1 or -1, got {s}"),
                )
            }
        };
        if j >= k {
            return fail(
                LcStatus::InvalidArgument,
                format!("channel {j} out of range for K = {k}"),
            );
        }
        let params = match slip_params(w, n_a, lambda, tau) {
            Ok(s) => s,
            Err(s) => return s,
        };
        let probs = match ChannelProbabilities::new(std::slice::from_raw_parts(p, k).to_vec()) {
            Ok(v) => v,
            Err(e) => return from_error(e.into()),
        };
        let d = slip_delta(&probs, j, f_j, f_0, &params, sign);
        ptr::copy_nonoverlapping(d.as_ptr(), out, k);
        LcStatus::Ok
    })
}

/// Collapse time scale for a system of size `l_system`; `delta <= 0`
/// skips the electron-cloud refinement.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_collapse_time(
    w: f64,
    n_a: f64,
    lambda: f64,
    tau: f64,
    l_system: f64,
    delta: f64,
    out: *mut f64,
) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullArgument, "out is null");
        }
        let params = match slip_params(w, n_a, lambda, tau) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match estimate_collapse_time(&params, l_system, (delta > 0.0).then_some(delta)) {
            Ok(t) => {
                *out = t;
                LcStatus::Ok
            }
            Err(e) => from_error(e.into()),
        }
    })
}
