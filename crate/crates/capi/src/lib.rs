//! C ABI for the Frank-Wolfe experiment runner.
//!
//! A run is created from a config file and held behind an opaque handle;
//! records are copied out as flat structs. Every entry point returns an
//! [`FwStatus`]; on error, [`fw_last_error`] exposes a thread-local
//! message valid until the next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use frankwolfe::experiment::{run_experiment, ExperimentOutcome};
use frankwolfe::{parse_config, Error};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error message").unwrap());
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Status codes mirroring the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FwStatus {
    Ok = 0,
    BoundViolation = 1,
    UsageError = 2,
    NumericError = 3,
}

impl From<&Error> for FwStatus {
    fn from(e: &Error) -> FwStatus {
        match e.exit_code() {
            3 => FwStatus::NumericError,
            _ => FwStatus::UsageError,
        }
    }
}

/// Opaque handle to a completed experiment run.
pub struct FwRun {
    outcome: ExperimentOutcome,
}

/// One iteration record, flattened. `has_bounds` is 0 when no exact h0
/// was available; the two `*_rhs` fields are then 0.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FwRecord {
    pub t: u64,
    pub f: f64,
    pub gap: f64,
    pub min_gap: f64,
    pub gamma: f64,
    pub decrease_bound: f64,
    pub theorem_rhs: f64,
    pub refined_rhs: f64,
    pub has_bounds: u8,
}

/// Last error message for this thread, or null. Owned by the library;
/// do not free.
#[no_mangle]
pub extern "C" fn fw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map(|c| c.as_ptr())
            .unwrap_or(ptr::null())
    })
}

/// Run an experiment from a config file. On success stores a handle in
/// `out`; the caller owns it and must release it with [`fw_run_free`].
///
/// # Safety
/// `config_path` must be a valid NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn fw_run_config_file(
    config_path: *const c_char,
    out: *mut *mut FwRun,
) -> FwStatus {
    if config_path.is_null() || out.is_null() {
        set_last_error("null pointer argument".into());
        return FwStatus::UsageError;
    }
    let path = match CStr::from_ptr(config_path).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_last_error("config path is not valid UTF-8".into());
            return FwStatus::UsageError;
        }
    };
    let result = std::fs::read_to_string(Path::new(path))
        .map_err(|source| Error::Io {
            path: path.to_string(),
            source,
        })
        .and_then(|text| parse_config(&text))
        .and_then(|cfg| run_experiment(&cfg, None));
    match result {
        Ok(outcome) => {
            *out = Box::into_raw(Box::new(FwRun { outcome }));
            FwStatus::Ok
        }
        Err(e) => {
            let status = FwStatus::from(&e);
            set_last_error(e.to_string());
            status
        }
    }
}

/// Number of recorded iterations.
///
/// # Safety
/// `run` must be a live handle from [`fw_run_config_file`].
#[no_mangle]
pub unsafe extern "C" fn fw_run_num_records(run: *const FwRun) -> u64 {
    if run.is_null() {
        return 0;
    }
    (*run).outcome.trace.records.len() as u64
}

/// Copy record `idx` into `record`.
///
/// # Safety
/// `run` must be a live handle and `record` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fw_run_record(
    run: *const FwRun,
    idx: u64,
    record: *mut FwRecord,
) -> FwStatus {
    if run.is_null() || record.is_null() {
        set_last_error("null pointer argument".into());
        return FwStatus::UsageError;
    }
    let records = &(*run).outcome.trace.records;
    let Some(r) = records.get(idx as usize) else {
        set_last_error(format!(
            "record index {idx} out of range (have {})",
            records.len()
        ));
        return FwStatus::UsageError;
    };
    *record = FwRecord {
        t: r.t as u64,
        f: r.f_value,
        gap: r.gap,
        min_gap: r.min_gap,
        gamma: r.gamma,
        decrease_bound: r.decrease_bound,
        theorem_rhs: r.theorem_rhs.unwrap_or(0.0),
        refined_rhs: r.refined_rhs.unwrap_or(0.0),
        has_bounds: u8::from(r.theorem_rhs.is_some()),
    };
    FwStatus::Ok
}

/// Whether the run stopped at the gap threshold before the iteration
/// budget.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fw_run_terminated_early(run: *const FwRun) -> u8 {
    if run.is_null() {
        return 0;
    }
    u8::from((*run).outcome.trace.terminated_early)
}

/// Number of failed bound checks on this run.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fw_run_check_failures(run: *const FwRun) -> u64 {
    if run.is_null() {
        return 0;
    }
    (*run).outcome.report.failures() as u64
}

/// The curvature constant the run was checked against.
///
/// # Safety
/// `run` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fw_run_curvature_c(run: *const FwRun) -> f64 {
    if run.is_null() {
        return f64::NAN;
    }
    (*run).outcome.curvature_c
}

/// Release a run handle. Null is a no-op.
///
/// # Safety
/// `run` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fw_run_free(run: *mut FwRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;
    use std::io::Write;

    const CONFIG: &str = "\
objective.kind = diagonal_quadratic
objective.diag = [1, -1]
domain.kind = box
domain.lo = [-1, -1]
domain.hi = [1, 1]
solver.step_rule = quad_bound
solver.epsilon = 0
solver.max_iters = 50
";

    #[test]
    fn end_to_end_through_the_c_abi() {
        let mut file = tempfile_path("fwcapi_ok.cfg");
        write!(file.1, "{CONFIG}").unwrap();
        let path = CString::new(file.0.to_str().unwrap()).unwrap();

        let mut run: *mut FwRun = ptr::null_mut();
        let status = unsafe { fw_run_config_file(path.as_ptr(), &mut run) };
        assert_eq!(status, FwStatus::Ok);
        assert!(!run.is_null());

        unsafe {
            let n = fw_run_num_records(run);
            assert_eq!(n, 51);
            assert_eq!(fw_run_check_failures(run), 0);
            assert!(fw_run_curvature_c(run) > 0.0);

            let mut rec = std::mem::zeroed::<FwRecord>();
            assert_eq!(fw_run_record(run, 0, &mut rec), FwStatus::Ok);
            assert_eq!(rec.t, 0);
            assert_eq!(rec.has_bounds, 1);
            assert!(rec.min_gap <= rec.theorem_rhs + 1e-9);

            assert_eq!(
                fw_run_record(run, n, &mut rec),
                FwStatus::UsageError
            );
            assert!(!fw_last_error().is_null());

            fw_run_free(run);
        }
        std::fs::remove_file(file.0).ok();
    }

    #[test]
    fn bad_config_reports_usage_error() {
        let mut file = tempfile_path("fwcapi_bad.cfg");
        write!(file.1, "objective.kind = nonsense\n").unwrap();
        let path = CString::new(file.0.to_str().unwrap()).unwrap();
        let mut run: *mut FwRun = ptr::null_mut();
        let status = unsafe { fw_run_config_file(path.as_ptr(), &mut run) };
        assert_eq!(status, FwStatus::UsageError);
        assert!(run.is_null());
        let msg = unsafe { CStr::from_ptr(fw_last_error()) };
        assert!(msg.to_str().unwrap().contains("objective"));
        std::fs::remove_file(file.0).ok();
    }

    fn tempfile_path(name: &str) -> (std::path::PathBuf, std::fs::File) {
        let path = std::env::temp_dir().join(format!("{}_{name}", std::process::id()));
        let file = std::fs::File::create(&path).unwrap();
        (path, file)
    }
}
