//! C interface. Every function returns an [`MtlStatus`]; on failure a
//! description is available from `mtl_last_error` on the same thread.
//! Handles are opaque and must be released with their `_free` function;
//! strings returned through out-parameters are released with
//! `mtl_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::time::Duration;

use mtl_synth::monitor::{check_alphabet, intervals, is_g_sep};
use mtl_synth::rational::{format_rational, parse_rational, Rational};
use mtl_synth::separability::is_k_infix_separable;
use mtl_synth::solver::ExternalSolver;
use mtl_synth::synth::{synthesize, Outcome, SynthConfig};
use mtl_synth::{parse, Formula, Sample};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidSample = 3,
    InvalidFormula = 4,
    InvalidArgument = 5,
    /// The sample admits no formula within the lookahead bound.
    NoSolution = 6,
    /// The size cap was reached or the solver gave up.
    Aborted = 7,
    SolverError = 8,
    /// A Rust panic was caught at the boundary.
    Internal = 9,
}

/// Parsed, validated sample.
pub struct MtlSample(Sample);

/// Formula in negation normal form.
pub struct MtlFormula(Formula);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

type FfiResult<T> = Result<T, (MtlStatus, String)>;

fn guard(f: impl FnOnce() -> FfiResult<MtlStatus>) -> MtlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal error");
            MtlStatus::Internal
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err((MtlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (MtlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_ref<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| (MtlStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err((MtlStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s).map(CString::into_raw).map_err(|_| (MtlStatus::Internal, "string contains NUL".into()))
}

unsafe fn read_bound(p: *const c_char) -> FfiResult<Rational> {
    let text = read_str(p, "bound")?;
    parse_rational(text).map_err(|e| (MtlStatus::InvalidArgument, e.to_string()))
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mtl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mtl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a sample from its JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtl_sample_from_json(json: *const c_char, out: *mut *mut MtlSample) -> MtlStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let sample = Sample::from_json(text).map_err(|e| (MtlStatus::InvalidSample, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(MtlSample(sample))))?;
        Ok(MtlStatus::Ok)
    })
}

/// # Safety
/// `sample` must be null or a handle from `mtl_sample_from_json`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mtl_sample_free(sample: *mut MtlSample) {
    if !sample.is_null() {
        drop(Box::from_raw(sample));
    }
}

/// Number of prefixes, positives first.
///
/// # Safety
/// `sample` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtl_sample_len(sample: *const MtlSample, out: *mut usize) -> MtlStatus {
    guard(|| {
        let s = read_ref(sample, "sample")?;
        write_out(out, s.0.len())?;
        Ok(MtlStatus::Ok)
    })
}

/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtl_formula_parse(text: *const c_char, out: *mut *mut MtlFormula) -> MtlStatus {
    guard(|| {
        let text = read_str(text, "formula")?;
        let f = parse(text).map_err(|e| (MtlStatus::InvalidFormula, e.to_string()))?;
        write_out(out, Box::into_raw(Box::new(MtlFormula(f))))?;
        Ok(MtlStatus::Ok)
    })
}

/// # Safety
/// `formula` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mtl_formula_free(formula: *mut MtlFormula) {
    if !formula.is_null() {
        drop(Box::from_raw(formula));
    }
}

/// Canonical text of the formula; free with `mtl_string_free`.
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtl_formula_to_string(formula: *const MtlFormula, out: *mut *mut c_char) -> MtlStatus {
    guard(|| {
        let f = read_ref(formula, "formula")?;
        write_out(out, c_string(f.0.to_string())?)?;
        Ok(MtlStatus::Ok)
    })
}

/// Number of distinct subformulas.
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtl_formula_size(formula: *const MtlFormula, out: *mut usize) -> MtlStatus {
    guard(|| {
        let f = read_ref(formula, "formula")?;
        write_out(out, f.0.size())?;
        Ok(MtlStatus::Ok)
    })
}

/// Future reach as an exact rational string such as `5/2`; free with
/// `mtl_string_free`.
///
/// # Safety
/// `formula` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtl_formula_future_reach(formula: *const MtlFormula, out: *mut *mut c_char) -> MtlStatus {
    guard(|| {
        let f = read_ref(formula, "formula")?;
        write_out(out, c_string(format_rational(&f.0.future_reach()))?)?;
        Ok(MtlStatus::Ok)
    })
}

/// Whether the formula holds everywhere on every positive prefix and fails
/// somewhere on every negative one.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtl_check(sample: *const MtlSample, formula: *const MtlFormula, out: *mut bool) -> MtlStatus {
    guard(|| {
        let s = read_ref(sample, "sample")?;
        let f = read_ref(formula, "formula")?;
        let verdict = is_g_sep(&f.0, &s.0).map_err(|e| (MtlStatus::InvalidFormula, e.to_string()))?;
        write_out(out, verdict.is_separating())?;
        Ok(MtlStatus::Ok)
    })
}

/// Satisfaction intervals of the formula on one prefix (positives first),
/// as text like `{[0,4),[5,6)}`; free with `mtl_string_free`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mtl_monitor(
    sample: *const MtlSample,
    formula: *const MtlFormula,
    prefix_index: usize,
    out: *mut *mut c_char,
) -> MtlStatus {
    guard(|| {
        let s = read_ref(sample, "sample")?;
        let f = read_ref(formula, "formula")?;
        check_alphabet(&f.0, &s.0).map_err(|e| (MtlStatus::InvalidFormula, e.to_string()))?;
        let (_, x) = s.0.prefixes().nth(prefix_index).ok_or_else(|| {
            (MtlStatus::InvalidArgument, format!("prefix index {prefix_index} out of range ({} prefixes)", s.0.len()))
        })?;
        write_out(out, c_string(intervals(&f.0, x).to_string())?)?;
        Ok(MtlStatus::Ok)
    })
}

/// Whether some formula with future reach at most `fr_bound` (a rational
/// string) separates the sample.
///
/// # Safety
/// `sample` must be live, `fr_bound` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mtl_is_separable(sample: *const MtlSample, fr_bound: *const c_char, out: *mut bool) -> MtlStatus {
    guard(|| {
        let s = read_ref(sample, "sample")?;
        let k = read_bound(fr_bound)?;
        let report = is_k_infix_separable(&s.0, &k).map_err(|e| (MtlStatus::InvalidArgument, e.to_string()))?;
        write_out(out, report.is_separable())?;
        Ok(MtlStatus::Ok)
    })
}

/// Finds a smallest separating formula with future reach at most
/// `fr_bound`. `solver` may be null to use the default solver;
/// `timeout_secs <= 0` disables the per-query timeout. On `MTL_STATUS_OK`,
/// `*out` receives a formula handle.
///
/// # Safety
/// `sample` must be live, strings NUL-terminated (or `solver` null), `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mtl_synthesize(
    sample: *const MtlSample,
    fr_bound: *const c_char,
    max_size: usize,
    timeout_secs: c_double,
    solver: *const c_char,
    out: *mut *mut MtlFormula,
) -> MtlStatus {
    guard(|| {
        let s = read_ref(sample, "sample")?;
        let k = read_bound(fr_bound)?;
        if out.is_null() {
            return Err((MtlStatus::NullPointer, "output pointer is null".into()));
        }
        let mut backend = if solver.is_null() {
            ExternalSolver::from_env()
        } else {
            ExternalSolver::new(PathBuf::from(read_str(solver, "solver")?))
        };
        let timeout = (timeout_secs > 0.0)
            .then(|| Duration::try_from_secs_f64(timeout_secs))
            .transpose()
            .map_err(|e| (MtlStatus::InvalidArgument, e.to_string()))?;
        let config = SynthConfig { max_size, timeout };
        let outcome = synthesize(&s.0, &k, &config, &mut backend).map_err(|e| {
            let status = match e {
                mtl_synth::synth::SynthError::BadMaxSize | mtl_synth::synth::SynthError::Separability(_) => {
                    MtlStatus::InvalidArgument
                }
                _ => MtlStatus::SolverError,
            };
            (status, e.to_string())
        })?;
        match outcome {
            Outcome::Found { formula, .. } => {
                write_out(out, Box::into_raw(Box::new(MtlFormula(formula))))?;
                Ok(MtlStatus::Ok)
            }
            Outcome::NoSolution { .. } => Err((MtlStatus::NoSolution, "not K-infix-separable".into())),
            Outcome::Aborted { reason, .. } => Err((MtlStatus::Aborted, reason)),
        }
    })
}
