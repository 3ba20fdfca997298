//! C ABI over the `irsmec` crate.
//!
//! Every fallible entry point returns an [`IrsmecStatus`]. On failure the
//! message is kept per thread and can be read with [`irsmec_last_error`].
//! Handles are opaque and must be released with their `_free` function.
//! Panics never cross the boundary; they surface as `IRSMEC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use irsmec::rate::{RateTuple, UserOrder};
use irsmec::scheduler::{task_compute_time, time_division_finite, time_division_infinite, TimeDivision};
use irsmec::sim::{self, OutputFormat, ResultRow, ScenarioConfig};
use irsmec::Error;

/// Outcome of an FFI call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrsmecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Domain = 4,
    ZeroTdmaRate = 5,
    BudgetExceeded = 6,
    Inconsistent = 7,
    Config = 8,
    Io = 9,
    Serialization = 10,
    BufferTooSmall = 11,
    /// The certification ran but at least one suite failed.
    CertificationFailed = 12,
    Panic = 99,
}

/// Output format of [`irsmec_results_write`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IrsmecFormat {
    Csv = 0,
    Json = 1,
}

/// Opaque scenario configuration.
pub struct IrsmecConfig(ScenarioConfig);

/// Opaque table of aggregated result rows.
pub struct IrsmecResults {
    rows: Vec<ResultRow>,
    schemes: Vec<CString>,
}

/// Per-user rates in bits/s, positional in scheduling order.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct IrsmecRates {
    pub td: [f64; 2],
    pub no: [f64; 2],
}

/// Time division with its NOMA priority and sum delay, in seconds.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct IrsmecDivision {
    pub t_td_first: f64,
    pub t_no: f64,
    pub t_td_second: f64,
    pub lambda: f64,
    pub sum_delay: f64,
}

/// One aggregated row. The scheme name is read with
/// [`irsmec_results_scheme`].
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct IrsmecRow {
    /// False when the scenario has no sweep; `sweep_value` is then NaN.
    pub has_sweep_value: bool,
    pub sweep_value: f64,
    pub mean_delay_s: f64,
    pub stderr_s: f64,
    pub mean_tno_fraction: f64,
    pub trials: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn status_of(error: &Error) -> IrsmecStatus {
    match error {
        Error::Domain(_) => IrsmecStatus::Domain,
        Error::DimensionMismatch { .. } => IrsmecStatus::InvalidArgument,
        Error::ZeroTdmaRate { .. } => IrsmecStatus::ZeroTdmaRate,
        Error::BudgetExceeded { .. } => IrsmecStatus::BudgetExceeded,
        Error::Inconsistent { .. } => IrsmecStatus::Inconsistent,
        Error::Config { .. } => IrsmecStatus::Config,
        Error::Io { .. } => IrsmecStatus::Io,
        Error::Serialization(_) => IrsmecStatus::Serialization,
    }
}

struct Failure(IrsmecStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(IrsmecStatus::NullPointer, format!("{name} is null"))
}

/// Runs `body`, records any failure and converts panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> IrsmecStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            IrsmecStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {message}"));
            IrsmecStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(IrsmecStatus::InvalidUtf8, format!("{name} is not valid UTF-8")))
}

unsafe fn read_ref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn read_mut<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(name))
}

fn to_rate_tuple(r: &IrsmecRates) -> RateTuple {
    RateTuple {
        td: r.td,
        no: r.no,
        decoding_order: UserOrder::Forward,
    }
}

fn to_division(d: TimeDivision, lambda: f64, sum_delay: f64) -> IrsmecDivision {
    IrsmecDivision {
        t_td_first: d.t_td_first,
        t_no: d.t_no,
        t_td_second: d.t_td_second,
        lambda,
        sum_delay,
    }
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn irsmec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn irsmec_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a scenario from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irsmec_config_from_json(json: *const c_char, out: *mut *mut IrsmecConfig) -> IrsmecStatus {
    guard(|| {
        let out = read_mut(out, "out")?;
        *out = ptr::null_mut();
        let text = read_str(json, "json")?;
        let config = ScenarioConfig::from_json(text, "<ffi>")?;
        config.validate()?;
        *out = Box::into_raw(Box::new(IrsmecConfig(config)));
        Ok(())
    })
}

/// Loads a scenario from a JSON file path or a shipped preset name.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irsmec_config_load(source: *const c_char, out: *mut *mut IrsmecConfig) -> IrsmecStatus {
    guard(|| {
        let out = read_mut(out, "out")?;
        *out = ptr::null_mut();
        let config = ScenarioConfig::load(read_str(source, "source")?)?;
        *out = Box::into_raw(Box::new(IrsmecConfig(config)));
        Ok(())
    })
}

/// Releases a configuration. Null is ignored.
///
/// # Safety
/// `config` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn irsmec_config_free(config: *mut IrsmecConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Overrides the seed.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn irsmec_config_set_seed(config: *mut IrsmecConfig, seed: u64) -> IrsmecStatus {
    guard(|| {
        read_mut(config, "config")?.0.seed = seed;
        Ok(())
    })
}

/// Overrides the number of trials per sweep point (at least 1).
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn irsmec_config_set_trials(config: *mut IrsmecConfig, trials: usize) -> IrsmecStatus {
    guard(|| {
        let config = read_mut(config, "config")?;
        if trials == 0 {
            return Err(Failure(IrsmecStatus::InvalidArgument, "trials must be >= 1".into()));
        }
        config.0.trials = trials;
        Ok(())
    })
}

/// Sets the worker thread count; 0 picks the number of cores.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn irsmec_config_set_workers(config: *mut IrsmecConfig, workers: usize) -> IrsmecStatus {
    guard(|| {
        read_mut(config, "config")?.0.workers = (workers > 0).then_some(workers);
        Ok(())
    })
}

/// Runs the Monte-Carlo experiment of `config`.
///
/// # Safety
/// `config` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irsmec_run(config: *const IrsmecConfig, out: *mut *mut IrsmecResults) -> IrsmecStatus {
    guard(|| {
        let out = read_mut(out, "out")?;
        *out = ptr::null_mut();
        let rows = sim::run_experiment(&read_ref(config, "config")?.0)?;
        let schemes = rows
            .iter()
            .map(|r| CString::new(r.scheme.as_str()).unwrap_or_default())
            .collect();
        *out = Box::into_raw(Box::new(IrsmecResults { rows, schemes }));
        Ok(())
    })
}

/// Releases a result table. Null is ignored.
///
/// # Safety
/// `results` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn irsmec_results_free(results: *mut IrsmecResults) {
    if !results.is_null() {
        drop(Box::from_raw(results));
    }
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `results` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn irsmec_results_len(results: *const IrsmecResults) -> usize {
    results.as_ref().map_or(0, |r| r.rows.len())
}

/// Copies row `index` into `out`.
///
/// # Safety
/// `results` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irsmec_results_row(
    results: *const IrsmecResults,
    index: usize,
    out: *mut IrsmecRow,
) -> IrsmecStatus {
    guard(|| {
        let results = read_ref(results, "results")?;
        let out = read_mut(out, "out")?;
        let row = results.rows.get(index).ok_or_else(|| {
            Failure(
                IrsmecStatus::InvalidArgument,
                format!("row {index} out of range ({} rows)", results.rows.len()),
            )
        })?;
        *out = IrsmecRow {
            has_sweep_value: row.sweep_value.is_some(),
            sweep_value: row.sweep_value.unwrap_or(f64::NAN),
            mean_delay_s: row.mean_delay_s,
            stderr_s: row.stderr_s,
            mean_tno_fraction: row.mean_tno_fraction,
            trials: row.trials,
        };
        Ok(())
    })
}

/// Scheme name of row `index`, or null when out of range. Owned by the
/// handle.
///
/// # Safety
/// `results` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn irsmec_results_scheme(results: *const IrsmecResults, index: usize) -> *const c_char {
    results
        .as_ref()
        .and_then(|r| r.schemes.get(index))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// Renders the table as CSV into `buffer`.
///
/// `*needed` receives the size including the terminating NUL. When
/// `capacity` is too small nothing is written and `BufferTooSmall` is
/// returned, so a null buffer with zero capacity queries the size.
///
/// # Safety
/// `buffer` must hold `capacity` bytes (or be null with zero capacity) and
/// `needed` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn irsmec_results_to_csv(
    results: *const IrsmecResults,
    buffer: *mut c_char,
    capacity: usize,
    needed: *mut usize,
) -> IrsmecStatus {
    guard(|| {
        let results = read_ref(results, "results")?;
        let needed = read_mut(needed, "needed")?;
        let mut text = Vec::new();
        sim::write_csv(&results.rows, &mut text)?;
        *needed = text.len() + 1;
        if capacity < text.len() + 1 {
            return Err(Failure(
                IrsmecStatus::BufferTooSmall,
                format!("buffer holds {capacity} bytes, {} needed", text.len() + 1),
            ));
        }
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(text.as_ptr(), buffer.cast::<u8>(), text.len());
        *buffer.add(text.len()) = 0;
        Ok(())
    })
}

/// Writes the table to `path`.
///
/// # Safety
/// `results` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn irsmec_results_write(
    results: *const IrsmecResults,
    path: *const c_char,
    format: IrsmecFormat,
) -> IrsmecStatus {
    guard(|| {
        let results = read_ref(results, "results")?;
        let path = Path::new(read_str(path, "path")?);
        let format = match format {
            IrsmecFormat::Csv => OutputFormat::Csv,
            IrsmecFormat::Json => OutputFormat::Json,
        };
        sim::emit_results(&results.rows, format, path)?;
        Ok(())
    })
}

/// Runs the oracle certification with `instances` samples per suite.
/// Returns `CertificationFailed` when any suite fails.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn irsmec_certify(config: *const IrsmecConfig, instances: usize) -> IrsmecStatus {
    guard(|| {
        let config = read_ref(config, "config")?;
        if instances == 0 {
            return Err(Failure(IrsmecStatus::InvalidArgument, "instances must be >= 1".into()));
        }
        let report = sim::certify(&config.0, instances)?;
        if report.passed {
            Ok(())
        } else {
            Err(Failure(IrsmecStatus::CertificationFailed, report.to_string()))
        }
    })
}

/// Optimal time division with unlimited cloud capacity.
///
/// # Safety
/// `bits` must point to two doubles; `rates` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn irsmec_time_division_infinite(
    bits: *const f64,
    rates: *const IrsmecRates,
    out: *mut IrsmecDivision,
) -> IrsmecStatus {
    guard(|| {
        let bits = *read_ref(bits.cast::<[f64; 2]>(), "bits")?;
        let rates = to_rate_tuple(read_ref(rates, "rates")?);
        let out = read_mut(out, "out")?;
        let s = time_division_infinite(bits, &rates)?;
        *out = to_division(s.division, s.lambda, s.sum_delay);
        Ok(())
    })
}

/// Optimal time division with finite cloud capacity; `compute_times` are
/// the cloud computing times in scheduling order.
///
/// # Safety
/// `bits` and `compute_times` must point to two doubles each; `rates` and
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn irsmec_time_division_finite(
    bits: *const f64,
    rates: *const IrsmecRates,
    compute_times: *const f64,
    out: *mut IrsmecDivision,
) -> IrsmecStatus {
    guard(|| {
        let bits = *read_ref(bits.cast::<[f64; 2]>(), "bits")?;
        let compute = *read_ref(compute_times.cast::<[f64; 2]>(), "compute_times")?;
        let rates = to_rate_tuple(read_ref(rates, "rates")?);
        let out = read_mut(out, "out")?;
        let s = time_division_finite(bits, &rates, compute)?;
        *out = to_division(s.division, s.lambda, s.sum_delay);
        Ok(())
    })
}

/// Cloud computing time of a task in seconds; infinite frequency gives 0.
#[no_mangle]
pub extern "C" fn irsmec_task_compute_time(bits: f64, cycles_per_bit: f64, cloud_freq_hz: f64) -> f64 {
    task_compute_time(bits, cycles_per_bit, cloud_freq_hz)
}
