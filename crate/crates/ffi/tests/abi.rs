use std::ffi::{CStr, CString};
use std::ptr;

use irsmec_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(irsmec_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn small_config() -> *mut IrsmecConfig {
    let name = CString::new("symmetric").unwrap();
    let mut config = ptr::null_mut();
    assert_eq!(
        unsafe { irsmec_config_load(name.as_ptr(), &mut config) },
        IrsmecStatus::Ok
    );
    assert_eq!(unsafe { irsmec_config_set_trials(config, 4) }, IrsmecStatus::Ok);
    config
}

fn csv_of(results: *const IrsmecResults) -> String {
    let mut needed = 0usize;
    let status = unsafe { irsmec_results_to_csv(results, ptr::null_mut(), 0, &mut needed) };
    assert_eq!(status, IrsmecStatus::BufferTooSmall);
    let mut buf = vec![0 as std::ffi::c_char; needed];
    let status = unsafe { irsmec_results_to_csv(results, buf.as_mut_ptr(), buf.len(), &mut needed) };
    assert_eq!(status, IrsmecStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_string()
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(irsmec_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn run_and_read_rows() {
    let config = small_config();
    let mut results = ptr::null_mut();
    assert_eq!(unsafe { irsmec_run(config, &mut results) }, IrsmecStatus::Ok);
    let n = unsafe { irsmec_results_len(results) };
    assert_eq!(n, 36);
    let mut row = IrsmecRow::default();
    assert_eq!(unsafe { irsmec_results_row(results, 0, &mut row) }, IrsmecStatus::Ok);
    assert!(row.has_sweep_value);
    assert_eq!(row.sweep_value, 0.5e6);
    assert_eq!(row.trials, 4);
    assert!(row.mean_delay_s > 0.0);
    let scheme = unsafe { CStr::from_ptr(irsmec_results_scheme(results, 0)) };
    assert_eq!(scheme.to_str().unwrap(), "timeshare");
    assert!(unsafe { irsmec_results_scheme(results, n) }.is_null());
    assert_eq!(
        unsafe { irsmec_results_row(results, n, &mut row) },
        IrsmecStatus::InvalidArgument
    );
    assert!(last_error().contains("out of range"));

    let text = csv_of(results);
    assert!(text.starts_with("sweep_value,scheme,mean_delay_s"));
    assert_eq!(text.lines().count(), n + 1);
    unsafe {
        irsmec_results_free(results);
        irsmec_config_free(config);
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let config = small_config();
    let mut outputs = Vec::new();
    for workers in [1, 4] {
        assert_eq!(unsafe { irsmec_config_set_workers(config, workers) }, IrsmecStatus::Ok);
        let mut results = ptr::null_mut();
        assert_eq!(unsafe { irsmec_run(config, &mut results) }, IrsmecStatus::Ok);
        outputs.push(csv_of(results));
        unsafe { irsmec_results_free(results) };
    }
    assert_eq!(outputs[0], outputs[1]);
    unsafe { irsmec_config_free(config) };
}

#[test]
fn results_are_written_to_disk() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config();
    let mut results = ptr::null_mut();
    assert_eq!(unsafe { irsmec_run(config, &mut results) }, IrsmecStatus::Ok);
    let path = dir.path().join("rows.json");
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { irsmec_results_write(results, c_path.as_ptr(), IrsmecFormat::Json) },
        IrsmecStatus::Ok
    );
    assert!(std::fs::read_to_string(&path).unwrap().trim_start().starts_with('['));
    let bad = CString::new(dir.path().join("no/such/dir.csv").to_str().unwrap()).unwrap();
    assert_eq!(
        unsafe { irsmec_results_write(results, bad.as_ptr(), IrsmecFormat::Csv) },
        IrsmecStatus::Io
    );
    unsafe {
        irsmec_results_free(results);
        irsmec_config_free(config);
    }
}

#[test]
fn bad_inputs_map_to_status_codes() {
    let mut config = ptr::null_mut();
    assert_eq!(
        unsafe { irsmec_config_from_json(ptr::null(), &mut config) },
        IrsmecStatus::NullPointer
    );
    assert!(config.is_null());
    assert!(last_error().contains("json"));

    let preset = irsmec::sim::preset("symmetric")
        .unwrap()
        .replace("\"trials\": 500", "\"trials\": 0");
    let text = CString::new(preset).unwrap();
    assert_eq!(
        unsafe { irsmec_config_from_json(text.as_ptr(), &mut config) },
        IrsmecStatus::Config
    );
    assert!(config.is_null());
    assert!(last_error().contains("trials"));

    let invalid = [0xffu8 as std::ffi::c_char, 0];
    assert_eq!(
        unsafe { irsmec_config_load(invalid.as_ptr(), &mut config) },
        IrsmecStatus::InvalidUtf8
    );

    let config = small_config();
    assert_eq!(
        unsafe { irsmec_config_set_trials(config, 0) },
        IrsmecStatus::InvalidArgument
    );
    assert_eq!(unsafe { irsmec_certify(config, 0) }, IrsmecStatus::InvalidArgument);
    assert_eq!(
        unsafe { irsmec_run(config, ptr::null_mut()) },
        IrsmecStatus::NullPointer
    );
    unsafe {
        irsmec_config_free(config);
        irsmec_config_free(ptr::null_mut());
        irsmec_results_free(ptr::null_mut());
    }
    assert_eq!(unsafe { irsmec_results_len(ptr::null()) }, 0);
}

#[test]
fn successful_call_clears_the_error() {
    let mut config = ptr::null_mut();
    unsafe { irsmec_config_load(ptr::null(), &mut config) };
    assert!(!last_error().is_empty());
    let config = small_config();
    assert_eq!(last_error(), "");
    unsafe { irsmec_config_free(config) };
}

#[test]
fn certification_passes_on_a_few_instances() {
    let config = small_config();
    assert_eq!(unsafe { irsmec_certify(config, 5) }, IrsmecStatus::Ok);
    unsafe { irsmec_config_free(config) };
}

#[test]
fn closed_forms_match_hand_values() {
    // positive priority: both users share the NOMA slot until user 1 is done
    let bits = [1e6, 2e6];
    let rates = IrsmecRates {
        td: [2e6, 2e6],
        no: [1.5e6, 1.5e6],
    };
    let mut out = IrsmecDivision::default();
    assert_eq!(
        unsafe { irsmec_time_division_infinite(bits.as_ptr(), &rates, &mut out) },
        IrsmecStatus::Ok
    );
    assert_eq!(out.lambda, 0.5);
    assert!((out.t_no - 1.0 / 1.5).abs() < 1e-15);
    assert_eq!(out.t_td_first, 0.0);
    assert!((out.t_td_second - 0.5).abs() < 1e-15);
    assert!((out.sum_delay - (1.5 - 0.5 / 1.5)).abs() < 1e-12);

    // first user's computing covers the second solo upload: pure TDMA
    let compute = [2.0, 0.1];
    assert_eq!(
        unsafe { irsmec_time_division_finite(bits.as_ptr(), &rates, compute.as_ptr(), &mut out) },
        IrsmecStatus::Ok
    );
    assert_eq!((out.t_td_first, out.t_no, out.t_td_second), (0.5, 0.0, 1.0));
    assert!((out.sum_delay - 2.6).abs() < 1e-12);

    let zero = IrsmecRates {
        td: [0.0, 1e6],
        no: [0.0, 0.0],
    };
    let status = unsafe { irsmec_time_division_infinite(bits.as_ptr(), &zero, &mut out) };
    assert_ne!(status, IrsmecStatus::Ok);
    assert_eq!(
        unsafe { irsmec_time_division_infinite(ptr::null(), &rates, &mut out) },
        IrsmecStatus::NullPointer
    );
}

#[test]
fn compute_time_is_exact() {
    assert_eq!(irsmec_task_compute_time(1e6, 300.0, 5e9), 0.06);
    assert_eq!(irsmec_task_compute_time(1e6, 300.0, f64::INFINITY), 0.0);
}
