use std::path::Path;
use std::process::{Command, Output};

fn irsmec(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_irsmec"));
    cmd.args(args);
    match seed {
        Some(s) => cmd.env("IRSMEC_SEED", s),
        None => cmd.env_remove("IRSMEC_SEED"),
    };
    cmd.output().unwrap()
}

fn run_csv(dir: &Path, tag: &str, seed: Option<&str>) -> String {
    let out = dir.join(format!("{tag}.csv"));
    let o = irsmec(
        &[
            "run",
            "--config",
            "asymmetric_intensity",
            "--trials",
            "5",
            "--out",
            out.to_str().unwrap(),
        ],
        seed,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out).unwrap()
}

#[test]
fn presets_are_listed_and_shown() {
    let o = irsmec(&["presets", "--list"], None);
    assert!(o.status.success());
    let names = String::from_utf8(o.stdout).unwrap();
    for name in ["symmetric", "symmetric_elements", "asymmetric", "asymmetric_intensity"] {
        assert!(names.lines().any(|l| l == name), "{name} missing");
    }
    let o = irsmec(&["presets", "--show", "symmetric"], None);
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["trials"], 500);
    assert_eq!(irsmec(&["presets", "--show", "nope"], None).status.code(), Some(1));
}

#[test]
fn seed_variable_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let base = run_csv(dir.path(), "base", None);
    let same = run_csv(dir.path(), "same", Some("2024"));
    let other = run_csv(dir.path(), "other", Some("7"));
    assert_eq!(base, same);
    assert_ne!(base, other);
    assert_eq!(base.lines().count(), 1 + 6 * 3);
}

#[test]
fn malformed_seed_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = irsmec(
        &["run", "--config", "symmetric", "--out", out.to_str().unwrap()],
        Some("-3"),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("IRSMEC_SEED"));
    assert!(!out.exists());
}

#[test]
fn missing_config_file_is_exit_3() {
    let o = irsmec(
        &["run", "--config", "no/such/file.json", "--out", "/tmp/unused.csv"],
        None,
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn malformed_config_is_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"geometry\": 3}").unwrap();
    let o = irsmec(
        &["run", "--config", path.to_str().unwrap(), "--out", "/tmp/unused.csv"],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invalid_config_reports_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let text = irsmec::sim::preset("symmetric")
        .unwrap()
        .replace("\"phase_levels\": 4", "\"phase_levels\": 64");
    let path = dir.path().join("big.json");
    std::fs::write(&path, text).unwrap();
    let o = irsmec(
        &[
            "run",
            "--config",
            path.to_str().unwrap(),
            "--out",
            dir.path().join("o.csv").to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("solver_mode"));
}

#[test]
fn unwritable_output_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("missing").join("o.csv");
    let o = irsmec(
        &[
            "run",
            "--config",
            "symmetric",
            "--trials",
            "1",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn json_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let o = irsmec(
        &[
            "run",
            "--config",
            "symmetric",
            "--trials",
            "2",
            "--format",
            "json",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success());
    let rows: Vec<irsmec::sim::ResultRow> = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(rows.len(), 36);
    assert!(rows.iter().all(|r| r.trials == 2));
}

#[test]
fn certify_prints_one_line_per_suite() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = irsmec(
        &[
            "certify",
            "--config",
            "symmetric",
            "--instances",
            "20",
            "--out",
            report.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(
        irsmec(&["certify", "--config", "symmetric", "--instances", "0"], None)
            .status
            .code(),
        Some(1)
    );
}
