use std::process::{Command, Output};

fn radlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radlab")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn verify_passes_and_writes_json_to_stdout() {
    let o = radlab(&["verify", "--suite", "eq2_kittaneh,buzano", "--dims", "2..3", "--trials", "20"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["summary"]["status"], "pass");
    assert_eq!(report["suites"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_writes_csv_by_extension() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let o = radlab(&["verify", "--suite", "th2", "--dims", "2", "--trials", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("id,kind,trials"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn bad_input_exits_with_two() {
    assert_eq!(code(&radlab(&["verify", "--suite", "no_such_bound"])), 2);
    assert_eq!(code(&radlab(&["verify", "--dims", "1..3"])), 2);
    assert_eq!(code(&radlab(&["verify", "--tol", "-1"])), 2);
    assert_eq!(code(&radlab(&["search", "--bound", "th4", "--alpha", "2"])), 2);
    assert_eq!(code(&radlab(&["fov", "--matrix", "/nonexistent.json", "--out", "/tmp/x.csv"])), 2);
    assert_eq!(code(&radlab(&["frobnicate"])), 2);
    assert_eq!(code(&radlab(&["--help"])), 0);
}

#[test]
fn search_reports_min_slack() {
    let o = radlab(&["search", "--bound", "eq2_kittaneh", "--dim", "2", "--iters", "300"]);
    assert_eq!(code(&o), 0);
    let result: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let slack = result["min_slack"].as_f64().unwrap();
    assert!((0.0..0.1).contains(&slack), "{slack}");
    let o = radlab(&["search", "--bound", "kant_prop", "--dim", "2", "--iters", "50"]);
    assert_eq!(code(&o), 0);
    let result: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(result["skipped"].is_string());
}

#[test]
fn compare_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tight.csv");
    let o = radlab(&["compare", "--dim", "3", "--trials", "10", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l.starts_with("eq2_kittaneh,")));
}

#[test]
fn fov_samples_a_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("jordan.json");
    std::fs::write(&m, r#"{"n": 2, "re": [[0, 1], [0, 0]]}"#).unwrap();
    let out = dir.path().join("fov.csv");
    let o = radlab(&["fov", "--matrix", m.to_str().unwrap(), "--points", "64", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let last = text.lines().last().unwrap();
    let fields: Vec<&str> = last.split(',').collect();
    assert_eq!(fields[0], "radius");
    assert!((fields[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}
