use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pretangent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pretangent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const RAYS: &str = r#"{"space": {"kind": "planar-rays", "theta": 1.5707963267948966}, "tasks": ["conditions", "witness"]}"#;

#[test]
fn analyze_writes_report_and_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "rays.json", RAYS);
    let out = dir.path().join("out");
    let run = pretangent(&["analyze", &config, "--out", out.to_str().unwrap(), "--quiet"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = fs::read_to_string(out.join("condition_i.csv")).unwrap();
    assert!(csv.starts_with("k,g_of_k\r\n"));
    assert_eq!(csv.lines().count(), 12);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["uniqueness"]["verdict"], "non-unique");
    assert!(report["witness"]["gap"].as_f64().unwrap() > 2f64.sqrt() - 1e-3);
    let iii = fs::read_to_string(out.join("condition_iii_c0_2.csv")).unwrap();
    assert!(iii.starts_with("n,q_n,t_n,kappa_n\r\n1,1/1,1/2,"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "half.json",
        r#"{"space": {"kind": "half-line"}, "tasks": ["conditions", "pretangent", "tangency"]}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let run = pretangent(&["analyze", &config, "--out", out.to_str().unwrap(), "--quiet"]);
        assert!(run.status.success());
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 3);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn invalid_config_is_an_operational_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        r#"{"space": {"kind": "half-line"}, "tasks": ["conditions"], "grids": {"k_grid": [2, 1.5, 0.9]}}"#,
    );
    let run = pretangent(&["analyze", &config, "--quiet"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("k_grid"));

    let config = write_config(dir.path(), "typo.json", "{\n\"space\": {\"kind\": \"half-line\"},\n\"taks\": []\n}");
    let run = pretangent(&["analyze", &config, "--quiet"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 3"));
}

#[test]
fn task_failure_gives_exit_one() {
    // the comparison ray starts away from the curve's marked point
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "shifted.json",
        r#"{"space": {"kind": "curve", "coordinates": [[0, 1], [0, 0, 1]]},
            "compare_with": {"kind": "ray", "origin": [1, 0], "direction": [1, 0]},
            "tasks": ["tangent-equivalence"]}"#,
    );
    let out = dir.path().join("out");
    let run = pretangent(&["analyze", &config, "--out", out.to_str().unwrap(), "--quiet"]);
    assert_eq!(run.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["errors"][0]["task"], "tangent-equivalence");
}

#[test]
fn witness_on_a_unique_space_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "half.json", r#"{"space": {"kind": "half-line"}, "tasks": ["conditions"]}"#);
    let out = dir.path().join("out");
    let run = pretangent(&["witness", &config, "--out", out.to_str().unwrap(), "--quiet"]);
    assert_eq!(run.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["skipped"][0]["task"], "witness");
    assert!(report.get("witness").is_none());
}

#[test]
fn failing_verdicts_still_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "rays.json", RAYS);
    let out = dir.path().join("w");
    let run = pretangent(&["witness", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(run.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&run.stdout).contains("uniqueness: NonUnique"));
}

#[test]
fn cantor_table_lists_fractions() {
    let run = pretangent(&["cantor-table", "--bound", "1", "--depth", "2"]);
    assert!(run.status.success());
    assert_eq!(String::from_utf8_lossy(&run.stdout), "0/1\n2/9\n2/3\n8/9\n");
    let run = pretangent(&["cantor-table", "--bound", "1", "--depth", "1", "--marked", "1"]);
    assert_eq!(String::from_utf8_lossy(&run.stdout), "-2/3\n0/1\n");
    let dir = tempfile::tempdir().unwrap();
    let run = pretangent(&["cantor-table", "--depth", "1", "--out", dir.path().to_str().unwrap(), "--quiet"]);
    assert!(run.status.success());
    assert_eq!(fs::read_to_string(dir.path().join("cantor_table.csv")).unwrap(), "value\r\n0/1\r\n2/3\r\n");
}
