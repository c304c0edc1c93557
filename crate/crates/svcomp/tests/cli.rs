use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_svcomp"))
}

fn fixture_path() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/travel.json")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("svcomp-test-{}-{name}", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

#[test]
fn validate_fixture_reports_counts() {
    let out = bin()
        .args(["validate", "--registry", fixture_path()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "11 services, 12 parameters");
}

#[test]
fn validate_rejects_duplicate_ids_with_exit_1() {
    let path = write_temp(
        "dup.json",
        r#"{"services": [
            {"id": "ws3", "name": "A", "inputs": [], "outputs": ["x"]},
            {"id": "ws3", "name": "B", "inputs": [], "outputs": ["y"]}
        ]}"#,
    );
    let out = bin()
        .args(["validate", "--registry", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ws3"));
}

#[test]
fn validate_rejects_empty_file_with_exit_1() {
    let path = write_temp("empty.json", "");
    let out = bin()
        .args(["validate", "--registry", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn compose_summary_on_fixture() {
    let out = bin()
        .args([
            "compose",
            "--registry",
            fixture_path(),
            "--in",
            "Date,City",
            "--out",
            "HotelName,FlightInfo,CarType,TourCost",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("solutions: 5"), "unexpected summary: {text}");
    assert!(text.contains("truncated: false"));
}

#[test]
fn compose_dot_output() {
    let out = bin()
        .args([
            "compose",
            "--registry",
            fixture_path(),
            "--in",
            "Date,City",
            "--out",
            "HotelName,FlightInfo,CarType,TourCost",
            "--format",
            "dot",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("digraph cst {"));
    assert!(text.contains("[label=\"E\"]"));
    assert!(text.contains("[label=\"S\"]"));
    assert!(text.contains("[label=\"C\"]"));
}

#[test]
fn compose_with_tiny_limit_reports_truncated() {
    let out = bin()
        .args([
            "compose",
            "--registry",
            fixture_path(),
            "--in",
            "Date,City",
            "--out",
            "HotelName",
            "--max-nodes",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("truncated: true"));
}

#[test]
fn unknown_parameter_exits_2() {
    let out = bin()
        .args([
            "compose",
            "--registry",
            fixture_path(),
            "--in",
            "Date",
            "--out",
            "Teleporter",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("teleporter"));
}

#[test]
fn leanest_and_shortest_on_fixture() {
    for cmd in ["leanest", "shortest"] {
        let out = bin()
            .args([
                cmd,
                "--registry",
                fixture_path(),
                "--in",
                "Date,City",
                "--out",
                "HotelName,FlightInfo,CarType,TourCost",
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{cmd} failed");
        let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(doc["found"], serde_json::json!(true));
        assert_eq!(doc["nws"], serde_json::json!(2));
        assert_eq!(doc["depth"], serde_json::json!(2));
        assert_eq!(doc["services"], serde_json::json!(["ws11", "ws9"]));
        assert_eq!(doc["execution_order"], serde_json::json!(["ws9", "ws11"]));
    }
}

#[test]
fn impossible_query_exits_3_with_not_found_document() {
    let out = bin()
        .args([
            "leanest",
            "--registry",
            fixture_path(),
            "--in",
            "Date,City",
            "--out",
            "Date",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc, serde_json::json!({ "found": false }));
}

#[test]
fn repeated_flags_match_comma_lists() {
    let out_a = bin()
        .args([
            "leanest",
            "--registry",
            fixture_path(),
            "--in",
            "Date",
            "--in",
            "city",
            "--out",
            "hotelname",
            "--out",
            "FlightInfo,CarType,TourCost",
        ])
        .output()
        .unwrap();
    assert_eq!(out_a.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out_a)).unwrap();
    assert_eq!(doc["services"], serde_json::json!(["ws11", "ws9"]));
}

#[test]
fn gen_is_deterministic_and_validates() {
    let args = ["gen", "--seed", "1", "--services", "10", "--params", "8"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let path = write_temp("gen.json", &stdout(&a));
    let out = bin()
        .args(["validate", "--registry", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "10 services, 8 parameters");
}

#[test]
fn gen_zero_services_is_valid_zero_params_is_not() {
    let out = bin()
        .args(["gen", "--services", "0", "--params", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let path = write_temp("gen0.json", &stdout(&out));
    let out = bin()
        .args(["validate", "--registry", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let out = bin().args(["gen", "--params", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
