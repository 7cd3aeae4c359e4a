//! End-to-end checks of the `g2g` binary: output formats, stdout/stderr
//! separation, and exit codes.

use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("g2g-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn g2g() -> Command {
    Command::new(env!("CARGO_BIN_EXE_g2g"))
}

#[test]
fn pg_output_on_stdout() {
    let out = g2g()
        .arg(fixture("minimal.g2g"))
        .arg(fixture("minimal.ttl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("\"http://example.org/person1\" :person name:Alice"));
    assert!(stdout.contains(":emailed year:2017 attachment:\"01.pdf\""));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("2 nodes"), "stats go to stderr: {stderr}");
}

#[test]
fn json_output_to_file() {
    let dir = temp_dir("json");
    let path = dir.join("out.json");
    let out = g2g()
        .arg(fixture("minimal.g2g"))
        .arg(fixture("minimal.ttl"))
        .args(["-f", "json", "-o"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let graph = g2g::parse_json_pg(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(graph.stats(), (2, 2));
}

#[test]
fn neo4j_export_writes_csv_pair() {
    let dir = temp_dir("neo4j");
    let out = g2g()
        .arg(fixture("minimal.g2g"))
        .arg(fixture("minimal.ttl"))
        .args(["-f", "neo4j", "-o"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let nodes = std::fs::read_to_string(dir.join("nodes.csv")).unwrap();
    assert!(nodes.starts_with("id:ID,:LABEL"));
    let edges = std::fs::read_to_string(dir.join("edges.csv")).unwrap();
    assert!(edges.starts_with(":START_ID,:END_ID,:TYPE"));
}

#[test]
fn include_orphans_flag_keeps_nodes() {
    let out = g2g()
        .arg(fixture("lifesci.g2g"))
        .arg(fixture("lifesci.ttl"))
        .arg("--include-orphans")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("isolated disease"));
}

#[test]
fn usage_error_is_exit_1() {
    let out = g2g().output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_is_exit_0() {
    let out = g2g().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bad_g2gml_is_exit_2() {
    let dir = temp_dir("badg2g");
    let bad = dir.join("bad.g2g");
    std::fs::write(&bad, "this is not a mapping\n").unwrap();
    let out = g2g().arg(&bad).arg(fixture("minimal.ttl")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_turtle_is_exit_2() {
    let dir = temp_dir("badttl");
    let bad = dir.join("bad.ttl");
    std::fs::write(&bad, "<<<\n").unwrap();
    let out = g2g().arg(fixture("minimal.g2g")).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_source_file_is_exit_3() {
    let out = g2g()
        .arg(fixture("minimal.g2g"))
        .arg("/nonexistent/data.ttl")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unreachable_endpoint_is_exit_3() {
    let out = g2g()
        .arg(fixture("minimal.g2g"))
        .arg("http://127.0.0.1:1/sparql")
        .args(["--timeout", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_is_exit_4() {
    let out = g2g()
        .arg(fixture("minimal.g2g"))
        .arg(fixture("minimal.ttl"))
        .args(["-o", "/nonexistent/dir/out.pg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}
