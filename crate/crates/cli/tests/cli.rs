//! End-to-end tests of the command-line interface: exit-code contract,
//! report determinism, golden output, and the bundled corpus.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_algebroid")
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("src/corpus")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("failed to run the binary")
}

fn stdout_without_timing(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .filter(|l| !l.starts_with("timing_ms") && !l.trim_start().starts_with("\"timing_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn check_exit_codes() {
    // valid algebroids exit 0
    for name in [
        "zero.spec",
        "so2_plane.spec",
        "affine_line.spec",
        "lie_algebra_bundle.spec",
        "metric_modular.spec",
    ] {
        let out = run(&["check", corpus(name).to_str().unwrap(), "--cutoff", "4"]);
        assert_eq!(out.status.code(), Some(0), "{name} should pass");
    }
    // the violator exits 2 and names the Bianchi residual
    let out = run(&["check", corpus("jacobi_violator.spec").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("bianchi: fail"));
    assert!(text.contains("first nonzero weight 3"));
}

#[test]
fn malformed_input_exits_one() {
    let dir = std::env::temp_dir().join("algebroid-cli-test-bad");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.spec");
    std::fs::write(&bad, "dim = 2\nrank = 1\n[gamma]\n(1,1,2) = \"x9\"\n").unwrap();
    let out = run(&["check", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("undefined variable"), "stderr: {err}");
    // missing file also exits 1
    let out = run(&["check", dir.join("nonexistent.spec").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn brackets_golden_and_determinism() {
    let spec = corpus("affine_line.spec");
    let args = ["brackets", spec.to_str().unwrap(), "--cutoff", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    // byte-identical reports apart from the timing field
    assert_eq!(stdout_without_timing(&a), stdout_without_timing(&b));
    let golden = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/brackets_affine_line.txt"),
    )
    .unwrap();
    assert_eq!(stdout_without_timing(&a), golden.trim_end());
}

#[test]
fn atiyah_modular_verdict() {
    let out = run(&[
        "atiyah",
        corpus("metric_modular.spec").to_str().unwrap(),
        "--k",
        "1",
        "--transgress",
        "--weil",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("modular_identity: pass"));
    assert!(text.contains("weil_d_closed: pass"));
    assert!(text.contains("certificate: pass"));
}

#[test]
fn atiyah_action_verdict_and_json() {
    let out = run(&[
        "atiyah",
        corpus("so2_plane.spec").to_str().unwrap(),
        "--k",
        "2",
        "--transgress",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("report must be valid JSON");
    assert_eq!(json["atiyah"]["equivariant_match"], true);
    assert_eq!(json["verdict"], "pass");
    // zero spec: zero classes
    let out = run(&[
        "atiyah",
        corpus("zero.spec").to_str().unwrap(),
        "--k",
        "1",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["atiyah"]["class_is_zero"], true);
    // k above the de Rham cap is an input error
    let out = run(&[
        "atiyah",
        corpus("zero.spec").to_str().unwrap(),
        "--k",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn family_endpoints() {
    // same underlying algebroid, different connection: passes
    let dir = std::env::temp_dir().join("algebroid-cli-test-family");
    std::fs::create_dir_all(&dir).unwrap();
    let flat = dir.join("flat_anchor.spec");
    std::fs::write(
        &flat,
        "dim = 2\nrank = 1\ncutoff = 4\n\n[rho]\n(1,1) = \"x1\"\n",
    )
    .unwrap();
    let out = run(&[
        "family",
        corpus("metric_modular.spec").to_str().unwrap(),
        flat.to_str().unwrap(),
        "--cutoff",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("flatness: pass"));
    assert!(text.contains("compatibility: pass"));
    assert!(text.contains("F_2"));

    // different structure functions: exit 2
    let out = run(&[
        "family",
        corpus("so2_plane.spec").to_str().unwrap(),
        corpus("zero.spec").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn examples_roundtrip() {
    let dir = std::env::temp_dir().join("algebroid-cli-test-examples");
    let _ = std::fs::remove_dir_all(&dir);
    let out = run(&["examples", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        count += 1;
        // every bundled example parses
        let text = std::fs::read_to_string(&path).unwrap();
        algebroid_core::parse::parse_spec(&text)
            .unwrap_or_else(|e| panic!("{} does not parse: {e}", path.display()));
    }
    assert_eq!(count, 6);
}

#[test]
fn report_out_file() {
    let dir = std::env::temp_dir().join("algebroid-cli-test-out");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&[
        "check",
        corpus("so2_plane.spec").to_str().unwrap(),
        "--cutoff",
        "3",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(json["command"], "check");
    assert_eq!(json["verdict"], "pass");
}
