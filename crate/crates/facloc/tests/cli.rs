//! Binary-level tests: exit codes, record formats, golden outputs.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use facloc::report::RunRecord;

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_facloc")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(exe()).args(args).output().expect("spawns")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_tiny_fixture_is_optimal_11() {
    let path = fixture("tiny.fl");
    let out = run(&["solve", path.to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let rec: RunRecord = serde_json::from_str(stdout(&out).trim()).expect("valid record JSON");
    assert_eq!(rec.status, "optimal");
    assert_eq!(rec.cost, Some(11.0));
    assert_eq!(rec.open_facilities, Some(vec![0]));
}

#[test]
fn kernel_cost_never_beats_benders() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = tmp.path().join("mid.fl");
    let out = run(&[
        "generate",
        "--seed",
        "21",
        "--n",
        "14",
        "--m",
        "18",
        "--variant",
        "uflp",
        "-o",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let benders = run(&["solve", inst.to_str().unwrap(), "--quiet"]);
    let kernel = run(&["solve", inst.to_str().unwrap(), "--algo", "kernel", "--quiet"]);
    assert_eq!(benders.status.code(), Some(0));
    assert_eq!(kernel.status.code(), Some(0));
    let b: RunRecord = serde_json::from_str(stdout(&benders).trim()).unwrap();
    let k: RunRecord = serde_json::from_str(stdout(&kernel).trim()).unwrap();
    let (bc, kc) = (b.cost.unwrap(), k.cost.unwrap());
    assert!(
        kc >= bc - 1e-6 * (1.0 + bc.abs()),
        "kernel {kc} below exact {bc}"
    );
}

#[test]
fn missing_input_exits_1_and_names_the_path() {
    let out = run(&["solve", "no-such-file.fl", "--quiet"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no-such-file.fl"), "stderr: {err}");
}

#[test]
fn unknown_flag_exits_64() {
    let out = run(&["solve", "--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn bench_matches_golden_and_reruns_identically() {
    let manifest = fixture("bench.toml");
    let a = run(&["bench", "--manifest", manifest.to_str().unwrap()]);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&["bench", "--manifest", manifest.to_str().unwrap(), "--jobs", "3"]);
    assert_eq!(a.stdout, b.stdout, "job count changed the bytes");
    let golden = std::fs::read_to_string(fixture("bench_golden.csv")).unwrap();
    assert_eq!(stdout(&a), golden, "bench output drifted from the golden file");
    // Every row is parseable with the fixed column count.
    for line in stdout(&a).lines().skip(1) {
        assert_eq!(line.split(',').count(), 9, "row: {line}");
    }
}

#[test]
fn bench_guard_row_reports_too_large() {
    let manifest = fixture("bench.toml");
    let out = run(&["bench", "--manifest", manifest.to_str().unwrap()]);
    let text = stdout(&out);
    let guard = text
        .lines()
        .find(|l| l.starts_with("gen-s11-n25"))
        .expect("guard row present");
    assert!(guard.contains(",too-large,"));
}

#[test]
fn check_passes_on_small_instances_and_detects_faults() {
    let cap = fixture("small.cap");
    let ok = run(&["check", cap.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    assert!(stdout(&ok).contains("PASS"));

    let bad = run(&["check", cap.to_str().unwrap(), "--inject-fault"]);
    assert_eq!(bad.status.code(), Some(3), "{}", stdout(&bad));
    assert!(stdout(&bad).contains("FAIL"));
}

#[test]
fn check_refuses_large_instances() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = tmp.path().join("big.fl");
    run(&[
        "generate",
        "--seed",
        "1",
        "--n",
        "15",
        "--m",
        "6",
        "--variant",
        "uflp",
        "-o",
        inst.to_str().unwrap(),
    ]);
    let out = run(&["check", inst.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("refuses"), "stderr: {err}");
}

#[test]
fn solve_emits_parseable_event_log() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = tmp.path().join("ev.fl");
    run(&[
        "generate",
        "--seed",
        "3",
        "--n",
        "8",
        "--m",
        "12",
        "--variant",
        "uflp",
        "-o",
        inst.to_str().unwrap(),
    ]);
    let log = tmp.path().join("events.jsonl");
    let out = run(&[
        "solve",
        inst.to_str().unwrap(),
        "--log",
        log.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&log).unwrap();
    assert!(!text.trim().is_empty());
    for line in text.lines() {
        let ev: facloc::events::Event = serde_json::from_str(line).expect("event parses");
        assert!(ev.time >= 0.0);
    }
}

#[test]
fn generate_rejects_bad_ratio_with_exit_1() {
    let out = run(&[
        "generate", "--seed", "1", "--n", "3", "--m", "3", "--variant", "cflp", "--ratio", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn orlib_solve_applies_auto_recourse_note() {
    let cap = fixture("small.cap");
    let out = run(&["solve", cap.to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("recourse"), "stderr: {err}");
    let rec: RunRecord = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(rec.status, "optimal");
}

#[test]
fn solve_csv_row_has_fixed_columns() {
    let path = fixture("tiny.fl");
    let out = run(&["solve", path.to_str().unwrap(), "--quiet", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "instance,algo,status,cost,bound,gap,nodes,cuts,time_s"
    );
    assert_eq!(lines.next().unwrap().split(',').count(), 9);
}
