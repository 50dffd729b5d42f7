//! Acceptance criteria, one test each, on the full suite with seed 1.
//!
//! Each test prints a single `PASS` / `FAIL` line to stderr (visible without
//! `--nocapture`). The tests hold a lock so the wall-clock limits measure one
//! check at a time.

use std::io::Write;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use littlewood::verify::{run_check, Suite, VerifyConfig, CHECK_NAMES};

static SERIAL: Mutex<()> = Mutex::new(());

const SEED: u64 = 1;

fn criterion(id: u32, limit: Duration) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let cfg = VerifyConfig::new(Suite::Full, SEED);
    let start = Instant::now();
    let outcome = run_check(id, &cfg).expect("check runs");
    let elapsed = start.elapsed();
    let ok = outcome.passed && elapsed <= limit;
    let _ = writeln!(
        std::io::stderr(),
        "criterion {id:>2} {:<24} {} margin={:+.3e} samples={} time={:.2}s limit={}s",
        CHECK_NAMES[id as usize - 1],
        if ok { "PASS" } else { "FAIL" },
        outcome.margin,
        outcome.samples,
        elapsed.as_secs_f64(),
        limit.as_secs(),
    );
    assert!(outcome.passed, "criterion {id} failed: {}\n{:?}", outcome.details, outcome.witness);
    assert!(elapsed <= limit, "criterion {id} took {elapsed:?}, limit {limit:?}");
}

#[test]
fn criterion_01_witness_sharpness() {
    criterion(1, Duration::from_secs(1));
}

#[test]
fn criterion_02_real_upper_bound() {
    criterion(2, Duration::from_secs(300));
}

#[test]
fn criterion_03_structural_inequalities() {
    criterion(3, Duration::from_secs(120));
}

#[test]
fn criterion_04_search_recovers_sqrt2() {
    criterion(4, Duration::from_secs(30));
}

#[test]
fn criterion_05_rademacher_khinchin() {
    criterion(5, Duration::from_secs(120));
}

#[test]
fn criterion_06_steinhaus_closed_form() {
    criterion(6, Duration::from_secs(60));
}

#[test]
fn criterion_07_torus_sandwich() {
    criterion(7, Duration::from_secs(120));
}

#[test]
fn criterion_08_blei_khinchin() {
    criterion(8, Duration::from_secs(180));
}

#[test]
fn criterion_09_steinhaus_sharp_point() {
    criterion(9, Duration::from_secs(180));
}

#[test]
fn criterion_10_determinism_round_trips() {
    criterion(10, Duration::from_secs(60));

    // the fast verify report is byte-identical across two runs of the binary
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("report{run}.json"));
        let start = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_littlewood"))
            .args(["verify", "--suite", "fast", "--seed", "1", "--report"])
            .arg(&path)
            .output()
            .unwrap()
            .status;
        let elapsed = start.elapsed();
        assert_eq!(status.code(), Some(0));
        assert!(elapsed <= Duration::from_secs(60), "fast verify took {elapsed:?}");
        reports.push(std::fs::read(&path).unwrap());
    }
    let same = reports[0] == reports[1];
    let _ = writeln!(
        std::io::stderr(),
        "criterion 10 fast-report-identical     {}",
        if same { "PASS" } else { "FAIL" }
    );
    assert!(same);
}
