use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use isotopy_core::curve_io::{load_curve, read_curve, write_curve};
use isotopy_core::diagram::crossing_count;
use isotopy_core::scenarios::scenario_by_name;

fn isotopy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isotopy")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn run_countable_r1_passes_and_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = isotopy(&[
            "run",
            "--scenario",
            "countable_r1",
            "--depth",
            "10",
            "--seed",
            "3",
            "--out",
            &out_arg(d.path()),
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let name = "countable_r1_10_3.report";
    let ra = fs::read(a.path().join(name)).unwrap();
    assert_eq!(ra, fs::read(b.path().join(name)).unwrap());
    let text = String::from_utf8(ra).unwrap();
    assert!(text.contains("verdict = pass/pass\n"));
    let ja = fs::read(a.path().join("countable_r1_10_3.json")).unwrap();
    assert_eq!(ja, fs::read(b.path().join("countable_r1_10_3.json")).unwrap());
}

#[test]
fn run_fox_matches_its_expected_failure() {
    let d = tempfile::tempdir().unwrap();
    let o = isotopy(&["run", "--scenario", "fox_remarkable", "--depth", "20", "--out", &out_arg(d.path())]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(d.path().join("fox_remarkable_20_0.report")).unwrap();
    assert!(text.contains("verdict = pass/fail\n"));
    let sep: f64 = text.lines().find_map(|l| l.strip_prefix("min_image_separation = ")).unwrap().parse().unwrap();
    assert!(sep < 1e-3);
}

#[test]
fn error_exit_codes() {
    assert_eq!(code(&isotopy(&["run", "--scenario", "unknown_name"])), 2);
    assert_eq!(code(&isotopy(&["check", "--scenario", "countable_r1", "--horizon", "1"])), 2);
    assert_eq!(code(&isotopy(&["run", "--scenario", "countable_r1", "--depth", "0"])), 2);
    assert_eq!(code(&isotopy(&["frames", "--scenario", "countable_r1", "--times", "0.5,0.2"])), 2);
    assert_eq!(code(&isotopy(&["bogus"])), 2);
    let d = tempfile::tempdir().unwrap();
    let blocker = d.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = isotopy(&["run", "--scenario", "countable_r1", "--depth", "3", "--out", &out_arg(&blocker.join("sub"))]);
    assert_eq!(code(&o), 3);
}

#[test]
fn check_reports_the_first_failing_condition() {
    let o = isotopy(&["check", "--scenario", "trefoil_chain_extended"]);
    assert_ne!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("condition 1"));
    assert_eq!(out.lines().filter(|l| l.split('\t').count() == 2 && l.starts_with(char::is_numeric)).count(), 20);
    assert_eq!(code(&isotopy(&["check", "--scenario", "countable_r1"])), 0);
}

#[test]
fn frames_start_at_the_curve_and_end_untied() {
    let d = tempfile::tempdir().unwrap();
    let o = isotopy(&[
        "frames",
        "--scenario",
        "countable_r1",
        "--depth",
        "10",
        "--times",
        "0,0.5,1",
        "--out",
        &out_arg(d.path()),
    ]);
    assert_eq!(code(&o), 0);
    let listed: Vec<String> = String::from_utf8(o.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(listed.len(), 6);
    assert!(listed[0].ends_with("frame000_t0.curve") && listed[2].ends_with("frame001_t0.5.curve"));
    assert!(listed[5].ends_with("frame002_t1.svg"));

    let initial = scenario_by_name("countable_r1").unwrap().initial_curve(10).unwrap().densify(0.01, 1);
    let first = load_curve(&listed[0]).unwrap();
    assert_eq!(first.vertices(), initial.vertices());
    let last = load_curve(&listed[4]).unwrap();
    assert_eq!(crossing_count(&initial) - crossing_count(&last), 10);
    assert!(fs::read_to_string(&listed[5]).unwrap().starts_with("<svg"));
    for f in listed.iter().filter(|f| f.ends_with(".curve")) {
        let c = load_curve(f).unwrap();
        assert_eq!(read_curve(&write_curve(&c)).unwrap().vertices(), c.vertices());
    }
}
