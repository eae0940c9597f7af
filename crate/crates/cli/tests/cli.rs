use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaudinlab")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const DIMER: &str = r#"{"algebra": "sl2", "sites": [{"z": [0, 0], "weight": 1}, {"z": [1, 0], "weight": 1}]}"#;
const SL3: &str = r#"{"algebra": "sl3", "sites": [{"z": [0, 0], "weight": [1, 0]}, {"z": [1, 0.5], "weight": [1, 0]}]}"#;

#[test]
fn solve_writes_one_root_row() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DIMER);
    let out_dir = dir.path().join("out");
    let out = run(&["bethe", "solve", "--problem", &p, "--m", "1", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("roots.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "index,re,im,residual");
    assert_eq!(lines.len(), 2);
    let re: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((re - 0.5).abs() < 1e-12);

    // Reports are valid roots input.
    let report = out_dir.join("report.json");
    let out = run(&["bethe", "verify", "--problem", &p, "--roots", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["tool"], "gaudinlab");
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn perturbed_root_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DIMER);
    let r = write(dir.path(), "r.json", r#"{"roots": [[0.5, 0.01]]}"#);
    let out = run(&["bethe", "verify", "--problem", &p, "--roots", &r]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "verification_failed");
}

#[test]
fn pm_prints_the_polynomial() {
    let out = run(&["oper", "pm", "--m", "0"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "q_{-1}");
    let out = run(&["oper", "pm", "--m", "1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "-q_{-1}^2 + q_{-2}");
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "bad.json",
        "{\n  \"algebra\": \"sl2\",\n  \"sites\": [\n    {\"z\": [0, 0], \"weight\": 1},\n    {\"z\": [1], \"weight\": 1}\n  ]\n}",
    );
    let out = run(&["bethe", "audit", "--problem", &p]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("sites[1].z") && err.contains("line 5"), "{err}");

    let same = write(dir.path(), "same.json", r#"{"algebra": "sl2", "sites": [{"z": [0, 0], "weight": 1}, {"z": [0, 0], "weight": 1}]}"#);
    assert_eq!(code(&run(&["bethe", "audit", "--problem", &same])), 2);
    assert_eq!(code(&run(&["bethe", "frobnicate"])), 2);
    assert_eq!(code(&run(&["bethe", "audit", "--problem", "/nonexistent.json"])), 2);
}

#[test]
fn spectrum_tables_per_site() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DIMER);
    let out_dir = dir.path().join("spec");
    let out = run(&["gaudin", "spectrum", "--problem", &p, "--sector", "0", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    for site in 1..=2 {
        let csv = std::fs::read_to_string(out_dir.join(format!("eigenvalues_site{site}.csv"))).unwrap();
        assert_eq!(csv.lines().count(), 2);
    }
    assert_eq!(code(&run(&["gaudin", "spectrum", "--problem", &p, "--sector", "1,0"])), 2);
}

#[test]
fn monodromy_and_sov_pass_on_solved_roots() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DIMER);
    let out = run(&["bethe", "solve", "--problem", &p, "--m", "1"]);
    let r = write(dir.path(), "solve.json", &String::from_utf8(out.stdout).unwrap());
    let out = run(&["monodromy", "--problem", &p, "--roots", &r]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["results"][0]["monodromy"]["all_trivial"], true);
    let out = run(&["sov", "check", "--problem", &p, "--roots", &r]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    // A root off the Bethe locus gives non-trivial monodromy.
    let off = write(dir.path(), "off.json", r#"{"roots": [[0.5, 0.2]]}"#);
    assert_eq!(code(&run(&["monodromy", "--problem", &p, "--roots", &off])), 1);
}

#[test]
fn sl3_check_and_colors() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", SL3);
    assert_eq!(code(&run(&["bethe", "solve", "--problem", &p, "--m", "1"])), 2);
    let out = run(&["bethe", "solve", "--problem", &p, "--m", "1", "--colors", "1"]);
    assert_eq!(code(&out), 0);
    let r = write(dir.path(), "solve.json", &String::from_utf8(out.stdout).unwrap());
    let out = run(&["sl3", "check", "--problem", &p, "--roots", &r]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["results"][0]["oracle"]["matched"], true);
    assert_eq!(code(&run(&["monodromy", "--problem", &p, "--roots", &r])), 0);
}

#[test]
fn riccati_reports_obstructions() {
    let dir = tempfile::tempdir().unwrap();
    // q_0 = 3/4 puts one branch at the m = 1 resonance; q_{-2} != q_{-1}^2 obstructs it.
    let q = write(dir.path(), "q.json", r#"{"coeffs": [[0.75, 0], [0.3, 0], [0.5, 0], [0.1, 0]]}"#);
    let out = run(&["oper", "riccati", "--q", &q, "--depth", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let branches = v["result"]["branches"].as_array().unwrap();
    assert_eq!(branches.len(), 2);
    assert!(branches.iter().any(|b| b.get("obstructed").is_some()));
}

#[test]
fn tq_on_a_lattice() {
    let out = run(&["tq", "--lambda-num", "1,0.5", "--lambda-den", "[[2,0],[-0.3,0.1]]", "--q", "0.7,0.2", "--lattice", "32"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(code(&run(&["tq", "--lambda-num", "1", "--lambda-den", "1", "--q", "bad", "--lattice", "32"])), 2);
}
