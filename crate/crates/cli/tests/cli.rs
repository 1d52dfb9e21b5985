use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("exp.conf");
    std::fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_mimo-ee"))
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn writes_csv_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ee.csv");
    let o = run(
        dir.path(),
        "scenario = ee_vs_m\nsweep = 40,80\ntrials = 2\n",
        &["--out", out.to_str().unwrap()],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "sweep,mean,stderr,trials,failures,seed");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("40,"));
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = run(
        dir.path(),
        &format!(
            "scenario = power_vs_m\nsweep = 60\ntrials = 50\nseed = 1\noutput = {}\n",
            dir.path().join("unused.csv").display()
        ),
        &[
            "--trials",
            "3",
            "--seed",
            "77",
            "--out",
            out.to_str().unwrap(),
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(!dir.path().join("unused.csv").exists());
    let text = std::fs::read_to_string(&out).unwrap();
    let fields: Vec<_> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[3], "3");
    assert_eq!(fields[5], "77");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let cfg = "scenario = ee_vs_k\nsweep = 1:2:5\ntrials = 3\nantennas = 30\n";
    assert!(run(dir.path(), cfg, &["--out", a.to_str().unwrap()])
        .status
        .success());
    assert!(run(dir.path(), cfg, &["--out", b.to_str().unwrap()])
        .status
        .success());
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn convergence_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let o = run(
        dir.path(),
        "scenario = convergence\n",
        &["--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("t1,eta,residual\n"));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), "scenario = ee_vs_m\ntrials = 0\n", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trials"));

    let o = run(dir.path(), "scenario = ee_vs_m\nantenas = 10\n", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("antenas"));

    let o = run(dir.path(), "scenario = ee_vs_m\n", &["--trials", "0"]);
    assert_eq!(o.status.code(), Some(1));

    let o = Command::new(env!("CARGO_BIN_EXE_mimo-ee"))
        .args([
            "run",
            "--config",
            dir.path().join("missing.conf").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        "scenario = ee_vs_m\nsweep = 10\ntrials = 1\n",
        &["--out", "/nonexistent-dir/x.csv"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent-dir/x.csv"));
}
