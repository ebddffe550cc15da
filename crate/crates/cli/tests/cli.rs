//! End-to-end tests of the binary: flag/config handling, the exit-code
//! contract (0 ok, 1 internal, 2 usage, 3 validation), CSV round-trips and
//! plot-script determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sievelab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn integrals_hand_case() {
    let out = run(&["integrals", "--n", "4", "--h", "1", "--q", "3", "--preset", "ones"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("J = 10/9"), "{text}");
    assert!(text.contains("I = 10"), "{text}");
    assert!(text.contains("M = 11/3"), "{text}");
}

#[test]
fn config_file_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# hand case\nn = 4\nh = 1\nq = 2\npreset = ones\n").unwrap();

    // file alone: Q = 2 gives J = 0 at the default mean M = 3
    let out = run(&["integrals", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("J = 0"), "{}", stdout(&out));

    // flag overrides q: back to the Q = 3 case
    let out = run(&["integrals", "--config", cfg.to_str().unwrap(), "--q", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("J = 10/9"), "{}", stdout(&out));
}

#[test]
fn verify_delta1_reports_zero_residual() {
    let out = run(&["verify", "lemma1", "--n", "100", "--h", "5", "--preset", "delta1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("residual   = 0"), "{text}");
    assert!(text.contains("ratio      = 0"), "{text}");
}

#[test]
fn exit_codes() {
    // 2: usage (unknown command, missing required key)
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["integrals", "--h", "10", "--preset", "ones"]).status.code(),
        Some(2)
    );

    // 3: validation (out-of-range lambda from a config file, h >= N/4,
    // unknown preset, unknown config key)
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "lambda = 1.2\n").unwrap();
    let out = run(&[
        "experiment",
        "--config",
        bad.to_str().unwrap(),
        "--theta",
        "0.4",
        "--preset",
        "ones",
        "--n-list",
        "64,128",
        "--out",
        dir.path().join("x.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));

    assert_eq!(
        run(&["integrals", "--n", "100", "--h", "30", "--q", "5", "--preset", "ones"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["verify", "lemma1", "--n", "50", "--h", "2", "--preset", "nosuch"])
            .status
            .code(),
        Some(3)
    );

    let unknown_key = dir.path().join("uk.cfg");
    fs::write(&unknown_key, "zeta = 1\n").unwrap();
    assert_eq!(
        run(&["integrals", "--config", unknown_key.to_str().unwrap()]).status.code(),
        Some(3)
    );
}

fn run_experiment(dir: &Path, csv: &str, plot: Option<&str>, n_list: &str) -> Output {
    let csv_path = dir.join(csv);
    let mut args = vec![
        "experiment".to_string(),
        "--theta".into(),
        "0.4".into(),
        "--lambda".into(),
        "0.5".into(),
        "--preset".into(),
        "moebius".into(),
        "--n-list".into(),
        n_list.into(),
        "--out".into(),
        csv_path.to_str().unwrap().into(),
    ];
    if let Some(p) = plot {
        args.push("--plot".into());
        args.push(dir.join(p).to_str().unwrap().into());
    }
    bin().args(&args).output().expect("binary runs")
}

#[test]
fn experiment_report_roundtrip_and_plot_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(dir.path(), "grid.csv", Some("grid.gp"), "64,128,256");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let report = run(&["report", "--csv", dir.path().join("grid.csv").to_str().unwrap()]);
    assert!(report.status.success());
    let text = stdout(&report);
    assert!(text.contains("byte-identical (zero loss)"), "{text}");
    assert!(text.contains("3 records"), "{text}");
    assert!(text.contains("exact sidecar columns present"), "{text}");

    // same records twice -> identical plot bytes
    let first = fs::read(dir.path().join("grid.gp")).unwrap();
    let out = run_experiment(dir.path(), "grid.csv", Some("grid.gp"), "64,128,256");
    assert!(out.status.success());
    let second = fs::read(dir.path().join("grid.gp")).unwrap();
    assert_eq!(first, second);
    let script = String::from_utf8(first).unwrap();
    assert!(script.contains("set logscale xy"), "{script}");
    assert!(script.contains("'grid.csv' using 'N':'ratio_J'"), "{script}");
    assert!(script.contains("'grid.csv' using 'N':'ratio_I'"), "{script}");
}

#[test]
fn plot_needs_two_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(dir.path(), "one.csv", Some("one.gp"), "64");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn worker_cap_env_does_not_change_exact_results() {
    let dir = tempfile::tempdir().unwrap();
    for (threads, csv) in [("1", "a.csv"), ("2", "b.csv"), ("8", "c.csv")] {
        let csv_path = dir.path().join(csv);
        let out = bin()
            .env("SIEVELAB_THREADS", threads)
            .args([
                "experiment",
                "--theta",
                "0.4",
                "--lambda",
                "0.5",
                "--preset",
                "ones",
                "--n-list",
                "64,128",
                "--out",
                csv_path.to_str().unwrap(),
            ])
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    let b = fs::read(dir.path().join("b.csv")).unwrap();
    let c = fs::read(dir.path().join("c.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn bad_worker_cap_rejected() {
    let out = bin()
        .env("SIEVELAB_THREADS", "0")
        .args(["experiment", "--theta", "0.4", "--lambda", "0.5", "--preset", "ones", "--n-list", "64,128", "--out", "/tmp/never-written.csv"])
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn selfcheck_small_battery_passes() {
    let out = run(&["kernels-selfcheck", "--h-max", "8", "--q-max", "10", "--samples", "50"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("all ok"), "{}", stdout(&out));
}
