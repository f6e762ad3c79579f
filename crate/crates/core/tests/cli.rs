//! End-to-end tests of the `chsh-share` binary: exit codes, CSV/JSON shape,
//! determinism.

use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chsh-share"));
    // pin the report timestamp so outputs are byte-reproducible
    cmd.env("SOURCE_DATE_EPOCH", "1700000000");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(|f| f.trim().to_string()).collect())
        .collect()
}

#[test]
fn simulate_maximal_violation() {
    let out = run(&[
        "simulate",
        "--scheme",
        "ppm",
        "--k",
        "1",
        "--delta",
        "0.7853981634",
        "--theta",
        "0.7853981634",
        "--alphas",
        "1.0",
        "--oracle",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    let closed: f64 = rows[0][1].parse().unwrap();
    let brute: f64 = rows[0][2].parse().unwrap();
    let diff: f64 = rows[0][3].parse().unwrap();
    assert!((closed - 2.828427).abs() < 1e-6);
    assert!((brute - 2.828427).abs() < 1e-6);
    assert!(diff < 1e-9);
    assert_eq!(rows[0][4], "true");
}

#[test]
fn simulate_alpha_zero_theta_rule() {
    let out = run(&[
        "simulate",
        "--scheme",
        "ppm",
        "--k",
        "1",
        "--delta",
        "0.3",
        "--theta-rule",
        "t1",
        "--alphas",
        "0.0",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0][1], "2");
    assert_eq!(rows[0][2], "false");
}

#[test]
fn simulate_accepts_degrees() {
    let out = run(&[
        "simulate",
        "--scheme",
        "ppm",
        "--k",
        "1",
        "--delta",
        "45",
        "--theta",
        "45",
        "--degrees",
        "--alphas",
        "1.0",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    let closed: f64 = rows[0][1].parse().unwrap();
    assert!((closed - 2.828427).abs() < 1e-5);
}

#[test]
fn simulate_domain_errors_exit_2() {
    // alphas/k mismatch
    let out = run(&[
        "simulate", "--scheme", "ppm", "--k", "2", "--delta", "0.3", "--theta", "0.3", "--alphas",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.starts_with("error: domain:"), "stderr was {err:?}");
    assert_eq!(err.lines().count(), 1, "one machine-parsable line");

    // missing v for two-kraus
    let out = run(&[
        "simulate",
        "--scheme",
        "two-kraus",
        "--k",
        "1",
        "--delta",
        "0.3",
        "--theta",
        "0.3",
        "--alphas",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // theta out of range
    let out = run(&[
        "simulate", "--scheme", "ppm", "--k", "1", "--delta", "0.3", "--theta", "1.0", "--alphas",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_usage_errors_exit_64() {
    let out = run(&["simulate", "--scheme", "nonsense", "--k", "1"]);
    assert_eq!(out.status.code(), Some(64));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn synthesize_t1_roundtrip() {
    let out = run(&[
        "synthesize",
        "--theorem",
        "1",
        "--k",
        "2",
        "--delta",
        "0.2713",
        "--epsilon",
        "0.01",
        "--alpha1",
        "0.1",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    let s2: f64 = rows[1][1].parse().unwrap();
    assert!((s2 - 0.754).abs() < 1e-3);
    assert_eq!(rows[1][4], "true");
}

#[test]
fn synthesize_window_violation_exits_3() {
    let out = run(&[
        "synthesize",
        "--theorem",
        "1",
        "--k",
        "2",
        "--delta",
        "0.6",
        "--alpha1",
        "0.1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.starts_with("error: infeasible:"), "stderr was {err:?}");
}

#[test]
fn synthesize_inadmissible_v_exits_2() {
    let out = run(&[
        "synthesize",
        "--theorem",
        "2",
        "--k",
        "4",
        "--v",
        "0.5",
        "--delta",
        "0.01",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synthesize_auto_delta_finds_feasible_tilt() {
    let out = run(&[
        "synthesize",
        "--theorem",
        "2",
        "--k",
        "3",
        "--v",
        "0.3",
        "--delta",
        "auto",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["feasible"], serde_json::Value::Bool(true));
}

#[test]
fn synthesized_sequence_feeds_simulation() {
    // synthesize a two-Kraus chain, then replay it through the simulator
    // with the oracle column on
    let out = run(&[
        "synthesize",
        "--theorem",
        "2",
        "--k",
        "3",
        "--v",
        "0.3",
        "--delta",
        "0.02",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let seq: Vec<f64> = doc["sequence"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(seq.len(), 3);
    let alphas = seq
        .iter()
        .map(|s| format!("{s:.17e}"))
        .collect::<Vec<_>>()
        .join(",");

    let out = run(&[
        "simulate",
        "--scheme",
        "two-kraus",
        "--k",
        "3",
        "--v",
        "0.3",
        "--delta",
        "0.02",
        "--theta",
        "0.7853981634",
        "--alphas",
        &alphas,
        "--oracle",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 3);
    for row in rows {
        let diff: f64 = row[3].parse().unwrap();
        assert!(diff < 1e-9);
        assert_eq!(row[4], "true");
    }
}

#[test]
fn tradeoff_endpoints_and_counts() {
    let out = run(&["tradeoff", "--curve", "a", "--samples", "3"]);
    assert!(out.status.success());
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 3);
    assert!((rows[0][2].parse::<f64>().unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    assert!((rows[1][2].parse::<f64>().unwrap() - 0.732051).abs() < 1e-6);
    assert!((rows[2][2].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);

    let out = run(&["tradeoff", "--curve", "b", "--samples", "2"]);
    let rows = csv_rows(&stdout(&out));
    assert!((rows[0][2].parse::<f64>().unwrap() - 0.414214).abs() < 1e-6);
    assert_eq!(rows[1][2], "0");

    let out = run(&["tradeoff", "--curve", "both", "--samples", "201"]);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 402);

    let out = run(&["tradeoff", "--curve", "a", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn verify_small_run_passes_and_is_deterministic() {
    let args = ["verify", "--seed", "42", "--trials", "10"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(
        stdout(&a),
        stdout(&b),
        "same seed must give identical bytes"
    );
    let text = stdout(&a);
    for suite in [
        "povm-completeness",
        "channel-trace",
        "oracle-equivalence",
        "sos-soundness",
        "t1-monotonicity",
        "t2-monotonicity",
        "marginal-invariance",
    ] {
        assert!(text.contains(&format!("{suite}: pass")), "missing {suite}");
    }
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let args = [
        "simulate",
        "--scheme",
        "four-kraus",
        "--k",
        "3",
        "--delta",
        "0.2",
        "--theta-rule",
        "max-ent",
        "--v",
        "0.4",
        "--alphas",
        "0.3,0.2,0.1",
        "--oracle",
        "--format",
        "json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("chsh-share-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curve.csv");
    let out = run(&[
        "tradeoff",
        "--curve",
        "a",
        "--samples",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let content = std::fs::read_to_string(&path).unwrap();
    assert!(content.starts_with("curve,anticomm,eta_critical\r\n"));
    assert_eq!(content.lines().count(), 6);
    std::fs::remove_dir_all(&dir).ok();
}
