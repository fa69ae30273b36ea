use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name);
    p.to_str().unwrap().to_owned()
}

fn zefc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zefc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn graphs_writes_edge_lists_and_dot_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = zefc(&[
        "graphs",
        &data("equality.json"),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for name in ["f_rook", "conf_x", "conf_y"] {
        assert!(dir.path().join(format!("{name}.dot")).exists());
        assert!(dir.path().join(format!("{name}.edges")).exists());
    }
    let edges = std::fs::read_to_string(dir.path().join("f_rook.edges")).unwrap();
    assert!(edges.starts_with("# vertices 10\n"));
    assert!(edges.contains("# edges 10\n"));

    let report = json(&zefc(&["graphs", &data("equality.json")]));
    assert_eq!(report[1]["edges"].as_array().unwrap().len(), 5);
}

#[test]
fn bounds_flags_tightness_for_min() {
    let report = json(&zefc(&["bounds", &data("min.json")]));
    assert_eq!(report["tight"], Value::Bool(true));
    let report = json(&zefc(&[
        "bounds",
        &data("equality.json"),
        "--point",
        "3,3,3",
    ]));
    assert_eq!(report["tight"], Value::Bool(false));
    assert_eq!(report["membership"], "inside_inner");
}

#[test]
fn entropy_reports_and_trace() {
    let report = json(&zefc(&["entropy", "chromatic", &data("equality.json")]));
    assert_eq!(report[0]["bits"].as_f64().unwrap(), 1.0);
    assert_eq!(report[0]["vertices"].as_u64().unwrap(), 10);

    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = zefc(&[
        "entropy",
        "graph",
        &data("equality.json"),
        "--graph",
        "x",
        "--trace",
        path(&trace),
    ]);
    let report = json(&out);
    assert!((report[0]["bits"].as_f64().unwrap() - 2.5f64.log2()).abs() < 1e-6);
    assert!(std::fs::read_to_string(trace)
        .unwrap()
        .starts_with("iter,objective_bits\n"));
}

#[test]
fn cap_violation_exits_with_four() {
    let out = zefc(&[
        "entropy",
        "chromatic",
        &data("equality.json"),
        "--n",
        "2",
        "--graph",
        "x",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    let out = zefc(&[
        "entropy",
        "chromatic",
        &data("equality.json"),
        "--n",
        "2",
        "--graph",
        "x",
        "--cap-vertices",
        "25",
    ]);
    assert!(out.status.success());
}

#[test]
fn verify_accepts_good_and_rejects_bad_schemes() {
    let out = zefc(&[
        "verify",
        &data("equality.json"),
        "--scheme",
        &data("equality_scheme.json"),
    ]);
    assert_eq!(json(&out)["zero_error"], Value::Bool(true));

    let out = zefc(&[
        "verify",
        &data("equality.json"),
        "--scheme",
        &data("equality_scheme_broken.json"),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["violation"][0][0], "(0,0)");
}

#[test]
fn simulate_is_byte_identical_and_reports_verdicts() {
    let (inst, scheme) = (data("equality.json"), data("equality_scheme.json"));
    let args = [
        "simulate", &inst, "--scheme", &scheme, "--blocks", "20000", "--seed", "7",
    ];
    let a = zefc(&args);
    let b = zefc(&args);
    assert_eq!(a.stdout, b.stdout);
    let report = json(&a);
    assert_eq!(report["exact"]["r_c"].as_f64().unwrap(), 1.0);
    assert_eq!(report["zero_error"]["zero_error"], Value::Bool(true));
    assert_eq!(report["relay"]["computable"], Value::Bool(true));
}

#[test]
fn check_relay_on_greater_than() {
    let out = zefc(&[
        "check-relay",
        &data("greater_than.json"),
        "--scheme",
        &data("greater_than_scheme.json"),
    ]);
    let report = json(&out);
    assert_eq!(report["computable"], Value::Bool(false));
    assert!((report["residual_bits"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn region_csv_lists_frontier_points() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("xor.json");
    std::fs::write(
        &inst,
        r#"{"alphabet_x":["0","1"],"alphabet_y":["0","1"],
            "pmf":[["1/4","1/4"],["1/4","1/4"]],"f":[[0,1],[1,0]]}"#,
    )
    .unwrap();
    let out = zefc(&["region", path(&inst), "--n", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,r_a,r_b,r_c\n"));
    assert!(text.lines().any(|l| l.starts_with("1,")));
    assert!(text.lines().any(|l| l.starts_with("2,")));
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"alphabet_x":["0"],"alphabet_y":["0","1"],"pmf":[["1/2","1/3"]],"f":[[0,0]]}"#,
    )
    .unwrap();
    assert_eq!(zefc(&["bounds", path(&bad)]).status.code(), Some(2));
    assert_eq!(
        zefc(&["bounds", "/nonexistent/instance.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(zefc(&["frobnicate", path(&bad)]).status.code(), Some(2));
    assert_eq!(
        zefc(&[
            "graphs",
            &data("equality.json"),
            "--format",
            "csv",
            "--n",
            "2"
        ])
        .status
        .code(),
        Some(2)
    );
    let out = zefc(&[
        "verify",
        &data("equality.json"),
        "--scheme",
        &data("equality_scheme.json"),
        "--n",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
