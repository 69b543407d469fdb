use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tvopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn switching_passes_and_writes_three_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let res = tvopt(&[
        "simulate",
        "--scenario",
        "switching",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    for f in ["trace.csv", "bound_report.json", "resolved_config.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    assert!(!out.join("error.json").exists());
    let report = json(&out.join("bound_report.json"));
    assert_eq!(report["passed"], true);
    assert_eq!(report["manifest"]["source"]["scenario"], "switching");
    assert!(report["bound"]["C"].as_f64().unwrap() > 0.0);
    let header = fs::read_to_string(out.join("trace.csv")).unwrap();
    let header = header.lines().next().unwrap();
    assert_eq!(
        header,
        "t,y_1,y_2,ystar_1,ystar_2,gradnorm_0,gradnorm_1,u_1,u_2,envelope"
    );
}

#[test]
fn zero_initial_speed_is_a_runtime_failure_at_t0() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let res = tvopt(&[
        "simulate",
        "--scenario",
        "switching",
        "--set",
        "wmr.u1_init=0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 1);
    let err = json(&out.join("error.json"));
    assert_eq!(err["kind"], "SingularityError");
    assert_eq!(err["t"], 0.0);
    let resolved = json(&out.join("resolved_config.json"));
    assert_eq!(resolved["wmr"]["u1_init"], 0.0);
}

#[test]
fn config_problems_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = out.to_str().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(
        code(&tvopt(&[
            "simulate",
            "--config",
            missing.to_str().unwrap(),
            "--out",
            o
        ])),
        2
    );
    assert_eq!(
        code(&tvopt(&["simulate", "--scenario", "nope", "--out", o])),
        2
    );
    assert_eq!(
        code(&tvopt(&[
            "simulate",
            "--scenario",
            "switching",
            "--set",
            "sim.bogus=1",
            "--out",
            o
        ])),
        2
    );
    assert_eq!(
        code(&tvopt(&[
            "simulate",
            "--scenario",
            "switching",
            "--set",
            "gains.poles.0=1",
            "--out",
            o
        ])),
        2
    );
    assert_eq!(
        code(&tvopt(&[
            "simulate",
            "--scenario",
            "switching",
            "--set",
            "sim.t_end=-1",
            "--out",
            o
        ])),
        2
    );
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"name\": 3}").unwrap();
    assert_eq!(
        code(&tvopt(&[
            "simulate",
            "--config",
            bad.to_str().unwrap(),
            "--out",
            o
        ])),
        2
    );
    assert!(!out.exists());
}

#[test]
fn resolved_config_reproduces_the_trace() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    let res = tvopt(&[
        "simulate",
        "--scenario",
        "gradient_flow",
        "--set",
        "sim.t_end=4",
        "--set",
        "criteria.tracking.0.from=3",
        "--set",
        "criteria.tracking.0.to=4",
        "--set",
        "criteria.tracking.0.threshold=0.1",
        "--out",
        first.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let config = first.join("resolved_config.json");
    let res = tvopt(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0);
    assert_eq!(
        fs::read(first.join("trace.csv")).unwrap(),
        fs::read(second.join("trace.csv")).unwrap()
    );
}

#[test]
fn parallel_runs_get_their_own_directories() {
    let dir = tempfile::tempdir().unwrap();
    let res = tvopt(&[
        "simulate",
        "--scenario",
        "gradient_flow",
        "--scenario",
        "multi_robot",
        "--jobs",
        "2",
        "--seed",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    for name in ["gradient_flow", "multi_robot"] {
        let report = json(&dir.path().join(name).join("bound_report.json"));
        assert_eq!(report["manifest"]["seed"], 7);
    }
}

#[test]
fn check_lemma_passes_and_is_reproducible() {
    let a = tvopt(&["check-lemma", "--trials", "30", "--seed", "5"]);
    let b = tvopt(&["check-lemma", "--trials", "30", "--seed", "5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        String::from_utf8_lossy(&a.stdout)
            .lines()
            .filter(|l| l.starts_with("order"))
            .count(),
        3
    );
}

#[test]
fn check_lemma_order_four_needs_the_cap_raised() {
    assert_eq!(code(&tvopt(&["check-lemma", "--orders", "4"])), 2);
    assert_eq!(
        code(&tvopt(&[
            "check-lemma",
            "--orders",
            "4",
            "--partial-cap",
            "5",
            "--trials",
            "8"
        ])),
        0
    );
}

#[test]
fn design_gains_examples() {
    let res = tvopt(&["design-gains", "--poles", "-2,-3", "--m", "2"]);
    assert_eq!(code(&res), 0);
    let g: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(g["coefficients"], serde_json::json!([-6.0, -5.0]));

    let res = tvopt(&["design-gains", "--poles", "-1", "--k", "1"]);
    let g: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(g["coefficients"], serde_json::json!([-1.0]));
    assert!((g["alpha"].as_f64().unwrap() - 0.999).abs() < 1e-15);

    assert_eq!(code(&tvopt(&["design-gains", "--poles", "1"])), 1);
    assert_eq!(
        code(&tvopt(&["design-gains", "--poles", "-1,-2", "--k", "3"])),
        2
    );
}
