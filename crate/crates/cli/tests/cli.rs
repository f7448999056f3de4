use std::process::{Command, Output};

use serde_json::Value;

fn waring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_waring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn zk_reports_enclosure() {
    let out = waring(&["zk", "--k", "2", "--precision", "1e-3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let (lo, hi) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    assert!(lo <= hi && hi - lo <= 1e-3);
    assert_eq!(v["paper_value"].as_f64(), Some(3.279));
    assert_eq!(v["agrees"], Value::Bool(true));
}

#[test]
fn local_check_exit_codes() {
    let fail = waring(&[
        "local",
        "check",
        "--k",
        "2",
        "--q",
        "5",
        "--s",
        "3",
        "--exhaustive",
    ]);
    assert_eq!(fail.status.code(), Some(1));
    assert_eq!(
        json(&fail)["counterexample"]["set"],
        serde_json::json!([1, 4])
    );
    let ok = waring(&["local", "check", "--k", "2", "--q", "5", "--s", "4"]);
    assert_eq!(ok.status.code(), Some(0));
    let min = waring(&["local", "minimal-s", "--k", "2", "--q", "5"]);
    assert_eq!(json(&min)["s"], 4);
}

#[test]
fn jcount_and_vq() {
    let out = waring(&["jcount", "--t", "1", "--k", "3", "--X", "17"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "17");
    let out = waring(&["jcount", "--t", "2", "--k", "2", "--X", "10"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "190");

    let out = waring(&["vq", "--k", "3", "--w", "3", "--b", "1", "--qmax", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,a,abs_vq"));
    assert_eq!(lines.count(), 1 + 1 + 2 + 2);
}

#[test]
fn pseudo_and_restrict() {
    let v = json(&waring(&[
        "pseudo", "--k", "2", "--w", "2", "--b", "1", "--N", "1024",
    ]));
    assert_eq!(v["arc_class"], "major(q=2,a=1)");
    assert_eq!(v["argmax_frequency"].as_f64(), Some(0.5));
    let v = json(&waring(&[
        "restrict",
        "--k",
        "2",
        "--qexp",
        "6.5",
        "--N",
        "4096",
        "--set",
        "all-powers",
    ]));
    assert!(v["K_hat"].as_f64().unwrap() > 0.5);
    let bad = waring(&["pseudo", "--b", "2", "--N", "1024"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn downset_demo_reads_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let sets = dir.path().join("sets.txt");
    std::fs::write(&sets, "1\n2\n4\n\n7\n8\n").unwrap();
    let out = waring(&[
        "downset",
        "demo",
        "--q",
        "15",
        "--sets",
        sets.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["before"].as_array().unwrap().len(), 2);
    assert!(v["sumset_size_after"].as_u64() <= v["sumset_size_before"].as_u64());

    std::fs::write(&sets, "1\nx\n").unwrap();
    assert_eq!(
        waring(&[
            "downset",
            "demo",
            "--q",
            "15",
            "--sets",
            sets.to_str().unwrap()
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn experiment_is_deterministic_and_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "k = 2\nN = 3000\ns = 5\ndensity = 0.8\nseed = 1\n").unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = waring(&[
            "experiment",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(matches!(out.status.code(), Some(0 | 1)));
    }
    let first = std::fs::read(&a).unwrap();
    assert_eq!(first, std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["config"]["seed"], "9");
    assert_eq!(v["config"]["density"], "0.8");

    let csv = waring(&[
        "experiment",
        "--N",
        "2000",
        "--n-min",
        "34",
        "--congruence-filter",
        "false",
        "--format",
        "csv",
    ]);
    assert_eq!(csv.status.code(), Some(0));
    assert!(String::from_utf8(csv.stdout)
        .unwrap()
        .starts_with("name,holds,measured,notes\n"));

    std::fs::write(&cfg, "nonsense = 1\n").unwrap();
    assert_eq!(
        waring(&["experiment", "--config", cfg.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn transfer_reports() {
    let out = waring(&[
        "transfer", "--k", "2", "--w", "2", "--b", "1", "--N", "1024", "--s", "8", "--eps", "0.5",
    ]);
    let v = json(&out);
    assert_eq!(v["holds"], Value::Bool(false));
    assert_eq!(out.status.code(), Some(1));
    assert!(v["min_convolution"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn report_runs_selected_criteria() {
    let ok = waring(&["report", "--criteria", "3,12"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["checks"].as_array().unwrap().len(), 2);
    let fail = waring(&["report", "--criteria", "6", "--format", "csv"]);
    assert_eq!(fail.status.code(), Some(1));
}

#[test]
fn usage_errors() {
    assert_eq!(waring(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(waring(&["zk"]).status.code(), Some(2));
    assert_eq!(waring(&["zk", "--k", "1"]).status.code(), Some(2));
}
