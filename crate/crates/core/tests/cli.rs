use std::fs;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn surgelens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surgelens"))
        .args(args)
        .env_remove("SURGELENS_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn classify_exit_codes() {
    let o = surgelens(&["classify", "--family", "milnor3", "--slopes", "1/1,1/1,7/1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["lens"], json!([7, 2]));
    let o = surgelens(&["classify", "--family", "milnor3", "--slopes", "2/1,4/1,1/1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout_json(&o)["outcome"], "not_cyclic_h1");
    let o = surgelens(&["classify", "--family", "milnor3", "--slopes", "1/x,1,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    let o = surgelens(&["classify", "--family", "whitehead", "--twists", "-1", "--slopes", "-3/1,-4/1"]);
    assert_eq!(stdout_json(&o)["lens"], json!([12, 5]));
}

#[test]
fn obstruct_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let m4 = dir.path().join("m4.json");
    fs::write(&m4, r#"{"link":{"family":"milnor","components":4},"slopes":["1/1","1/1","2/1","3/1"]}"#).unwrap();
    let o = surgelens(&["obstruct", m4.to_str().unwrap(), "-k", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["k"], 4);
    assert_eq!(v["excluded_by"], "norm");

    let m3 = dir.path().join("m3.json");
    fs::write(&m3, r#"{"link":{"family":"milnor","components":3},"slopes":["1/1","1/1",7]}"#).unwrap();
    let o = surgelens(&["obstruct", m3.to_str().unwrap(), "-k", "3", "--target", "7,4"]);
    let v = stdout_json(&o);
    assert_eq!(v["status"], "candidate");
    assert_eq!(v["targeted"]["aggregate"], true);

    let bt = dir.path().join("bt.json");
    fs::write(&bt, r#"{"link":{"family":"brunnian_type","components":3,"f":"t1+t1^-1-1"},"slopes":["1/1","1/1","7/1"]}"#)
        .unwrap();
    let o = surgelens(&["obstruct", bt.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 3);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{}").unwrap();
    assert_eq!(surgelens(&["obstruct", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn scan_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for par in ["1", "3"] {
        for format in ["json", "csv"] {
            let path = dir.path().join(format!("{par}.{format}"));
            let o = surgelens(&[
                "scan", "--family", "milnor3", "--max-abs-p", "6", "--max-abs-q", "3", "--parallelism", par, "--format",
                format, "--output", path.to_str().unwrap(),
            ]);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
            outputs.push(fs::read(&path).unwrap());
        }
    }
    assert_eq!(outputs[0], outputs[2]);
    assert_eq!(outputs[1], outputs[3]);
    let csv = String::from_utf8(outputs[1].clone()).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "p1,q1,p2,q2,p3,q3,verdict,lens_p,lens_q,case,excluded_by,needs_review");
}

#[test]
fn scan_config_file_and_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.cfg");
    fs::write(&cfg, "family = milnor\ncomponents = 4\nmax_abs_p = 3\nmax_abs_q = 2\nformat = json\n").unwrap();
    let o = surgelens(&["scan", "--config", cfg.to_str().unwrap(), "--parallelism", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["config"]["link"]["components"], 4);
    assert!(v["summary"]["scanned"].as_u64().unwrap() > 0);

    let o = surgelens(&["scan", "--family", "milnor3", "--max-abs-p", "0", "--max-abs-q", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout_json(&o)["records"].as_array().unwrap().is_empty());
}

/// Every lens record's certificates are reproduced by `obstruct --target`.
#[test]
fn lens_records_revalidate_through_obstruct() {
    let o = surgelens(&["scan", "--family", "milnor3", "--max-abs-p", "10", "--max-abs-q", "3"]);
    let report = stdout_json(&o);
    let dir = tempfile::tempdir().unwrap();
    let mut checked = 0;
    for r in report["records"].as_array().unwrap() {
        if r["verdict"] != "lens" {
            continue;
        }
        let spec = json!({"link": report["config"]["link"], "slopes": r["slopes"]});
        let path = dir.path().join("spec.json");
        fs::write(&path, spec.to_string()).unwrap();
        let target = format!("{},{}", r["lens"][0], r["lens"][1]);
        for cert in r["certificates"].as_array().unwrap() {
            let k = cert["k"].as_u64().unwrap();
            let o = surgelens(&["obstruct", path.to_str().unwrap(), "-k", &k.to_string(), "--target", &target]);
            let v = stdout_json(&o);
            assert_eq!(v["targeted"]["divisors"], cert["divisors"], "{spec} k={k}");
            assert_eq!(v["targeted"]["aggregate"], true);
            checked += 1;
        }
    }
    assert!(checked > 10);
}

#[test]
fn norm_alex_and_verify() {
    let o = surgelens(&["norm", "--d", "6", "--poly", "1-u"]);
    assert_eq!(stdout_json(&o)["norm"], "1");
    let o = surgelens(&["alex", "--family", "milnor3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout_json(&o)["alexander"].as_str().unwrap().contains("t1"));
    let o = surgelens(&["verify-paper", "--only", "2", "--only", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.contains("[PASS]")));
}
