//! End-to-end runs of the `bsq` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn bsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bsq"))
        .args(args)
        .env_remove("BSQ_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verlinde_subcommand() {
    let out = bsq(&["verlinde", "--genus", "2", "--level", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["dim"], 10);
    for key in [
        "genus",
        "level",
        "raw_sum",
        "error_bound",
        "tool_version",
        "subcommand",
        "parameters",
    ] {
        assert!(doc.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn precision_override_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_bsq"))
        .args(["verlinde", "--genus", "8", "--level", "24"])
        .env("BSQ_PRECISION", "64")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "integrality-failure");

    let out = Command::new(env!("CARGO_BIN_EXE_bsq"))
        .args(["verlinde", "--genus", "2", "--level", "1"])
        .env("BSQ_PRECISION", "12")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn weights_on_builtin_graphs() {
    let out = bsq(&["weights", "--graph", "theta2", "--level", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["count"], 4);
    assert_eq!(
        doc["weights"],
        serde_json::json!([[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]])
    );

    let out = bsq(&[
        "weights",
        "--graph",
        "dumbbell2",
        "--level",
        "2",
        "--count-only",
    ]);
    let doc = json(&out);
    assert_eq!(doc["count"], 10);
    assert!(doc.get("weights").is_none());
    assert_eq!(doc["graph"]["bridges"], serde_json::json!([1]));
}

#[test]
fn weights_from_a_graph_file() {
    let dir = std::env::temp_dir().join(format!("bsq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("theta2.txt");
    std::fs::write(&path, "v 2\ne 0 1\ne 0 1\ne 0 1\n").unwrap();
    let p = path.to_str().unwrap();

    let out = bsq(&["weights", "--graph", p, "--level", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["count"], 10);

    let out = bsq(&["weights", "--graph", p, "--level", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    std::fs::write(&path, "v 2\ne 0 1\ne 0 1\n").unwrap();
    let out = bsq(&["weights", "--graph", p, "--level", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "graph");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn graphs_subcommand() {
    let out = bsq(&["graphs", "--genus", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["count"], 5);
    assert_eq!(bsq(&["graphs", "--genus", "1"]).status.code(), Some(2));
}

#[test]
fn theta_basis_subcommand() {
    let out = bsq(&["theta-basis", "--level", "3", "--tau", "0.3,1.1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["entries"].as_array().unwrap().len(), 3);
    assert!(doc["smallest_singular_value"].as_f64().unwrap() > 1e-9);
    assert!(doc["det_modulus"].as_f64().unwrap() > 0.0);
    assert_eq!(
        bsq(&["theta-basis", "--level", "3", "--tau", "0,0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn ucurve_json_and_csv() {
    let args = [
        "ucurve", "--level", "2", "--u", "1,0", "--s-min", "-2", "--s-max", "2", "--grid", "1000",
        "--tol", "1e-9",
    ];
    let out = bsq(&args);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let pts = doc["points"].as_array().unwrap();
    assert!(pts
        .iter()
        .any(|p| p["b"] == 0.25 && p["m"] == 1 && p["s"][0] == 0.5));

    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let out = bsq(&csv_args);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("b,re_s,im_s,m"));
    assert_eq!(lines.count(), pts.len());
    assert!(text.contains("0.25,0.5,0,1\n"));
}

#[test]
fn verify_jw_exit_codes() {
    let out = bsq(&["verify-jw", "--genus", "2", "--max-level", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["all_equal"], true);

    let out = bsq(&[
        "verify-jw",
        "--genus",
        "2",
        "--max-level",
        "1",
        "--half-open",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    assert_eq!(doc["all_equal"], false);
    assert_eq!(doc["rows"][0]["count"], 1);
    assert_eq!(doc["rows"][0]["dim"], 4);

    assert_eq!(
        bsq(&["verify-jw", "--genus", "4", "--max-level", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        vec!["verify-jw", "--genus", "3", "--max-level", "2"],
        vec!["theta-basis", "--level", "4"],
        vec!["graphs", "--genus", "4"],
    ] {
        let a = bsq(&args);
        let b = bsq(&args);
        assert_eq!(a.stdout, b.stdout);
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn output_flag_writes_the_document() {
    let path = std::env::temp_dir().join(format!("bsq-out-{}.json", std::process::id()));
    let out = bsq(&[
        "verlinde",
        "--genus",
        "3",
        "--level",
        "1",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["dim"], 8);
    std::fs::remove_file(&path).unwrap();
}
