use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn kneser(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kneser"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kneser-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn chromatic_prints_exact_and_formula() {
    for (args, want) in [
        (
            ["--family", "allk", "--n", "5", "--k", "2"],
            "exact=3 formula=3",
        ),
        (
            ["--family", "stable", "--n", "6", "--k", "2"],
            "exact=4 formula=4",
        ),
        (
            ["--family", "allk", "--n", "3", "--k", "2"],
            "exact=1 formula=1",
        ),
    ] {
        let mut full = vec!["chromatic"];
        full.extend(args);
        full.extend(["--r", "2"]);
        let out = kneser(&full);
        assert!(out.status.success());
        assert_eq!(stdout(&out).trim(), want);
    }
}

#[test]
fn defect_of_two_singletons() {
    let out = kneser(&[
        "defect",
        "--family",
        "explicit",
        "--n",
        "2",
        "--members",
        "1;2",
        "--r",
        "2",
    ]);
    assert_eq!(stdout(&out).trim(), "defect=2");
}

#[test]
fn upperbound_has_no_monochromatic_edges() {
    let out = kneser(&["upperbound", "--n", "7", "--k", "2", "--r", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("monochromatic=0"));
}

#[test]
fn tucker_pipeline_finds_verified_edge() {
    let out = kneser(&[
        "pipeline", "--route", "tucker", "--family", "allk", "--n", "5", "--k", "2", "--p", "2",
        "--seed", "11",
    ]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["outcome"]["kind"], "hyperedge");
    assert_eq!(report["verdict"], true);
    assert_eq!(report["construction"], "general");
    assert_eq!(report["seed"], 11);
}

#[test]
fn condiv_pipeline_finds_verified_edge() {
    let out = kneser(&[
        "pipeline",
        "--route",
        "condiv",
        "--family",
        "allk",
        "--n",
        "5",
        "--k",
        "2",
        "--epsilon",
        "1",
    ]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["outcome"]["kind"], "hyperedge");
    assert_eq!(report["verdict"], true);
}

#[test]
fn faulty_oracle_yields_checked_violation() {
    let fault = scratch("fault.json");
    std::fs::write(
        &fault,
        r#"{"flips":[{"set":[1,2,3,4,5],"color":1},{"set":[1,2,3,4,5],"color":2}]}"#,
    )
    .unwrap();
    let out = kneser(&[
        "pipeline",
        "--route",
        "condiv",
        "--family",
        "allk",
        "--n",
        "5",
        "--k",
        "2",
        "--fault-file",
        fault.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["outcome"]["kind"], "violation");
    assert_eq!(report["verdict"], true);
}

#[test]
fn replay_reproduces_outcome() {
    let args = [
        "pipeline",
        "--route",
        "condiv",
        "--family",
        "allk",
        "--n",
        "6",
        "--k",
        "2",
        "--seed",
        "7",
        "--random-flips",
        "2",
    ];
    let a = json(&kneser(&args));
    let b = json(&kneser(&args));
    assert_eq!(a["outcome"].to_string(), b["outcome"].to_string());
    assert_eq!(a["params"].to_string(), b["params"].to_string());
}

#[test]
fn sweep_rows_all_verified() {
    let out = kneser(&[
        "sweep", "--n", "4..6", "--k", "2", "--p", "2", "--seeds", "0..4",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("family,n,k,p,route"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 30);
    for row in rows {
        assert!(row.contains(",hyperedge,true,"), "{row}");
    }
}

#[test]
fn sweep_marks_degenerate_cells() {
    let out = kneser(&[
        "sweep", "--n", "3", "--k", "2", "--routes", "condiv", "--seeds", "0",
    ]);
    let text = stdout(&out);
    assert!(
        text.lines()
            .nth(1)
            .unwrap()
            .contains("rejected: degenerate budget"),
        "{text}"
    );
}

#[test]
fn empty_sweep_is_header_only() {
    let out = kneser(&["sweep", "--n", "", "--seeds", "0"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn exit_codes() {
    let rejected = kneser(&[
        "pipeline", "--route", "condiv", "--family", "allk", "--n", "3", "--k", "2",
    ]);
    assert_eq!(rejected.status.code(), Some(2));
    let capped = kneser(&[
        "chromatic",
        "--family",
        "allk",
        "--n",
        "13",
        "--k",
        "2",
        "--r",
        "2",
    ]);
    assert_eq!(capped.status.code(), Some(2));
    let exhausted = kneser(&[
        "pipeline",
        "--route",
        "condiv",
        "--family",
        "allk",
        "--n",
        "5",
        "--k",
        "2",
        "--seed",
        "0",
        "--denominator",
        "5",
        "--doublings",
        "0",
    ]);
    assert_eq!(exhausted.status.code(), Some(3));
    assert_eq!(json(&exhausted)["outcome"]["kind"], "failure");
}

#[test]
fn staged_condiv_round_trip() {
    let inst = scratch("condiv-instance.json");
    let sol = scratch("condiv-solution.json");
    let i = inst.to_str().unwrap();
    let s = sol.to_str().unwrap();
    assert!(kneser(&[
        "reduce", "condiv", "--family", "allk", "--n", "5", "--k", "2", "--seed", "4", "--out", i
    ])
    .status
    .success());
    assert!(kneser(&["solve", "condiv", "--instance", i, "--out", s])
        .status
        .success());
    let out = kneser(&["extract", "condiv", "--instance", i, "--solution", s]);
    assert!(out.status.success());
    assert_eq!(json(&out)["kind"], "hyperedge");
}

#[test]
fn staged_tucker_round_trip() {
    let inst = scratch("tucker-instance.json");
    let sol = scratch("tucker-solution.json");
    let i = inst.to_str().unwrap();
    let s = sol.to_str().unwrap();
    assert!(kneser(&[
        "reduce", "tucker", "--family", "stable", "--n", "8", "--k", "2", "--out", i
    ])
    .status
    .success());
    assert!(kneser(&["solve", "tucker", "--instance", i, "--out", s])
        .status
        .success());
    let out = kneser(&["extract", "tucker", "--instance", i, "--solution", s]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["verdict"], true);
}

#[test]
fn random_table_instance_solves() {
    let table = scratch("table.json");
    let t = table.to_str().unwrap();
    assert!(kneser(&[
        "reduce", "tucker", "--random", "--length", "5", "--p", "3", "--seed", "2", "--out", t
    ])
    .status
    .success());
    let out = kneser(&["solve", "tucker", "--table", t]);
    assert!(out.status.success());
    assert_eq!(json(&out)["vectors"].as_array().unwrap().len(), 3);
}
