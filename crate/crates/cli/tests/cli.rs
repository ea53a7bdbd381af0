use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn braidmat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braidmat")).args(args).env_remove("BRAIDMAT_BUDGET").output().expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is json")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn t0_rejects_lone_outer_pair() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "m.pairs", "3:1-3");
    let out = braidmat(&["t0", s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "NotT0");
    assert_eq!(err["detail"]["j"], 2);
}

#[test]
fn t0_accepts_json_and_pairs() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "m.json", "[[0,2,2],[2,0,0],[2,0,0]]");
    let out = braidmat(&["t0", s(&a)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["t0"], true);
    let b = write(dir.path(), "m.txt", "1-2,2-3");
    assert_eq!(braidmat(&["t0", "--n", "3", s(&b)]).status.code(), Some(0));
}

#[test]
fn pair_list_needs_strand_count() {
    let dir = TempDir::new().unwrap();
    let f = write(dir.path(), "m.txt", "1-2");
    assert_eq!(braidmat(&["t0", s(&f)]).status.code(), Some(2));
}

#[test]
fn enumerate_counts() {
    for (n, c) in [(3, "7"), (5, "357"), (6, "4824")] {
        let out = braidmat(&["enumerate", "--n", &n.to_string(), "--count-only"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), c);
    }
    let out = braidmat(&["enumerate", "--n", "3"]);
    let v = stdout_json(&out);
    assert_eq!(v["count"], 7);
    assert_eq!(v["masks"][0], "");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(braidmat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(braidmat(&["enumerate"]).status.code(), Some(2));
    assert_eq!(braidmat(&["realize", "x.json", "--kind", "sideways"]).status.code(), Some(2));
}

#[test]
fn realize_then_verify_round_trips() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("cn", "6:1-2,1-3,1-5,1-6,2-3,2-5,3-6,4-5,4-6,5-6"),
        ("cn", "5:1-3,2-3,2-5,3-5,4-5"),
        ("ou", "[[0,1,0],[1,0,3],[0,1,0]]"),
        ("crossing", "[[0,2,4],[2,0,0],[4,0,0]]"),
    ];
    for (i, (kind, body)) in cases.iter().enumerate() {
        let name = if body.starts_with('[') { format!("m{i}.json") } else { format!("m{i}.pairs") };
        let m = write(dir.path(), &name, body);
        let cert = dir.path().join(format!("c{i}.json"));
        let out = braidmat(&["realize", "--kind", kind, s(&m), "--out", s(&cert)]);
        assert_eq!(out.status.code(), Some(0), "{kind} {body}: {}", String::from_utf8_lossy(&out.stderr));
        let out = braidmat(&["verify", s(&cert)]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout_json(&out)["valid"], true);
    }
}

#[test]
fn tampered_certificate_fails() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.pairs", "4:1-2,2-3,3-4");
    let out = braidmat(&["realize", s(&m)]);
    let mut cert = stdout_json(&out);
    cert["witness"] = Value::from("1 1 2 2");
    let f = write(dir.path(), "bad.json", &cert.to_string());
    let out = braidmat(&["verify", s(&f)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "CertificateInvalid");
}

#[test]
fn realize_rejects_non_t0() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.json", "[[0,0,2],[0,0,0],[2,0,0]]");
    let out = braidmat(&["realize", s(&m)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "NotT0");
    let m = write(dir.path(), "o.json", "[[0,1],[0,0]]");
    let out = braidmat(&["realize", "--kind", "ou", s(&m)]);
    assert_eq!(stderr_json(&out)["error"], "SumNotEven");
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.pairs", "6:1-3,2-3,2-4,2-5,2-6,3-6,4-6,5-6");
    let a = braidmat(&["realize", s(&m)]);
    let b = braidmat(&["realize", s(&m)]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn matrix_of_words() {
    let dir = TempDir::new().unwrap();
    let w = write(dir.path(), "w.txt", "1 2 2 1");
    let v = stdout_json(&braidmat(&["matrix", s(&w)]));
    assert_eq!(v["n"], 3);
    assert_eq!(v["pure"], true);
    assert_eq!(v["cn"][0][1], 2);
    let d = write(dir.path(), "d.txt", "4: +1 +1 -3");
    let v = stdout_json(&braidmat(&["matrix", s(&d)]));
    assert_eq!(v["ou"][0][1], 1);
    assert_eq!(v["ou"][1][0], 1);
    assert_eq!(v["crossing"][3][2], -1);
    assert_eq!(v["pure"], false);
    let out = braidmat(&["matrix", s(&d), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("matrix,i,j,value\n"));
    assert!(text.contains("crossing,4,3,-1\n"));
}

#[test]
fn ladder_search_then_apply() {
    let dir = TempDir::new().unwrap();
    let l = write(dir.path(), "l.txt", "6: B1.4 B2.4 B3.4 B4.5 B4.6");
    let eval = stdout_json(&braidmat(&["ladder", "eval", s(&l)]));
    let out = braidmat(&["ladder", "search", s(&l)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let found = stdout_json(&out);
    assert_eq!(found["w_ladder"], true);
    assert_eq!(found["counts"], eval["counts"]);
    let t = write(dir.path(), "t.json", &found["trace"].to_string());
    let applied = stdout_json(&braidmat(&["ladder", "apply", s(&l), "--moves", s(&t)]));
    assert_eq!(applied["diagram"], found["diagram"]);
    assert_eq!(applied["preserved"], true);
}

#[test]
fn ladder_apply_rejects_illegal_move() {
    let dir = TempDir::new().unwrap();
    let l = write(dir.path(), "l.txt", "3: W1 W2");
    let t = write(dir.path(), "t.json", r#"[{"move":"L1","index":0,"dir":"forward"}]"#);
    let out = braidmat(&["ladder", "apply", s(&l), "--moves", s(&t)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "IllegalMove");
}

#[test]
fn tstructure_emits_graph() {
    let dir = TempDir::new().unwrap();
    let m = write(dir.path(), "m.pairs", "5:1-2,1-3,2-3,2-4,3-4,3-5,4-5");
    let out = braidmat(&["tstructure", s(&m)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["graph"]["vertices"].as_array().unwrap().len(), 7);
    assert!(v["report"]["c1"].as_array().unwrap().is_empty());
}

#[test]
fn formation_descriptor() {
    let out = braidmat(&["formation", "--n", "6", "H k=1 l=6 m=3 flags=km,ml"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["admissible"], true);
    assert!(v["mask"].as_str().unwrap().contains("1-6"));
    let out = braidmat(&["formation", "--n", "4", "H k=1 l=2 m=3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn budget_from_environment() {
    let dir = TempDir::new().unwrap();
    let l = write(dir.path(), "l.txt", "4: B1.3 B1.2 B2.3");
    let out = Command::new(env!("CARGO_BIN_EXE_braidmat"))
        .args(["ladder", "search", s(&l)])
        .env("BRAIDMAT_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "BudgetExhausted");
}

#[test]
fn theorem6_small_and_full() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("r4.csv");
    let out = braidmat(&["theorem6", "--n", "4", "--out", s(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mask,method,word_length,nodes,micros,verified"));
    assert_eq!(lines.filter(|l| l.ends_with(",true")).count(), 40);

    let out = braidmat(&["theorem6", "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().skip(1).filter(|l| l.ends_with(",true")).count(), 4824);
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary["verified"], 4824);
}
