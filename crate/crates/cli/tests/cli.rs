use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fsdim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fsdim")).current_dir(dir).args(args).output().unwrap()
}

fn json(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

#[test]
fn generate_writes_requested_length() {
    let dir = tempfile::tempdir().unwrap();
    let out = fsdim(dir.path(), &["generate", "champernowne", "--base", "2", "--n", "1048576", "-o", "c.txt"]);
    assert!(out.status.success());
    let file = fsdim::sequences::parse_digits(&std::fs::read_to_string(dir.path().join("c.txt")).unwrap()).unwrap();
    assert_eq!(file.base, 2);
    assert_eq!(file.digits.len(), 1 << 20);

    let out = fsdim(dir.path(), &["dims", "-i", "c.txt", "--l", "1,2,4,8", "--json", "d.json"]);
    assert!(out.status.success());
    let report = json(dir.path(), "d.json");
    assert_eq!(report["tool"], "fsdim");
    assert_eq!(report["config"]["command"]["dims"]["l"], "1,2,4,8");
    assert!(report["result"]["dim_lo"].as_f64().unwrap() >= 0.96);
}

#[test]
fn reports_are_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    fsdim(dir.path(), &["generate", "diluted", "--pattern", "0**0", "--n", "50000", "-o", "b.txt"]);
    let one = fsdim(dir.path(), &["--threads", "1", "entropy", "-i", "b.txt", "--l", "1..6"]);
    let many = fsdim(dir.path(), &["--threads", "4", "entropy", "-i", "b.txt", "--l", "1..6"]);
    assert!(one.status.success());
    let strip = |o: &Output| {
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["config"]["threads"] = Value::Null;
        v
    };
    assert_eq!(strip(&one), strip(&many));
}

#[test]
fn weyl_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    fsdim(dir.path(), &["generate", "champernowne", "--n", "20000", "-o", "c.txt"]);
    let out = fsdim(dir.path(), &["weyl", "-i", "c.txt", "--k", "1..3", "--checkpoints", "linear:4", "--csv", "s.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,n,re,im,err_bound"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn arith_round_trip_and_measure_reports() {
    let dir = tempfile::tempdir().unwrap();
    fsdim(dir.path(), &["generate", "diluted", "--pattern", "0*", "--n", "5000", "-o", "a.txt"]);
    let out = fsdim(dir.path(), &["arith", "-i", "a.txt", "--mul", "3", "--want", "4000", "--out", "a3.txt"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let file = fsdim::sequences::parse_digits(&std::fs::read_to_string(dir.path().join("a3.txt")).unwrap()).unwrap();
    assert_eq!(file.digits.len(), 4000);

    std::fs::write(dir.path().join("m.json"), r#"{"kind":"bernoulli","p":[0.7,0.3]}"#).unwrap();
    let out = fsdim(dir.path(), &["measure", "--spec", "m.json", "renyi", "--m", "2", "--n", "1..4", "--json", "r.json"]);
    assert!(out.status.success());
    let values = json(dir.path(), "r.json")["result"]["values"].clone();
    let h = fsdim::numeric::binary_entropy(0.3);
    for v in values.as_array().unwrap() {
        assert!((v.as_f64().unwrap() - h).abs() < 1e-12);
    }

    std::fs::write(dir.path().join("g.json"), r#"{"states":1,"delta":[[0,0]],"beta":[0.5],"q0":0,"c0":1}"#).unwrap();
    let out = fsdim(dir.path(), &["gamble", "--gambler", "g.json", "-i", "a.txt", "--s", "1", "--checkpoints", "100,5000"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["result"]["log2_capital"], serde_json::json!([0.0, 0.0]));
}

#[test]
fn stage_table() {
    let out = fsdim(Path::new("."), &["repro", "--case", "lemma41"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains("22369280"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fsdim(dir.path(), &["nonsense"]).status.code(), Some(2));
    assert_eq!(fsdim(dir.path(), &["entropy", "-i", "missing.txt"]).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.txt"), "#base:2\n0120").unwrap();
    assert_eq!(fsdim(dir.path(), &["entropy", "-i", "bad.txt"]).status.code(), Some(2));
    std::fs::write(dir.path().join("bad.json"), r#"{"kind":"bernoulli","p":[0.7,0.4]}"#).unwrap();
    assert_eq!(fsdim(dir.path(), &["measure", "--spec", "bad.json", "average"]).status.code(), Some(2));
    // 1/3 times 3 never certifies a digit
    std::fs::write(dir.path().join("third.txt"), format!("#base:2\n{}", "01".repeat(200))).unwrap();
    let out = fsdim(dir.path(), &["arith", "-i", "third.txt", "--mul", "3", "--want", "300"]);
    assert_eq!(out.status.code(), Some(0), "finite input is read as terminating");
    assert_eq!(fsdim(dir.path(), &["repro", "--case", "8"]).status.code(), Some(0));
    assert_eq!(fsdim(dir.path(), &["repro", "--case", "99"]).status.code(), Some(2));
}
