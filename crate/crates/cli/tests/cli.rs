use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;

use boolkit::compact::faicom_family;
use boolkit::proofs::corpus::{corpus_signature, curated};
use boolkit::{BValuedModel, Signature};

struct Run {
    code: i32,
    stdout: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).expect("report is JSON")
    }
}

fn boolkit(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_boolkit")).args(args).output().expect("binary runs");
    Run { code: out.status.code().expect("exit code"), stdout: String::from_utf8(out.stdout).expect("utf-8") }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_sig(dir: &TempDir, sig: &Signature) -> PathBuf {
    write(dir, "sig.json", &serde_json::to_string(sig).unwrap())
}

#[test]
fn oracle_refutes_faicom() {
    let dir = TempDir::new().unwrap();
    let (family, sig) = faicom_family(3);
    let sig_path = write_sig(&dir, &sig);
    let theory: Vec<String> = family.iter().map(|f| f.to_string()).collect();
    let t = write(&dir, "t.json", &serde_json::to_string(&theory).unwrap());
    let r = boolkit(&["oracle", "--sig", s(&sig_path), "--theory", s(&t)]);
    assert_eq!(r.code, 1);
    let v = r.json();
    assert_eq!(v["result"]["status"], "Inconsistent");
    assert_eq!(v["verdict"], "refuted");
    assert_eq!(v["config"]["command"]["name"], "oracle");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn faicom_report_feeds_the_oracle() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f.json");
    assert_eq!(boolkit(&["faicom", "--n", "2", "--out", s(&out)]).code, 0);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let sig = write(&dir, "sig.json", &report["result"]["signature"].to_string());
    assert_eq!(report["result"]["single_deletions"].as_array().unwrap().len(), 3);
    assert_eq!(boolkit(&["oracle", "--sig", s(&sig), "--theory", s(&out)]).code, 1);
}

#[test]
fn eval_empty_conjunction() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"atoms": 2, "domain": ["a"], "eq": [["11"]], "relations": {}, "consts": {}}"#);
    let r = boolkit(&["eval", "--model", s(&m), "--formula", "(and)"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["result"]["value"], "11");
}

#[test]
fn star_family_compacts() {
    let dir = TempDir::new().unwrap();
    let sig = Signature::with_fresh(&[("P", 1)], 2);
    let m = BValuedModel::tarski(
        vec!["a".into(), "b".into()],
        BTreeMap::from([("P".to_string(), (1, vec![true, false]))]),
        BTreeMap::from([("c0".to_string(), 0), ("c1".to_string(), 1)]),
    )
    .unwrap();
    let sig_path = write_sig(&dir, &sig);
    let model = write(&dir, "m.json", &m.to_json());
    let t = write(&dir, "t.json", r#"["(or (P c0) (P c1))", "(not (= c0 c1))"]"#);
    let star = dir.path().join("star.json");
    let r = boolkit(&["star", "--sig", s(&sig_path), "--model", s(&model), "--theory", s(&t), "--out", s(&star)]);
    assert_eq!(r.code, 0);
    let r = boolkit(&["compact", "--sig", s(&sig_path), "--family", s(&star)]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let v = r.json();
    assert!(v["result"]["model"]["atoms"].as_u64().unwrap() >= 1);
    assert_eq!(v["result"]["union_status"], "Consistent");
}

#[test]
fn same_arguments_same_report() {
    let dir = TempDir::new().unwrap();
    let sig = write_sig(&dir, &corpus_signature());
    let (_, proof) = curated().into_iter().next().unwrap();
    let p = write(&dir, "p.json", &proof.to_json());
    let args = ["proof-check", "--sig", s(&sig), "--proof", s(&p), "--probe", "20", "--seed", "9"];
    let a = boolkit(&args);
    let b = boolkit(&args);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.json()["config"]["seed"], 9);
    assert_eq!(a.json()["result"]["probe"]["trials"], 20);
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(boolkit(&["no-such-command"]).code, 64);
    assert_eq!(boolkit(&["oracle", "--sig", "/nonexistent/sig.json", "--theory", "/nonexistent/t.json"]).code, 64);
    assert_eq!(boolkit(&["faicom", "--n", "0"]).code, 64);
    let dir = TempDir::new().unwrap();
    let sig = write_sig(&dir, &Signature::with_fresh(&[], 2));
    assert_eq!(boolkit(&["parse", "--sig", s(&sig), "--formula", "(Q c0)"]).code, 64);
}

#[test]
fn exhausted_budget_exits_2() {
    let dir = TempDir::new().unwrap();
    let (family, sig) = faicom_family(4);
    let sig_path = write_sig(&dir, &sig);
    let theory: Vec<String> = family.iter().map(|f| f.to_string()).collect();
    let t = write(&dir, "t.json", &serde_json::to_string(&theory).unwrap());
    let r = boolkit(&["oracle", "--sig", s(&sig_path), "--theory", s(&t), "--budget-oracle", "1"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.json()["verdict"], "unknown");
}

#[test]
fn invalid_model_is_reported() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", r#"{"atoms": 1, "domain": ["a", "b"], "eq": [["1", "1"], ["0", "1"]], "relations": {}, "consts": {}}"#);
    let r = boolkit(&["validate-model", "--model", s(&m)]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["result"]["valid"], false);
}

#[test]
fn conservativity_counterexample() {
    let dir = TempDir::new().unwrap();
    let sig = write_sig(&dir, &Signature::with_fresh(&[], 3));
    let base = "(or (= c2 c0) (= c2 c1))";
    let stronger = "(and (or (= c2 c0) (= c2 c1)) (not (= c0 c2)))";
    let r = boolkit(&["conservative", "--sig", s(&sig), "--formula", stronger, "--base", base]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["result"]["verdict"], "not-conservative");
    let r = boolkit(&["conservative", "--sig", s(&sig), "--formula", base, "--base", base]);
    assert_eq!(r.code, 0);
}

#[test]
fn forcing_chain() {
    let dir = TempDir::new().unwrap();
    let sig = write_sig(&dir, &Signature::with_fresh(&[], 3));
    let poset = dir.path().join("poset.json");
    let r = boolkit(&["forcing", "build", "--sig", s(&sig), "--formula", "(or (= c2 c0) (= c2 c1))", "--out", s(&poset)]);
    assert_eq!(r.code, 0);
    let r = boolkit(&["forcing", "dense", "--sig", s(&sig), "--poset", s(&poset)]);
    assert_eq!(r.code, 0);
    assert!(!r.json()["result"]["dense_sets"].as_array().unwrap().is_empty());
    let r = boolkit(&["forcing", "generic", "--sig", s(&sig), "--poset", s(&poset), "--count", "3", "--saturate"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    let r = boolkit(&["forcing", "model", "--sig", s(&sig), "--poset", s(&poset), "--count", "3"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.json()["result"]["agreement"].as_array().unwrap().iter().all(|b| b == true));
    let sets = write(&dir, "sets.json", "[[0]]");
    assert_eq!(boolkit(&["forcing", "dense", "--sig", s(&sig), "--poset", s(&poset), "--sets", s(&sets)]).code, 1);
}
