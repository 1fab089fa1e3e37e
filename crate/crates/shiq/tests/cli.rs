use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn shiq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiq")).args(args).output().expect("run shiq")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn kbs(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../kbs").join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn sat_exit_codes() {
    assert_eq!(shiq(&["sat", "--kb", &kbs("e1.shiq")]).status.code(), Some(0));
    assert_eq!(shiq(&["sat", "--kb", &kbs("unsat.shiq")]).status.code(), Some(1));
}

#[test]
fn unsatisfiable_kb_entails_vacuously() {
    let o = shiq(&["entail", "--kb", &kbs("unsat.shiq"), "--query", &kbs("unsat.cq")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("unsatisfiable=true"));
}

#[test]
fn not_entailed_prints_witness() {
    let o = shiq(&["entail", "--kb", &kbs("e2.shiq"), "--query", &kbs("e2.cq")]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("witness forest:"));
    assert!(out.contains("countermodel:"));
}

#[test]
fn countermodel_command() {
    let found = shiq(&["countermodel", "--kb", &kbs("e2.shiq"), "--query", &kbs("e2.cq")]);
    assert_eq!(found.status.code(), Some(0));
    let none = shiq(&["countermodel", "--kb", &kbs("e1.shiq"), "--query", &kbs("e1.cq"), "--oracle-domain", "2"]);
    assert_eq!(none.status.code(), Some(1));
    assert!(stdout(&none).contains("countermodel=none max_domain=2"));
}

#[test]
fn validate_reports_located_violations() {
    let o = shiq(&["validate", "--kb", &kbs("nonsimple.shiq")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("nonsimple.shiq:3:1:"));
    assert_eq!(shiq(&["validate", "--kb", &kbs("e1.shiq")]).status.code(), Some(0));
}

#[test]
fn syntax_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let kb = write(&dir, "bad.shiq", "assert A(a)\nassert (frob A)(b).\n");
    let o = shiq(&["sat", "--kb", &kb]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.shiq:2:1"));
    assert_eq!(shiq(&["validate", "--kb", &kb]).status.code(), Some(2));
}

#[test]
fn budget_abort_reports_stats() {
    let dir = TempDir::new().unwrap();
    let kb = write(&dir, "loop.shiq", "axiom A <= (some R A).\nassert A(a).\n");
    let o = shiq(&["sat", "--kb", &kb, "--blocking-depth", "40", "--max-nodes", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("budget_hit=true"));
    let o = shiq(&["sat", "--kb", &kb, "--blocking-depth", "100000", "--timeout-ms", "50", "--max-nodes", "100000000"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("budget_hit=true"));
}

#[test]
fn shallow_depth_warns_and_may_be_inconclusive() {
    let o = shiq(&["entail", "--kb", &kbs("transitive-chain.shiq"), "--query", &kbs("transitive-chain.cq"), "--blocking-depth", "1"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: blocking depth 1"));
    assert!(stdout(&o).contains("complete=false"));
}

#[test]
fn dump_forest_prints_requested_count() {
    let o = shiq(&["dump-forest", "--kb", &kbs("e2.shiq"), "--count", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("forest 0:") && out.contains("forest 1:") && !out.contains("forest 2:"));
}
