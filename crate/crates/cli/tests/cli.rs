use std::path::PathBuf;
use std::process::Command;

use quasikernel_cli::{cmd_check, cmd_elaborate, cmd_eval, cmd_lab, Report};
use quasikernel_core::checks::LabTarget;
use quasikernel_core::{CheckConfig, Status, Suite};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_quasikernel")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn without_time(mut r: Report) -> Report {
    r.elapsed_ms = 0;
    r
}

#[test]
fn eval_on_lists() {
    let r = cmd_eval(&corpus("list.qk"), "sum [1, 2, 3]", &CheckConfig::default()).unwrap();
    assert!(r.success());
    assert_eq!(r.check("eval").unwrap().detail, "6");
    let r = cmd_eval(&corpus("list.qk"), "nosuch", &CheckConfig::default()).unwrap();
    assert!(!r.success());
}

#[test]
fn empty_file_gives_an_empty_successful_report() {
    let r = cmd_elaborate(&corpus("empty.qk"), &CheckConfig::default()).unwrap();
    assert!(r.checks.is_empty());
    assert!(r.success());
    // only the built-in checks remain
    let r = cmd_check(&corpus("empty.qk"), Suite::All, &CheckConfig::default()).unwrap();
    assert!(r.success(), "{r}");
    assert!(r.checks.iter().all(|c| c.name.contains("/builtin/")), "{r}");
}

#[test]
fn elaboration_reports_each_type() {
    let r = cmd_elaborate(&corpus("streams.qk"), &CheckConfig::default()).unwrap();
    assert!(r.success(), "{r}");
    for name in ["elaborate/Stream", "roundtrip/Stream", "elaborate/Proc", "roundtrip/Proc"] {
        assert!(r.check(name).is_some(), "{name} missing from\n{r}");
    }
    let bad = cmd_elaborate(&corpus("illegal_cont.qk"), &CheckConfig::default()).unwrap();
    assert_eq!(bad.count(Status::Fail), 1);
    assert!(bad.check("elaborate").unwrap().detail.contains("negative occurrence"));
}

#[test]
fn reports_are_deterministic() {
    let cfg = CheckConfig::default();
    let a = without_time(cmd_check(&corpus("list.qk"), Suite::All, &cfg).unwrap());
    let b = without_time(cmd_check(&corpus("list.qk"), Suite::All, &cfg).unwrap());
    assert_eq!(a, b);
    assert!(a.success(), "{a}");
    let mut names: Vec<_> = a.checks.iter().map(|c| c.name.clone()).collect();
    let sorted = names.clone();
    names.dedup();
    assert_eq!(names, sorted);
}

#[test]
fn spap_zero_to_one_is_not_regular() {
    let r = cmd_lab(LabTarget::Spap, &CheckConfig::default());
    assert!(r.success(), "{r}");
    let c = r.check("lab/spap/regular-zero-to-one").unwrap();
    assert!(c.detail.contains("regular(0 → 1) = false"), "{}", c.detail);
}

#[test]
fn json_report_shape() {
    let (code, out) = bin(&["--format", "json", "lab", "mtypes"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys.len(), 4);
    for k in ["command", "config", "checks", "elapsed_ms"] {
        assert!(v.get(k).is_some(), "missing {k}");
    }
    assert_eq!(v["config"]["fuel"], 10_000);
    assert_eq!(v["config"]["obs_depth"], 4);
    assert_eq!(v["config"]["chain_bound"], 32);
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["status"], "pass");
    }
}

#[test]
fn exit_codes() {
    let nat = corpus("nat.qk");
    assert_eq!(bin(&["check", nat.to_str().unwrap()]).0, 0);
    assert_eq!(bin(&["elaborate", corpus("illegal_abs.qk").to_str().unwrap()]).0, 1);
    assert_eq!(bin(&["elaborate", corpus("missing.qk").to_str().unwrap()]).0, 2);
    let (code, out) = bin(&["--fuel", "50", "eval", corpus("list.qk").to_str().unwrap(), "-e", "length [1, 2]"]);
    assert_eq!(code, 0);
    assert!(out.contains("fuel 50"));
}
