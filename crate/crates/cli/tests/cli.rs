use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hslab"))
        .args(args)
        .env_remove("HSLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    fs::write(&path, format!("output = {:?}\n{body}", dir.join("out"))).unwrap();
    path
}

#[test]
fn list_claims_covers_the_registry() {
    let o = hslab(&["list-claims"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for id in ["lemma-A1-restpowers", "thm-polarized-bound", "gaussian-hs"] {
        assert!(s.lines().any(|l| l.starts_with(id)), "missing {id}");
    }
    assert!(s.contains(&format!("{} claims", hslab_core::CLAIMS.len())));
}

#[test]
fn scan_prints_monotone_rows() {
    let o = hslab(&["scan-counterexample", "--p", "2.5", "--k", "4,8,16,32"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let ratios: Vec<f64> = s.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(ratios.len(), 4);
    assert!(ratios.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn scan_rejects_p_outside_the_diverging_range() {
    let o = hslab(&["scan-counterexample", "--p", "3.5", "--k", "4"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(hslab(&["run"]).status.code(), Some(64));
    assert_eq!(hslab(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn estimate_constants_reports_bounded_ratio() {
    let o = hslab(&["estimate-constants", "--pair", "F_vs_G", "--p", "3", "--samples", "5000", "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("F_vs_G,3,2,"));
    let bad = hslab(&["estimate-constants", "--pair", "absJ_vs_G", "--p", "2.5", "--samples", "10"]);
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn empty_campaign_list_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "seed = 1\n");
    let o = hslab(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("campaign"));
}

#[test]
fn run_writes_reports_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"seed = 11

[[campaign]]
kind = "counterexample"
p = [2.5]
k = [4, 8, 16, 32]

[[campaign]]
kind = "pointwise"
p = [3.0]
samples = 2000
"#,
    );
    let o = hslab(&["run", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = dir.path().join("out");
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("claim_id,p,alpha,d,lhs,rhs,abs_err,rel_err,tol,pass\n"));
    let csv = fs::read_to_string(out.join("00-counterexample").join("counterexample-p2.5.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    let json = fs::read_to_string(out.join("00-counterexample").join("000-codiv-counterexample.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let body = r#"seed = 5

[[campaign]]
kind = "inequalities"
p = [3.0]
samples = 3000
dims = [2]
"#;
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ca = write_config(a.path(), body);
    let cb = write_config(b.path(), body);
    assert!(hslab(&["--threads", "3", "run", ca.to_str().unwrap()]).status.success());
    assert!(hslab(&["--deterministic", "run", cb.to_str().unwrap()]).status.success());
    let sa = fs::read(a.path().join("out/summary.csv")).unwrap();
    let sb = fs::read(b.path().join("out/summary.csv")).unwrap();
    assert_eq!(sa, sb);
}
