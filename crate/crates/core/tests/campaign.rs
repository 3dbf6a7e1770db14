use std::fs;

use hslab_core::campaign::{run_campaign, RunConfig, RunStatus};
use hslab_core::{LabError, Verdict, CSV_HEADER};

fn config(dir: &std::path::Path, body: &str) -> RunConfig {
    RunConfig::from_toml(&format!("output = {:?}\n{body}", dir.join("out"))).unwrap()
}

#[test]
fn hardy_stein_campaign_passes_at_one_percent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        r#"
[[campaign]]
id = "hs"
kind = "hardy-stein"
p = [2.0]
tol = 0.01
model = { kind = "stable", alpha = 1.0 }
functions = [{ family = "gaussian-bump", center = [0.0], width = 1.0 }]
"#,
    );
    let summary = run_campaign(&cfg).unwrap();
    assert_eq!(summary.status, RunStatus::Pass);
    let hs = summary.records.iter().find(|r| r.claim_id == "hardy-stein").unwrap();
    assert_eq!(hs.verdict, Verdict::Pass);
    assert!(hs.rel_err < 0.01);
    let csv = fs::read_to_string(dir.path().join("out/summary.csv")).unwrap();
    assert!(csv.starts_with(CSV_HEADER));
    assert_eq!(csv.lines().count(), 1 + summary.records.len());
    let json = fs::read_to_string(dir.path().join("out/hs/000-hardy-stein.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["type"], "identity");
    assert!(v["bands"].as_array().unwrap().len() > 3);
}

#[test]
fn unreachable_accuracy_is_inconclusive_not_failed() {
    let dir = tempfile::tempdir().unwrap();
    // the time window stops far too early for the tail budget
    let cfg = config(
        dir.path(),
        r#"
[[campaign]]
kind = "hardy-stein"
p = [2.0]
model = { kind = "stable", alpha = 1.0 }
functions = [{ family = "gaussian-bump", center = [0.0], width = 1.0 }]
quadrature = { t_max = 0.1, t_min = 0.001 }
"#,
    );
    let summary = run_campaign(&cfg).unwrap();
    assert_eq!(summary.status, RunStatus::Inconclusive);
    assert_eq!(summary.status.exit_code(), 2);
    assert!(summary.records.iter().all(|r| r.verdict == Verdict::Inconclusive));
}

#[test]
fn invalid_model_names_the_field() {
    let text = r#"
[[campaign]]
kind = "polarized"
p = [2.0]
model = { kind = "stable", alpha = 2.5 }
functions = [{ family = "gaussian-bump", center = [0.0], width = 1.0 }, { family = "gaussian-bump", center = [1.0], width = 1.0 }]
"#;
    match RunConfig::from_toml(text) {
        Err(LabError::Config { field, .. }) => assert_eq!(field, "campaign[0].model"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let text = "[[campaign]]\nkind = \"pointwise\"\np = [3.0]\nsampels = 10\n";
    assert!(matches!(RunConfig::from_toml(text), Err(LabError::Config { .. })));
}
