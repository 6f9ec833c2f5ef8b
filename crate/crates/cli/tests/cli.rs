use std::path::Path;
use std::process::{Command, Output};

fn kglab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kglab")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_kind(o: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&o.stderr).expect("stderr is a JSON error");
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn measure_row_for_the_coprime_hand_case() {
    let o = kglab(&["measure", "--target", "0", "--variant", "coprime"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("d,delta,variant,closed_form,oracle,equal\n"));
    assert!(text.lines().any(|l| l == "12,1/10,coprime,1/15,1/15,true"), "{text}");
    assert!(!text.contains('\r'));
}

#[test]
fn dirichlet_pairs_are_valid() {
    let o = kglab(&["dirichlet-pairs", "--target", "2/7"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("d,a,b,error,valid"));
    assert_eq!(text.lines().count(), 31);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn homogeneous_pairs_collapse() {
    let o = kglab(&["dirichlet-pairs", "--target", "0"]);
    assert!(stdout(&o).lines().skip(1).all(|l| l.split(',').nth(1) == Some("0") && l.split(',').nth(2) == Some("1")));
}

#[test]
fn psi_of_one_half_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(include_str!("../configs/default.json")).unwrap();
    cfg["psi"] = serde_json::json!({ "kind": "power", "c": "1/2", "s": "1" });
    let path = dir.path().join("bad.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    let o = kglab(&["measure", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "config");
    assert!(String::from_utf8_lossy(&o.stderr).contains("1/2"));
}

#[test]
fn bad_flags_give_a_json_error() {
    let o = kglab(&["qia", "--variant", "sideways"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_kind(&o), "config");
    let o = kglab(&["gallagher", "--target", "pair:2/4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn uncapped_psi_is_rejected_for_tilde_qia() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg: serde_json::Value = serde_json::from_str(include_str!("../configs/default.json")).unwrap();
    cfg["psi"] = serde_json::json!({ "kind": "power", "c": "2/5", "s": "1/2" });
    let path = dir.path().join("uncapped.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    let o = kglab(&["qia", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds 1/q"));
}

#[test]
fn qia_hand_value() {
    let o = kglab(&["qia", "--psi", "quarter_inverse", "--target", "0", "--variant", "coprime", "--cutoffs", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("1,4/1,20/1,4/5,0.800000000,0,"), "{row}");
}

#[test]
fn disjointness_flags_warnings_not_failures() {
    let o = kglab(&["disjointness"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.ends_with(",pass")).count(), 4);
    assert_eq!(text.lines().filter(|l| l.ends_with(",warning")).count(), 1);
}

#[test]
fn gallagher_hand_values() {
    let o = kglab(&["gallagher", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v["results"]["rows"].as_array().unwrap();
    assert_eq!(v["results"]["command"], "gallagher");
    assert_eq!(rows[0]["sum"], "1/1");
    assert_eq!(rows[1]["sum"], "4/1");
}

#[test]
fn dichotomy_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let args = ["dichotomy", "--psi", "power_2_2", "--samples", "2000", "--seed", "9", "--schedule", "10:40,40:160"];
        let o = kglab(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next(), Some("Q0,Q1,samples,hits,estimate,stderr,tail_bound,floor,pass"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn json_summary_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("summary.json");
    let o = kglab(&["qia", "--summary", summary.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&summary).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["config"]["variant"], "tilde");
    assert_eq!(v["results"]["rows"].as_array().unwrap().len(), 3);
    let again: serde_json::Value = serde_json::from_str(&stdout(&kglab(&["qia", "--format", "json"]))).unwrap();
    assert_eq!(again["results"], v["results"]);
    assert_eq!(again["config"]["format"], "json");
}

#[test]
fn failing_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let pins = dir.path().join("pins.toml");
    let shipped = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/pins.toml")).unwrap();
    std::fs::write(&pins, shipped.replace("gallagher = \"2048/81\"", "gallagher = \"1/1000\"")).unwrap();
    let o = kglab(&["gallagher", "--pins", pins.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_kind(&o), "check");
    assert!(stdout(&o).contains(",false"));
}

#[test]
fn verify_suite_quick_passes() {
    let o = kglab(&["verify-suite", "--profile", "quick"]);
    let lines = String::from_utf8_lossy(&o.stderr);
    assert!(o.status.success(), "{lines}");
    assert_eq!(lines.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
    assert_eq!(stdout(&o).lines().count(), 11);
}
