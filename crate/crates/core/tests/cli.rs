use std::path::Path;
use std::process::{Command, Output};

fn caialg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_caialg")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn csv_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = caialg(&["verify", "--lemmas", "minimal_idempotents,cai_mutual", "--n-max", "30", "--format", "csv", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "lemma_id,params,measured,bound,margin,pass,status,direction,details,notes");
    assert_eq!(lines.count(), 13);
    assert!(o.stdout.is_empty());
}

#[test]
fn json_to_stdout_records_seed() {
    let o = caialg(&["verify", "--lemmas", "averaging", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["pass"], true);
    assert_eq!(arr[0]["params"]["seed"].as_f64(), Some(42.0));
    assert!(arr[0]["params"].get("trials").is_some());
}

#[test]
fn different_seeds_change_random_reports() {
    let a = caialg(&["verify", "--lemmas", "averaging", "--seed", "1"]).stdout;
    let b = caialg(&["verify", "--lemmas", "averaging", "--seed", "2"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(caialg(&["verify", "--lemmas", "nonexistent"]).status.code(), Some(2));
    assert_eq!(caialg(&["verify", "--bogus-flag"]).status.code(), Some(2));
    assert_eq!(caialg(&[]).status.code(), Some(2));
    assert_eq!(caialg(&["verify", "--n-max", "5", "--c-offset", "0"]).status.code(), Some(2));
    assert_eq!(caialg(&["verify", "--seed", "9007199254740993"]).status.code(), Some(2));
    assert_eq!(caialg(&["verify", "--config", "/nonexistent/config.json"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"n_max": 10, "unknown_field": true}"#).unwrap();
    let o = caialg(&["verify", "--config", p(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown_field"));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"lemmas": ["hbeta"], "hbeta": {"C": 0.5, "N": 128}}"#).unwrap();
    assert_eq!(caialg(&["verify", "--config", p(&cfg)]).status.code(), Some(1));
    assert_eq!(caialg(&["verify", "--config", p(&cfg), "--hbeta-c", "2"]).status.code(), Some(0));
}

#[test]
fn hbeta_subcommand() {
    let o = caialg(&["hbeta", "--hbeta-n", "128"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["lemma_id"].as_str().unwrap().starts_with("hbeta.")));
    let o = caialg(&["hbeta", "--hbeta-n", "128", "--hbeta-c", "0.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL hbeta.algebra_weight"));
}

#[test]
fn spectrum_subcommand_with_element_file() {
    let dir = tempfile::tempdir().unwrap();
    let el = dir.path().join("e.json");
    std::fs::write(
        &el,
        r#"{"type": "sum", "children": [{"type": "fin_supp", "levels": {"2": {"re": [[5, 1], [0, -3]]}}}, {"type": "cai_unit", "k": 3}]}"#,
    )
    .unwrap();
    let o = caialg(&["spectrum", "--n-max", "12", "--element", p(&el), "--delta", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let re: Vec<f64> = v["points"].as_array().unwrap().iter().map(|p| p["re"].as_f64().unwrap()).collect();
    // level 1: u = I gives 1; level 2: diag(5,-3) + I gives 6 and -2
    assert_eq!(re[0], 0.0);
    for want in [1.0, 6.0, -2.0] {
        assert!(re.iter().any(|x| (x - want).abs() < 1e-9), "{want} missing from {re:?}");
    }

    std::fs::write(&el, r#"{"type": "fin_supp", "levels": {"2": {"re": [[1]]}}}"#).unwrap();
    assert_eq!(caialg(&["spectrum", "--element", p(&el)]).status.code(), Some(2));
}

#[test]
fn sweep_subcommand() {
    let o = caialg(&["sweep", "--n-max-list", "12,16", "--k-list", "2", "--eps-list", "0.5", "--radii", "1.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
    assert_eq!(caialg(&["sweep", "--radii", "0.5"]).status.code(), Some(2));
}
