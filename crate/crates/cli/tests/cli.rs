use std::process::{Command, Output};

use serde_json::Value;

fn lbharm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lbharm")).args(args).env("RUST_LOG", "off").output().expect("spawn lbharm")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn constants_reports_k_at_alpha_zero() {
    let out = lbharm(&["constants", "--alpha", "0", "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let k = doc["data"]["constants"]["K"]["paper"].as_f64().unwrap();
    assert!((k - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(doc["command"], "constants");
    assert_eq!(doc["passed"], true);
}

#[test]
fn constants_reject_nonpositive_s() {
    let out = lbharm(&["constants", "--s", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_spectral_set_is_a_config_error() {
    let out = lbharm(&["verify", "local-small", "--alpha", "0", "--lambda-lo", "1", "--lambda-hi", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("configuration error"));
}

#[test]
fn s_outside_the_small_range_is_a_config_error() {
    let out = lbharm(&["verify", "local-small", "--alpha", "0", "--s", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3α+2"));
}

#[test]
fn negative_alpha_is_a_config_error() {
    assert_eq!(lbharm(&["constants", "--alpha", "-1"]).status.code(), Some(2));
}

#[test]
fn invalid_thread_count_is_a_config_error() {
    let out =
        Command::new(env!("CARGO_BIN_EXE_lbharm")).args(["constants"]).env("LBHARM_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "alpha = 0\nbogus = 1\n").unwrap();
    let out = lbharm(&["constants", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "alpha = 1.0\n").unwrap();
    let doc = json(&lbharm(&["constants", "--config", path.to_str().unwrap()]));
    assert_eq!(doc["config"]["alpha"], 1.0);
    let doc = json(&lbharm(&["constants", "--config", path.to_str().unwrap(), "--alpha", "0.5"]));
    assert_eq!(doc["config"]["alpha"], 0.5);
}

#[test]
fn output_file_and_csv_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.csv");
    let out = lbharm(&["verify", "ball-moment", "--alpha", "0", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("command,name,value,relation,threshold,pass"));
}

#[test]
fn unwritable_output_exits_with_io_code() {
    let out = lbharm(&["constants", "--output", "/nonexistent-dir/x.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn lemma_extremal_reaches_equality() {
    let out = lbharm(&["verify", "lemma-extremal", "--alpha", "0", "--canonical"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let r = doc["reports"][0]["ratio_oracle"].as_f64().unwrap();
    assert!((r - 1.0).abs() < 1e-4);
    assert!(doc["reports"][0].get("runtime_ms").is_none());
}

#[test]
fn sweep_runs_every_combination() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.toml");
    std::fs::write(
        &path,
        "alpha = 0\ntest_family = [\"gaussian\"]\n[sweep]\ntargets = [\"local-small\", \"profile\"]\ns = [0.5, 1.0]\n",
    )
    .unwrap();
    let out = lbharm(&["sweep", "--config", path.to_str().unwrap(), "--canonical"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["data"]["runs"].as_array().unwrap().len(), 4);
}
