use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/fixtures")
}

fn suites() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/suites")
}

fn catfid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catfid"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("CATFID_SEED")
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn eval_exit_codes() {
    let fail = catfid(&["eval", "--original", "low.jsonl", "--generated", "high.jsonl", "--config", "eval.json"]);
    assert_eq!(code(&fail), 1);
    let report = json(&fail);
    assert_eq!(report["delta"]["delta"], 1.0);
    assert_eq!(report["verdict"]["pass"], false);

    let pass = catfid(&["eval", "--original", "low.jsonl", "--generated", "low.jsonl", "--config", "eval.json"]);
    assert_eq!(code(&pass), 0);
    assert_eq!(json(&pass)["delta"]["delta"], 0.0);

    let missing = catfid(&["eval", "--original", "low.jsonl", "--generated", "absent.jsonl", "--config", "eval.json"]);
    assert_eq!(code(&missing), 2);
    assert!(missing.stdout.is_empty());

    let no_flag = catfid(&["eval", "--original", "low.jsonl"]);
    assert_eq!(code(&no_flag), 2);
}

#[test]
fn data_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let dup = dir.path().join("dup.jsonl");
    std::fs::write(
        &dup,
        "{\"id\":\"a\",\"codec\":\"scalar\",\"payload\":1}\n{\"id\":\"a\",\"codec\":\"scalar\",\"payload\":2}\n",
    )
    .unwrap();
    let out = catfid(&["eval", "--original", dup.to_str().unwrap(), "--generated", "low.jsonl", "--config", "eval.json"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"family":{"kind":"compression"},"epsilon":0.1,"surprise":true}"#).unwrap();
    let out = catfid(&["eval", "--original", "low.jsonl", "--generated", "high.jsonl", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

fn without_timestamp(out: &Output) -> Value {
    let mut v = json(out);
    v["manifest"].as_object_mut().unwrap().remove("timestamp").unwrap();
    v
}

#[test]
fn runs_are_reproducible() {
    let args = ["eval", "--original", "low.jsonl", "--generated", "mixed.jsonl", "--config", "eval.json"];
    let (a, b) = (catfid(&args), catfid(&args));
    assert_eq!(without_timestamp(&a), without_timestamp(&b));
    // byte-identical apart from the timestamp line
    let strip = |o: &Output| {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .filter(|l| !l.contains("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&a), strip(&b));

    let suite = suites().join("numeric.json");
    let args = ["suite", "eval", "--suite", suite.to_str().unwrap(), "--generator", "oracle", "--config", "suite_numeric.json"];
    assert_eq!(without_timestamp(&catfid(&args)), without_timestamp(&catfid(&args)));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    let text = std::fs::read_to_string(fixtures().join("eval.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().remove("seed");
    std::fs::write(&config, v.to_string()).unwrap();
    let run = |seed: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_catfid"))
            .args(["eval", "--original", "low.jsonl", "--generated", "mixed.jsonl", "--config"])
            .arg(&config)
            .current_dir(fixtures())
            .env("CATFID_SEED", seed)
            .output()
            .unwrap();
        json(&out)["manifest"]["seeds"]["base"].clone()
    };
    assert_eq!(run("42"), 42);
    assert_eq!(run("43"), 43);
}

#[test]
fn report_render_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = catfid(&["eval", "--original", "low.jsonl", "--generated", "mixed.jsonl", "--config", "eval.json"]);
    let saved = dir.path().join("r.json");
    std::fs::write(&saved, &out.stdout).unwrap();
    let again = catfid(&["report", "render", "--in", saved.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&again), 0);
    assert_eq!(again.stdout, out.stdout);
    let md = catfid(&["report", "render", "--in", saved.to_str().unwrap(), "--format", "md"]);
    let md = String::from_utf8(md.stdout).unwrap();
    assert!(md.contains("resolution floor"));
    assert!(md.contains("argmax distinguisher"));
    let bad = catfid(&["report", "render", "--in", saved.to_str().unwrap(), "--format", "pdf"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn ctest_generate_and_score() {
    let dir = tempfile::tempdir().unwrap();
    let battery = dir.path().join("b.jsonl");
    let out = catfid(&["ctest", "gen", "--h", "5", "--count", "4", "--seed", "3", "--out", battery.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let key = dir.path().join("b.key.jsonl");
    let answers: String = std::fs::read_to_string(&key)
        .unwrap()
        .lines()
        .map(|l| {
            let v: Value = serde_json::from_str(l).unwrap();
            format!("{{\"answer\":{}}}\n", v["continuation"])
        })
        .collect();
    let answer_path = dir.path().join("a.jsonl");
    std::fs::write(&answer_path, answers).unwrap();
    let score = catfid(&[
        "ctest",
        "score",
        "--battery",
        battery.to_str().unwrap(),
        "--answers",
        answer_path.to_str().unwrap(),
        "--key",
        key.to_str().unwrap(),
    ]);
    assert_eq!(code(&score), 0);
    let v = json(&score);
    assert_eq!(v["accuracy"], 1.0);
    assert_eq!(v["total"], 4);
}

#[test]
fn agent_eval_on_bandit() {
    let worst = catfid(&["agent", "eval", "--env", "bandit.env.json", "--policy", "bandit.worst.json", "--episodes", "10", "--seed", "1", "--epsilon", "0.5"]);
    assert_eq!(code(&worst), 1);
    let d = json(&worst)["delta"]["delta"].as_f64().unwrap();
    assert!((d - 0.8).abs() < 1e-12);
    let best = catfid(&["agent", "eval", "--env", "bandit.env.json", "--policy", "bandit.optimal.json", "--episodes", "10", "--seed", "1", "--epsilon", "0.5"]);
    assert_eq!(code(&best), 0);
    assert_eq!(json(&best)["delta"]["delta"], 0.0);
    assert_eq!(json(&best)["optimal_expected_return"], 0.9);
}

#[test]
fn suite_generators() {
    let suite = suites().join("sequences.json");
    let run = |g: &str| catfid(&["suite", "eval", "--suite", suite.to_str().unwrap(), "--generator", g, "--config", "suite_sequences.json"]);
    assert_eq!(code(&run("oracle")), 0);
    assert_eq!(code(&run("constant")), 1);
    assert_eq!(code(&run("nonsense")), 2);
}
