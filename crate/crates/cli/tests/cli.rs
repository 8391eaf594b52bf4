use std::path::Path;
use std::process::{Command, Output};

fn lrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(stdout(out).trim()).expect("stdout is one JSON object")
}

fn construct_to(dir: &Path, n: &str, k: &str, r: &str) -> (Output, String) {
    let path = dir.join(format!("code-{n}-{k}-{r}.json"));
    let path = path.to_str().unwrap().to_string();
    let out = lrc(&[
        "construct",
        "--n",
        n,
        "--k",
        k,
        "--r",
        r,
        "--seed",
        "3",
        "--out",
        &path,
        "--json",
    ]);
    (out, path)
}

#[test]
fn construct_optimal_divisible_code() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = construct_to(dir.path(), "8", "4", "3");
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["q"], 113);
    assert_eq!(v["report"]["d"], 4);
    assert_eq!(v["report"]["verdict"], "optimal");
    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(file["kind"], "linear");
    assert_eq!(file["provenance"]["seed"], 3);
    assert_eq!(file["generator"].as_array().unwrap().len(), 4);
}

#[test]
fn construct_replication_path() {
    let out = lrc(&["construct", "--n", "7", "--k", "4", "--r", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["mode"], "replicate");
    assert_eq!(v["report"]["d"], 2);
    assert_eq!(v["report"]["d_opt"], 3);
    assert_eq!(v["report"]["verdict"], "almost-optimal");
}

#[test]
fn construct_infeasible_exits_4() {
    let out = lrc(&["construct", "--n", "8", "--k", "7", "--r", "3"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("d_opt = 0: no code exists"));

    let out = lrc(&["construct", "--n", "7", "--k", "6", "--r", "3"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("unknown"));
}

#[test]
fn construct_rejects_bad_triples() {
    let out = lrc(&["construct", "--n", "8", "--k", "3", "--r", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lrc(&["construct", "--n", "8", "--k", "4", "--r", "3", "--q", "12"]);
    assert_eq!(out.status.code(), Some(2));
    // GF(2) cannot meet the (8,4,3) conditions; the error names the guaranteed size.
    let out = lrc(&["construct", "--n", "8", "--k", "4", "--r", "3", "--q", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("113"));
}

#[test]
fn analyze_round_trips_and_truncation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (_, path) = construct_to(dir.path(), "8", "4", "3");
    let out = lrc(&["analyze", &path, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["report"]["verdict"], "optimal");
    assert_eq!(v["report"]["cross_checked"], true);

    let text = std::fs::read_to_string(&path).unwrap();
    let cut = dir.path().join("cut.json");
    std::fs::write(&cut, &text[..text.len() / 2]).unwrap();
    let out = lrc(&["analyze", cut.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = lrc(&["analyze", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn f4_family_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f133.json");
    let out = lrc(&[
        "f4",
        "--family",
        "f1-33",
        "--i",
        "1",
        "--out",
        path.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["measured"]["n"], 7);
    assert_eq!(v["measured"]["d"], 3);
    assert_eq!(v["measured"]["r"], 3);
    assert_eq!(v["measured"]["verdict"], "optimal");
    assert_eq!(v["matches_claim"], true);

    let out = lrc(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict = optimal"));

    let out = lrc(&["f4", "--family", "f1-34", "--i", "1"]);
    assert!(stdout(&out).contains("d_opt at claimed r = 5"));
    assert!(stdout(&out).contains("warning"));

    let out = lrc(&["f4", "--family", "f9-99", "--i", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_small_range_is_clean() {
    let out = lrc(&["sweep", "--n-max", "6", "--seed", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), (2..=6).map(|n| n * (n - 1) / 2).sum::<usize>());
    for row in &rows {
        for key in [
            "n",
            "k",
            "r",
            "q",
            "mode",
            "d_opt",
            "pred_lo",
            "pred_hi",
            "rule",
            "d_measured",
            "r_measured",
            "verdict",
            "seed",
        ] {
            assert!(row.get(key).is_some(), "missing {key} in {row}");
        }
    }
    let out = lrc(&["sweep", "--n-max", "11"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (_, path) = construct_to(dir.path(), "8", "4", "3");
    let one = lrc(&[
        "simulate",
        &path,
        "--trials",
        "300",
        "--erasures",
        "1",
        "--seed",
        "5",
    ]);
    assert_eq!(one.status.code(), Some(0));
    let v = json(&one);
    assert_eq!(v["local_rate"], 1.0);
    assert_eq!(v["mean_reads"], 3.0);
    let again = lrc(&[
        "simulate",
        &path,
        "--trials",
        "300",
        "--erasures",
        "1",
        "--seed",
        "5",
    ]);
    assert_eq!(stdout(&one), stdout(&again));

    let three = lrc(&["simulate", &path, "--trials", "300", "--erasures", "3"]);
    assert_eq!(json(&three)["global_rate"], 1.0);

    let all = lrc(&["simulate", &path, "--erasures", "8"]);
    assert_eq!(all.status.code(), Some(2));
}
