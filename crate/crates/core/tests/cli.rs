use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn capdiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capdiv")).args(args).output().unwrap()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden").join(name)
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

fn synth(dir: &Path, images: usize) -> String {
    let data = dir.join("synth.jsonl");
    let out = capdiv(&["synth", "--out", data.to_str().unwrap(), "--images", &images.to_string(), "--seed", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    data.to_str().unwrap().to_string()
}

#[test]
fn synth_then_run_writes_consistent_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 40);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for (dir, threads) in [(&a, "1"), (&b, "3")] {
        let out = capdiv(&[
            "run", "--dataset", &data, "--scorer", "kn:2", "--scorer", "kn:3", "--out", dir.to_str().unwrap(),
            "--threads", threads,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["lexstats.tsv", "per_model_surprisal.tsv", "variance_test.tsv", "scores_kn2.jsonl", "scores_kn3.jsonl"] {
        assert_eq!(read(&a, name), read(&b, name), "{name}");
    }

    let lex = read(&a, "lexstats.tsv");
    let images: u64 = lex.lines().next().unwrap().split_whitespace().nth(1).unwrap()["images=".len()..].parse().unwrap();
    assert_eq!(images, 40);
    let summary: serde_json::Value = serde_json::from_str(&read(&a, "summary.json")).unwrap();
    for s in summary["scorers"].as_array().unwrap() {
        assert_eq!(s["test"]["n_pairs"].as_u64().unwrap(), s["test"]["df"].as_u64().unwrap() + 1);
        assert_eq!(s["test"]["n_pairs"].as_u64().unwrap(), images);
    }
    let vt = read(&a, "variance_test.tsv");
    assert_eq!(vt.lines().count(), 3);
    assert!(vt.lines().nth(1).unwrap().starts_with("kn2\tdefault\t"));
}

#[test]
fn duplicate_scorer_ids_are_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let data = synth(tmp.path(), 5);
    let out = capdiv(&["run", "--dataset", &data, "--scorer", "kn:2", "--scorer", "kn:2", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_and_data_errors_have_distinct_codes() {
    assert_eq!(capdiv(&["run"]).status.code(), Some(2));
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.jsonl");
    std::fs::write(&bad, "{not json}\n").unwrap();
    let out = capdiv(&["load-check", "--dataset", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let out = capdiv(&["load-check", "--dataset", golden("dataset.jsonl").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn external_scores_reproduce_golden_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = format!("ext:{}:ext", golden("scores_ext.jsonl").display());
    let out = capdiv(&[
        "run", "--dataset", golden("dataset.jsonl").to_str().unwrap(), "--scorer", &spec, "--data-tag", "golden",
        "--out", tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["variance_test.tsv", "lexstats.tsv", "per_model_surprisal.tsv"] {
        assert_eq!(read(tmp.path(), name), std::fs::read_to_string(golden(name)).unwrap(), "{name}");
    }
}
