mod common;

use std::path::Path;
use std::sync::OnceLock;

use common::{burnout, copy_dir, full_pipeline, manifests, ok, read_json, stderr};
use tempfile::TempDir;

/// One fully built workspace shared by the read-only tests.
fn built() -> &'static Path {
    static DIR: OnceLock<TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        full_pipeline(dir.path());
        dir
    })
    .path()
}

fn copy_of_built() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    copy_dir(built(), dir.path());
    dir
}

#[test]
fn combined_without_v2_is_a_dependency_error() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["demo-data"]);
    let out = burnout(dir.path(), &["build-dataset", "combined"]);
    assert!(!out.status.success());
    let err = stderr(&out);
    assert!(err.contains("v2.jsonl") && err.contains("build-dataset v2"), "{err}");
    assert!(!dir.path().join("data/datasets/combined.jsonl").exists());
}

#[test]
fn v1_manifest_has_equal_class_counts() {
    let m = read_json(built().join("data/datasets/v1.manifest.json"));
    assert_eq!(m["burnout"], m["no_burnout"]);
    assert_eq!(m["samples"], 240);
}

#[test]
fn v2_manifest_counts_match_the_output_file() {
    let m = read_json(built().join("data/datasets/v2.manifest.json"));
    let text = std::fs::read_to_string(built().join("data/datasets/v2.jsonl")).unwrap();
    let (mut burnout, mut control) = (0, 0);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        match v["label"].as_u64().unwrap() {
            1 => burnout += 1,
            _ => control += 1,
        }
    }
    assert_eq!(m["burnout"], burnout);
    assert_eq!(m["no_burnout"], control);
    let aug = &m["augmentation"];
    let removed: u64 = aug["removed"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(aug["candidates"].as_u64().unwrap() - removed, burnout + control);
    assert_eq!(aug["generator"], "recorded");
    assert!(burnout >= 400 && control >= 400);
}

#[test]
fn training_writes_artifact_and_echoes_config() {
    for d in ["online", "v1", "v2", "combined"] {
        let dir = built().join("models").join(d);
        for f in ["config.json", "model.safetensors", "timeline.csv", "curves.svg", "vocab.txt", "manifest.json"] {
            assert!(dir.join(f).exists(), "{d}/{f}");
        }
        let timeline = std::fs::read_to_string(dir.join("timeline.csv")).unwrap();
        assert!(timeline.lines().count() > 10, "{d}: header plus at least 10 points");
    }
    let v2 = read_json(built().join("models/v2/config.json"));
    assert_eq!(v2["train_config"]["epochs"], 2);
    assert_eq!(v2["train_config"]["rng_seed"], 1);
    assert_eq!(read_json(built().join("models/v1/config.json"))["train_config"]["epochs"], 3);
    let manifest = read_json(built().join("models/v1/manifest.json"));
    assert!(manifest["added_tokens"].as_u64().unwrap() > 0);
    assert_eq!(manifest["split"]["seed"], 1);
}

#[test]
fn seed_is_mandatory_for_training() {
    let dir = tempfile::tempdir().unwrap();
    let out = burnout(dir.path(), &["train", "v1"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--seed"));
}

#[test]
fn training_on_an_empty_dataset_fails() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["demo-data"]);
    std::fs::write(dir.path().join("empty.jsonl"), "").unwrap();
    std::fs::write(dir.path().join("pipeline.toml"), "[paths]\nonline_corpus = \"empty.jsonl\"\n").unwrap();
    let out = burnout(dir.path(), &["--config", "pipeline.toml", "train", "online", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("empty"), "{}", stderr(&out));
    assert!(!dir.path().join("models/online").exists());
}

#[test]
fn epochs_outside_the_allowed_range_are_rejected() {
    let out = burnout(built(), &["train", "v1", "--seed", "1", "--epochs", "7"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("epochs"));
}

#[test]
fn config_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.toml"), "[train]\nlearning_rat = 0.1\n").unwrap();
    let out = burnout(dir.path(), &["--config", "bad.toml", "demo-data"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("bad.toml"));
}

#[test]
fn evaluate_emits_both_tables_and_is_deterministic() {
    let dir = copy_of_built();
    let out = ok(dir.path(), &["evaluate"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("Cut-Off 1") && stdout.contains("BurnoutExpressions v2"));
    let first = std::fs::read(dir.path().join("data/reports/manifest.json")).unwrap();
    let m = read_json(dir.path().join("data/reports/manifest.json"));
    assert_eq!(m["complete"], true);
    assert_eq!(m["table4"]["rows"].as_array().unwrap().len(), 4);
    for row in m["table4"]["rows"].as_array().unwrap() {
        assert_eq!(row["cells"].as_array().unwrap().len(), 3);
    }
    ok(dir.path(), &["evaluate"]);
    assert_eq!(std::fs::read(dir.path().join("data/reports/manifest.json")).unwrap(), first);
    for f in ["table3.txt", "table3.csv", "table3.html", "table4.txt", "table4.csv", "table4.html"] {
        assert!(dir.path().join("data/reports").join(f).exists(), "{f}");
    }
}

#[test]
fn evaluate_with_a_missing_artifact_is_partial_and_nonzero() {
    let dir = copy_of_built();
    std::fs::remove_dir_all(dir.path().join("models/online")).unwrap();
    let out = burnout(dir.path(), &["evaluate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("online"));
    let m = read_json(dir.path().join("data/reports/manifest.json"));
    assert_eq!(m["complete"], false);
    let rows = m["table4"]["rows"].as_array().unwrap();
    assert!(rows[0]["error"].is_string());
    assert_eq!(rows[1]["cells"].as_array().unwrap().len(), 3);
    let text = std::fs::read_to_string(dir.path().join("data/reports/table4.txt")).unwrap();
    assert!(text.contains('—'));
}

#[test]
fn cutoff_flag_selects_rules() {
    let dir = copy_of_built();
    ok(dir.path(), &["evaluate", "--cutoff", "1", "--cutoff", "2c", "--cutoff", "3"]);
    let m = read_json(dir.path().join("data/reports/manifest.json"));
    assert_eq!(m["table4"]["rules"], serde_json::json!(["cutoff1", "cutoff2_clinical", "cutoff3_total"]));
    assert_eq!(m["distribution"]["rows"][1]["burnout"], 0);
    let out = burnout(dir.path(), &["evaluate", "--cutoff", "9"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn explain_all_writes_one_packet_per_text_with_stable_ids() {
    let dir = copy_of_built();
    ok(dir.path(), &["explain", "--all", "--dataset", "v2"]);
    let m = read_json(dir.path().join("data/packets/manifest.json"));
    let ids = m["packets"].as_array().unwrap().clone();
    assert_eq!(ids.len(), 66);
    let html = std::fs::read_dir(dir.path().join("data/packets/html")).unwrap().count();
    assert_eq!(html, 66);
    ok(dir.path(), &["explain", "--all", "--dataset", "v2"]);
    assert_eq!(read_json(dir.path().join("data/packets/manifest.json"))["packets"].as_array().unwrap(), &ids);

    ok(dir.path(), &["explain", "--sample", "10", "--seed", "4", "--dataset", "v2"]);
    let sample = read_json(dir.path().join("data/packets/manifest.json"));
    let sample = sample["packets"].as_array().unwrap();
    assert_eq!(sample.len(), 10);
    assert!(sample.iter().all(|id| ids.contains(id)));
}

#[test]
fn score_writes_one_row_per_respondent() {
    let dir = copy_of_built();
    ok(dir.path(), &["score"]);
    let csv = std::fs::read_to_string(dir.path().join("data/reports/scores.csv")).unwrap();
    assert_eq!(csv.lines().count(), 18);
}

#[test]
fn serve_with_missing_model_dir_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = burnout(dir.path(), &["--model-dir", "nowhere/models", "serve", "--port", "0"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("nowhere/models"), "{}", stderr(&out));
}

#[test]
fn demo_data_refuses_to_overwrite_other_surveys() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("data")).unwrap();
    std::fs::write(dir.path().join("data/surveys.jsonl"), "{}\n").unwrap();
    let out = burnout(dir.path(), &["demo-data"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("--force"));
    ok(dir.path(), &["demo-data", "--force"]);
    ok(dir.path(), &["demo-data"]);
}

#[test]
fn rerunning_the_pipeline_rewrites_identical_manifests() {
    let dir = tempfile::tempdir().unwrap();
    full_pipeline(dir.path());
    ok(dir.path(), &["evaluate"]);
    ok(dir.path(), &["explain", "--all"]);
    ok(dir.path(), &["train", "v2", "--seed", "5", "--repeats", "2"]);
    let before = manifests(dir.path());
    assert!(before.len() >= 11, "{:?}", before.iter().map(|(p, _)| p).collect::<Vec<_>>());
    full_pipeline(dir.path());
    ok(dir.path(), &["evaluate"]);
    ok(dir.path(), &["explain", "--all"]);
    ok(dir.path(), &["train", "v2", "--seed", "5", "--repeats", "2"]);
    let after = manifests(dir.path());
    assert_eq!(before.len(), after.len());
    for ((p, a), (_, b)) in before.iter().zip(&after) {
        assert!(a == b, "{} changed on re-run", p.display());
    }
}
