#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_burnout");

/// Runs `burnout` inside `root` with `data/` and `models/` beneath it.
pub fn burnout(root: &Path, args: &[&str]) -> Output {
    Command::new(BIN)
        .current_dir(root)
        .env_remove("BURNOUT_DATA_DIR")
        .env_remove("BURNOUT_MODEL_DIR")
        .env_remove("BURNOUT_PORT")
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn ok(root: &Path, args: &[&str]) -> Output {
    let out = burnout(root, args);
    assert!(
        out.status.success(),
        "burnout {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// demo data, all three datasets and one classifier per dataset.
pub fn full_pipeline(root: &Path) {
    ok(root, &["demo-data"]);
    ok(root, &["build-dataset", "v1"]);
    ok(root, &["build-dataset", "v2", "--mock-llm"]);
    ok(root, &["build-dataset", "combined"]);
    for d in ["online", "v1", "v2", "combined"] {
        ok(root, &["train", d, "--seed", "1"]);
    }
}

pub fn read_json(path: impl AsRef<Path>) -> serde_json::Value {
    let path = path.as_ref();
    serde_json::from_str(&std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display())))
        .unwrap()
}

pub fn copy_dir(from: &Path, to: &Path) {
    std::fs::create_dir_all(to).unwrap();
    for entry in std::fs::read_dir(from).unwrap() {
        let entry = entry.unwrap();
        let target: PathBuf = to.join(entry.file_name());
        if entry.file_type().unwrap().is_dir() {
            copy_dir(&entry.path(), &target);
        } else {
            std::fs::copy(entry.path(), target).unwrap();
        }
    }
}

/// Every manifest and packet file under `root`, with its bytes.
pub fn manifests(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let name = p.file_name().unwrap().to_string_lossy();
                if name.ends_with("manifest.json") || name == "packets.jsonl" || name == "repeats.json" {
                    out.push((p.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&p).unwrap()));
                }
            }
        }
    }
    out.sort();
    out
}
