use std::path::Path;

use anyhow::Context;
use serde::Serialize;

/// Pretty JSON with a trailing newline. Manifests never carry timestamps
/// or durations, so an unchanged re-run rewrites the same bytes.
pub fn write<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let json = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, json).with_context(|| format!("cannot write {}", path.display()))
}

pub fn file_hash(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(burnout_core::seed::content_hash(&bytes))
}

#[derive(Debug, Serialize)]
pub struct FileRef {
    pub path: String,
    pub sha256: String,
}

impl FileRef {
    /// `path` is recorded relative to `base` when possible, so manifests
    /// do not depend on where the data directory is mounted.
    pub fn of(path: &Path, base: &Path) -> anyhow::Result<Self> {
        Ok(Self {
            path: path.strip_prefix(base).unwrap_or(path).display().to_string(),
            sha256: file_hash(path)?,
        })
    }
}
