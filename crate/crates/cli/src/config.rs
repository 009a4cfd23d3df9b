use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use burnout_core::corpus::generators::GeneratorConfig;
use burnout_core::corpus::DatasetName;
use burnout_core::explainer::{DEFAULT_INTEGRATOR, DEFAULT_STEPS};
use burnout_core::olbi::InventoryConfig;
use serde::{Deserialize, Serialize};

pub const EXPRESSIONS_FILE: &str = "expressions.csv";
pub const ONLINE_FILE: &str = "online.jsonl";
pub const RECORDED_FILE: &str = "recorded_completions.jsonl";
pub const DATASET_DIR: &str = "datasets";
pub const REPORT_DIR: &str = "reports";

/// The `--config` file. Every key is optional; relative paths are
/// resolved against the file's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub train: TrainSection,
    pub generator: GeneratorConfig,
    pub evaluate: EvaluateSection,
    pub explain: ExplainSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub expressions: Option<PathBuf>,
    pub online_corpus: Option<PathBuf>,
    pub recorded_completions: Option<PathBuf>,
    /// Inventory definition; the bundled German one when unset.
    pub olbi: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub split_ratio: f64,
    pub base_model: Option<String>,
    pub learning_rate: Option<f64>,
    pub train_batch_size: Option<usize>,
    /// dataset name -> epochs
    pub epochs: BTreeMap<String, u32>,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            split_ratio: 0.8,
            base_model: None,
            learning_rate: None,
            train_batch_size: None,
            epochs: [("online", 3), ("v1", 3), ("v2", 2), ("combined", 3)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSection {
    pub cutoffs: Vec<String>,
}

impl Default for EvaluateSection {
    fn default() -> Self {
        Self {
            cutoffs: vec!["1".into(), "2w".into(), "3".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExplainSection {
    pub dataset: DatasetName,
    pub steps: usize,
    pub method: String,
}

impl Default for ExplainSection {
    fn default() -> Self {
        Self {
            dataset: DatasetName::Combined,
            steps: DEFAULT_STEPS,
            method: DEFAULT_INTEGRATOR.into(),
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let mut cfg: Self = toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut Option<PathBuf>| {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        };
        resolve(&mut cfg.paths.expressions);
        resolve(&mut cfg.paths.online_corpus);
        resolve(&mut cfg.paths.recorded_completions);
        resolve(&mut cfg.paths.olbi);
        if let Some(p) = &mut cfg.generator.recorded_path {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Where everything lives for one invocation.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: PipelineConfig,
    pub data_dir: PathBuf,
    pub model_dir: PathBuf,
}

impl Context {
    pub fn expressions(&self) -> PathBuf {
        self.config.paths.expressions.clone().unwrap_or_else(|| self.data_dir.join(EXPRESSIONS_FILE))
    }

    pub fn online_corpus(&self) -> PathBuf {
        self.config.paths.online_corpus.clone().unwrap_or_else(|| self.data_dir.join(ONLINE_FILE))
    }

    pub fn recorded(&self) -> PathBuf {
        self.config
            .paths
            .recorded_completions
            .clone()
            .unwrap_or_else(|| self.data_dir.join(RECORDED_FILE))
    }

    pub fn dataset_file(&self, name: DatasetName) -> PathBuf {
        match name {
            DatasetName::Online => self.online_corpus(),
            _ => self.data_dir.join(DATASET_DIR).join(format!("{name}.jsonl")),
        }
    }

    pub fn dataset_manifest(&self, name: DatasetName) -> PathBuf {
        self.data_dir.join(DATASET_DIR).join(format!("{name}.manifest.json"))
    }

    pub fn report_dir(&self) -> PathBuf {
        self.data_dir.join(REPORT_DIR)
    }

    pub fn inventory(&self) -> anyhow::Result<InventoryConfig> {
        match &self.config.paths.olbi {
            Some(p) => Ok(InventoryConfig::load(p)?),
            None => Ok(InventoryConfig::default_german()),
        }
    }

    pub fn epochs(&self, name: DatasetName) -> u32 {
        self.config.train.epochs.get(name.as_str()).copied().unwrap_or(3)
    }
}

/// Fails, naming every missing path and what produces it, before any
/// stage runs.
pub fn require(inputs: &[(&Path, &str)]) -> anyhow::Result<()> {
    let missing: Vec<String> = inputs
        .iter()
        .filter(|(p, _)| !p.exists())
        .map(|(p, hint)| format!("  {} (run `{hint}`)", p.display()))
        .collect();
    if !missing.is_empty() {
        bail!("missing inputs:\n{}", missing.join("\n"));
    }
    Ok(())
}
