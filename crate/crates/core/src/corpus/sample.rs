use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CorpusError;
use crate::label::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Online,
    Curated,
    Generated,
    Survey,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TextSample {
    pub text: String,
    pub label: Label,
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin_expression: Option<String>,
}

impl TextSample {
    pub fn new(text: impl Into<String>, label: Label, source: Source) -> Self {
        Self {
            text: text.into(),
            label,
            source,
            origin_expression: None,
        }
    }

    pub fn with_origin(mut self, expression: impl Into<String>) -> Self {
        self.origin_expression = Some(expression.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetName {
    Online,
    V1,
    V2,
    Combined,
}

impl DatasetName {
    pub const ALL: [DatasetName; 4] = [
        DatasetName::Online,
        DatasetName::V1,
        DatasetName::V2,
        DatasetName::Combined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetName::Online => "online",
            DatasetName::V1 => "v1",
            DatasetName::V2 => "v2",
            DatasetName::Combined => "combined",
        }
    }

    /// Long description used in the report tables.
    pub fn description(self) -> &'static str {
        match self {
            DatasetName::Online => "Online Data (Baseline)",
            DatasetName::V1 => "BurnoutExpressions v1",
            DatasetName::V2 => "BurnoutExpressions v2",
            DatasetName::Combined => "Combined Dataset: BurnoutExpressions v2 + Online Data",
        }
    }
}

impl fmt::Display for DatasetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DatasetName {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DatasetName::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| CorpusError::UnknownDataset(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub burnout: usize,
    pub control: usize,
}

impl LabelCounts {
    pub fn of(samples: &[TextSample]) -> Self {
        let burnout = samples.iter().filter(|s| s.label == Label::Burnout).count();
        Self {
            burnout,
            control: samples.len() - burnout,
        }
    }

    pub fn total(&self) -> usize {
        self.burnout + self.control
    }
}

/// A named, labeled sample collection. Counts are fixed at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: DatasetName,
    samples: Vec<TextSample>,
    counts: LabelCounts,
}

impl Dataset {
    pub fn new(name: DatasetName, samples: Vec<TextSample>) -> Self {
        let counts = LabelCounts::of(&samples);
        Self {
            name,
            samples,
            counts,
        }
    }

    pub fn samples(&self) -> &[TextSample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<TextSample> {
        self.samples
    }

    pub fn counts(&self) -> LabelCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn source_counts(&self) -> BTreeMap<Source, usize> {
        let mut out = BTreeMap::new();
        for s in &self.samples {
            *out.entry(s.source).or_insert(0) += 1;
        }
        out
    }

    pub fn write_jsonl(&self, path: &Path) -> Result<(), CorpusError> {
        write_samples_jsonl(path, &self.samples)
    }

    pub fn load_jsonl(name: DatasetName, path: &Path) -> Result<Self, CorpusError> {
        Ok(Self::new(name, read_samples_jsonl(path)?))
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CorpusError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CorpusError::csv(path, e))?;
        w.write_record(["text", "label", "source", "origin_expression"])
            .map_err(|e| CorpusError::csv(path, e))?;
        for s in &self.samples {
            w.serialize((
                &s.text,
                s.label as u8,
                s.source,
                s.origin_expression.as_deref().unwrap_or(""),
            ))
            .map_err(|e| CorpusError::csv(path, e))?;
        }
        w.flush().map_err(|e| CorpusError::io(path, e))?;
        Ok(())
    }
}

pub fn write_samples_jsonl(path: &Path, samples: &[TextSample]) -> Result<(), CorpusError> {
    let file = File::create(path).map_err(|e| CorpusError::io(path, e))?;
    let mut w = BufWriter::new(file);
    for s in samples {
        serde_json::to_writer(&mut w, s).map_err(|e| CorpusError::io(path, e.into()))?;
        w.write_all(b"\n").map_err(|e| CorpusError::io(path, e))?;
    }
    w.flush().map_err(|e| CorpusError::io(path, e))
}

pub fn read_samples_jsonl(path: &Path) -> Result<Vec<TextSample>, CorpusError> {
    read_jsonl(path)
}

pub(super) fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let file = File::open(path).map_err(|e| CorpusError::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CorpusError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        out.push(value);
    }
    Ok(out)
}

#[derive(Debug, Deserialize)]
struct OnlineRow {
    text: String,
    label: Label,
}

/// Loads the baseline online corpus. Accepts JSONL or CSV with at least the
/// columns `text` and `label`; every sample is tagged with source `online`.
pub fn load_online_corpus(path: &Path) -> Result<Dataset, CorpusError> {
    let rows: Vec<OnlineRow> = if path.extension().is_some_and(|e| e == "csv") {
        let mut reader = csv::Reader::from_path(path).map_err(|e| CorpusError::csv(path, e))?;
        let mut rows = Vec::new();
        for (idx, row) in reader.deserialize().enumerate() {
            rows.push(row.map_err(|e: csv::Error| CorpusError::Parse {
                path: path.display().to_string(),
                line: e.position().map(|p| p.line() as usize).unwrap_or(idx + 2),
                message: e.to_string(),
            })?);
        }
        rows
    } else {
        read_jsonl(path)?
    };
    let samples = rows
        .into_iter()
        .map(|r| TextSample::new(r.text, r.label, Source::Online))
        .collect();
    Ok(Dataset::new(DatasetName::Online, samples))
}

