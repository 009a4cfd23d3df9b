use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::clean::normalize_whitespace;
use super::sample::{Dataset, DatasetName, Source, TextSample};
use super::CorpusError;
use crate::label::Label;

/// Multi-valued cells in the expression table are separated by this char.
pub const LIST_SEPARATOR: char = '|';

/// A seed symptom expression, its rephrasings and the authored control
/// counterpart(s).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpressionRecord {
    pub seed: String,
    pub variants: Vec<String>,
    /// Control counterpart of the seed, also used for variants that have no
    /// counterpart of their own.
    pub opposite: String,
    /// Either empty or one counterpart per variant, in variant order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variant_opposites: Vec<String>,
}

impl ExpressionRecord {
    pub const LANGUAGE: &'static str = "de";

    pub fn new(seed: impl Into<String>, variants: Vec<String>, opposite: impl Into<String>) -> Self {
        Self {
            seed: seed.into(),
            variants,
            opposite: opposite.into(),
            variant_opposites: Vec::new(),
        }
    }

    /// `(burnout expression, control expression)` pairs, seed first.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        std::iter::once((self.seed.as_str(), self.opposite.as_str())).chain(
            self.variants.iter().enumerate().map(|(i, v)| {
                let opp = self
                    .variant_opposites
                    .get(i)
                    .map(String::as_str)
                    .unwrap_or(self.opposite.as_str());
                (v.as_str(), opp)
            }),
        )
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let invalid = |reason: &str| CorpusError::InvalidRecord {
            seed: self.seed.clone(),
            reason: reason.to_string(),
        };
        if self.seed.trim().is_empty() {
            return Err(invalid("empty seed"));
        }
        if self.opposite.trim().is_empty() {
            return Err(invalid("empty opposite"));
        }
        if self.variants.iter().any(|v| v.trim().is_empty()) {
            return Err(invalid("empty variant"));
        }
        let mut seen = HashSet::new();
        for v in &self.variants {
            if !seen.insert(dedup_key(v)) {
                return Err(invalid(&format!("duplicate variant '{v}'")));
            }
        }
        if !self.variant_opposites.is_empty() && self.variant_opposites.len() != self.variants.len() {
            return Err(invalid(&format!(
                "{} variants but {} variant opposites",
                self.variants.len(),
                self.variant_opposites.len()
            )));
        }
        if self.variant_opposites.iter().any(|o| o.trim().is_empty()) {
            return Err(invalid("empty variant opposite"));
        }
        Ok(())
    }
}

pub(crate) fn dedup_key(text: &str) -> String {
    normalize_whitespace(text).to_lowercase()
}

fn split_list(cell: &str) -> Vec<String> {
    cell.split(LIST_SEPARATOR)
        .map(normalize_whitespace)
        .filter(|s| !s.is_empty())
        .collect()
}

#[derive(Debug, Deserialize)]
struct Row {
    seed: String,
    #[serde(default)]
    variants: String,
    #[serde(default)]
    opposite: String,
}

/// Reads a `seed,variants,opposite` table. `variants` holds `|`-separated
/// rephrasings; `opposite` holds either one counterpart shared by the whole
/// record or one for the seed followed by one per variant.
pub fn load_expression_table(path: &Path) -> Result<Vec<ExpressionRecord>, CorpusError> {
    let reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CorpusError::csv(path, e))?;
    parse_expression_table(reader, &path.display().to_string())
}

pub fn parse_expression_table_str(text: &str) -> Result<Vec<ExpressionRecord>, CorpusError> {
    let reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    parse_expression_table(reader, "<memory>")
}

fn parse_expression_table<R: std::io::Read>(
    mut reader: csv::Reader<R>,
    origin: &str,
) -> Result<Vec<ExpressionRecord>, CorpusError> {
    let mut records: Vec<ExpressionRecord> = Vec::new();
    let mut seeds = HashSet::new();
    for result in reader.deserialize::<Row>() {
        let row = result.map_err(|e| CorpusError::Parse {
            path: origin.to_string(),
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            message: e.to_string(),
        })?;
        let seed = normalize_whitespace(&row.seed);
        let variants = split_list(&row.variants);
        let mut opposites = split_list(&row.opposite);
        let opposite = if opposites.is_empty() {
            String::new()
        } else {
            opposites.remove(0)
        };
        let variant_opposites = match opposites.len() {
            0 => Vec::new(),
            n if n == variants.len() => opposites,
            n => {
                return Err(CorpusError::InvalidRecord {
                    seed,
                    reason: format!(
                        "opposite column lists {} entries; expected 1 or {}",
                        n + 1,
                        variants.len() + 1
                    ),
                })
            }
        };
        let record = ExpressionRecord {
            seed,
            variants,
            opposite,
            variant_opposites,
        };
        record.validate()?;
        if !seeds.insert(dedup_key(&record.seed)) {
            return Err(CorpusError::DuplicateSeed(record.seed));
        }
        records.push(record);
    }
    Ok(records)
}

pub fn write_expression_table(path: &Path, records: &[ExpressionRecord]) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CorpusError::csv(path, e))?;
    w.write_record(["seed", "variants", "opposite"])
        .map_err(|e| CorpusError::csv(path, e))?;
    let sep = LIST_SEPARATOR.to_string();
    for r in records {
        let mut opposite = vec![r.opposite.clone()];
        opposite.extend(r.variant_opposites.iter().cloned());
        w.write_record([r.seed.clone(), r.variants.join(&sep), opposite.join(&sep)])
            .map_err(|e| CorpusError::csv(path, e))?;
    }
    w.flush().map_err(|e| CorpusError::io(path, e))
}

/// Builds the curated expression dataset: one burnout sample per unique
/// expression (case-insensitive, whitespace-normalized) and one control
/// sample carrying that expression's counterpart.
pub fn build_v1(records: &[ExpressionRecord]) -> Result<Dataset, CorpusError> {
    if records.is_empty() {
        return Err(CorpusError::EmptyDataset("v1".into()));
    }
    let mut seen = HashSet::new();
    let mut burnout = Vec::new();
    let mut control = Vec::new();
    for record in records {
        record.validate()?;
        for (expression, opposite) in record.pairs() {
            let expression = normalize_whitespace(expression);
            if !seen.insert(dedup_key(&expression)) {
                continue;
            }
            burnout.push(TextSample::new(expression, Label::Burnout, Source::Curated));
            control.push(TextSample::new(
                normalize_whitespace(opposite),
                Label::NoBurnout,
                Source::Curated,
            ));
        }
    }
    burnout.extend(control);
    Ok(Dataset::new(DatasetName::V1, burnout))
}
