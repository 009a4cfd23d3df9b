//! Survey records: four free-text answers plus the inventory, and the
//! append-only store they are kept in.

pub mod demo;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::jsonl::{self, JsonlError};
use crate::olbi::{score_inventory, Gender, Inventory, KeyingConfig, OlbiError, OlbiResponse, OlbiScore};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuestionId {
    Q1,
    Q2,
    Q3,
    Q4,
}

impl QuestionId {
    pub const ALL: [QuestionId; 4] = [QuestionId::Q1, QuestionId::Q2, QuestionId::Q3, QuestionId::Q4];

    pub fn as_str(self) -> &'static str {
        match self {
            QuestionId::Q1 => "q1",
            QuestionId::Q2 => "q2",
            QuestionId::Q3 => "q3",
            QuestionId::Q4 => "q4",
        }
    }
}

impl fmt::Display for QuestionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeTextAnswers {
    #[serde(default)]
    pub q1: String,
    #[serde(default)]
    pub q2: String,
    #[serde(default)]
    pub q3: String,
    #[serde(default)]
    pub q4: String,
}

impl FreeTextAnswers {
    pub fn new(answers: [&str; 4]) -> Self {
        let [q1, q2, q3, q4] = answers.map(str::to_string);
        Self { q1, q2, q3, q4 }
    }

    pub fn get(&self, q: QuestionId) -> &str {
        match q {
            QuestionId::Q1 => &self.q1,
            QuestionId::Q2 => &self.q2,
            QuestionId::Q3 => &self.q3,
            QuestionId::Q4 => &self.q4,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (QuestionId, &str)> {
        QuestionId::ALL.into_iter().map(move |q| (q, self.get(q)))
    }
}

/// One completed survey. Carries no contact or network information.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub respondent_id: String,
    pub free_text: FreeTextAnswers,
    /// item id -> raw Likert answer
    #[serde(deserialize_with = "item_map")]
    pub inventory: BTreeMap<u8, u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age: Option<u16>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<Gender>,
}

// JSON object keys are strings; behind `#[serde(flatten)]` serde no longer
// converts them to integers on its own.
fn item_map<'de, D: serde::Deserializer<'de>>(d: D) -> Result<BTreeMap<u8, u8>, D::Error> {
    use serde::de::Error;
    BTreeMap::<String, u8>::deserialize(d)?
        .into_iter()
        .map(|(k, v)| {
            k.parse()
                .map(|id| (id, v))
                .map_err(|_| D::Error::custom(format!("invalid item id '{k}'")))
        })
        .collect()
}

impl SurveyRecord {
    pub fn olbi_response(&self) -> OlbiResponse {
        OlbiResponse {
            respondent_id: self.respondent_id.clone(),
            answers: self.inventory.clone(),
            age: self.age,
            gender: self.gender,
        }
    }

    pub fn score(&self, inventory: &Inventory, keying: &KeyingConfig) -> Result<OlbiScore, OlbiError> {
        score_inventory(&self.olbi_response(), inventory, keying)
    }
}

/// A record as persisted by the intake service, with its score computed at
/// submission time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredSurvey {
    #[serde(flatten)]
    pub record: SurveyRecord,
    pub score: OlbiScore,
    /// Set when no answer would survive test-set cleaning.
    pub excluded_from_test_set: bool,
}

pub const SURVEY_FILE: &str = "surveys.jsonl";

#[derive(Debug, Clone)]
pub struct SurveyStore {
    path: PathBuf,
}

impl SurveyStore {
    pub fn in_dir(dir: &Path) -> Self {
        Self {
            path: dir.join(SURVEY_FILE),
        }
    }

    pub fn at(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, survey: &StoredSurvey) -> Result<(), JsonlError> {
        jsonl::append(&self.path, survey)
    }

    pub fn load(&self) -> Result<Vec<StoredSurvey>, JsonlError> {
        jsonl::read_all(&self.path)
    }

    pub fn records(&self) -> Result<Vec<SurveyRecord>, JsonlError> {
        Ok(self.load()?.into_iter().map(|s| s.record).collect())
    }
}
