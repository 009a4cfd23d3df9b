//! Published cut-off rules turning an [`OlbiScore`] into a binary label.
//!
//! Each rule is a [`CutoffRule`] trait object registered by canonical name
//! (`cutoff1`, `cutoff2_working`, `cutoff2_clinical`, `cutoff3_total`) with
//! the short CLI aliases `1`, `2w`, `2c` and `3`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::score::OlbiScore;
use crate::label::Label;
use crate::registry::{Registry, RegistryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleId {
    Cutoff1,
    Cutoff2Working,
    Cutoff2Clinical,
    Cutoff3Total,
}

impl RuleId {
    pub const ALL: [RuleId; 4] = [
        RuleId::Cutoff1,
        RuleId::Cutoff2Working,
        RuleId::Cutoff2Clinical,
        RuleId::Cutoff3Total,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleId::Cutoff1 => "cutoff1",
            RuleId::Cutoff2Working => "cutoff2_working",
            RuleId::Cutoff2Clinical => "cutoff2_clinical",
            RuleId::Cutoff3Total => "cutoff3_total",
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            RuleId::Cutoff1 => "1",
            RuleId::Cutoff2Working => "2w",
            RuleId::Cutoff2Clinical => "2c",
            RuleId::Cutoff3Total => "3",
        }
    }

    /// Column heading used in the report tables.
    pub fn heading(self) -> &'static str {
        match self {
            RuleId::Cutoff1 => "Cut-Off 1",
            RuleId::Cutoff2Working => "Cut-Off 2 (working)",
            RuleId::Cutoff2Clinical => "Cut-Off 2 (clinical)",
            RuleId::Cutoff3Total => "Cut-Off 3",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleId {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let registry = builtin();
        let rule = registry.get(s)?;
        Ok(rule.id())
    }
}

pub trait CutoffRule: fmt::Debug + Send + Sync {
    fn id(&self) -> RuleId;
    fn classify(&self, score: &OlbiScore) -> Label;
    fn describe(&self) -> String;
}

/// Burnout iff both dimension means reach their thresholds (inclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionCutoff {
    pub id: RuleId,
    pub exhaustion: f64,
    pub disengagement: f64,
}

impl CutoffRule for DimensionCutoff {
    fn id(&self) -> RuleId {
        self.id
    }

    fn classify(&self, score: &OlbiScore) -> Label {
        Label::from_bool(
            score.exhaustion_mean >= self.exhaustion
                && score.disengagement_mean >= self.disengagement,
        )
    }

    fn describe(&self) -> String {
        format!(
            "exhaustion >= {} and disengagement >= {}",
            self.exhaustion, self.disengagement
        )
    }
}

/// Burnout iff the summed coded score reaches the threshold (inclusive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TotalCutoff {
    pub id: RuleId,
    pub total: u32,
}

impl CutoffRule for TotalCutoff {
    fn id(&self) -> RuleId {
        self.id
    }

    fn classify(&self, score: &OlbiScore) -> Label {
        Label::from_bool(score.total >= self.total)
    }

    fn describe(&self) -> String {
        format!("total >= {} (of 64)", self.total)
    }
}

pub const CUTOFF1: DimensionCutoff = DimensionCutoff {
    id: RuleId::Cutoff1,
    exhaustion: 2.25,
    disengagement: 2.1,
};
pub const CUTOFF2_WORKING: DimensionCutoff = DimensionCutoff {
    id: RuleId::Cutoff2Working,
    exhaustion: 2.85,
    disengagement: 2.6,
};
pub const CUTOFF2_CLINICAL: DimensionCutoff = DimensionCutoff {
    id: RuleId::Cutoff2Clinical,
    exhaustion: 3.13,
    disengagement: 2.72,
};
pub const CUTOFF3_TOTAL: TotalCutoff = TotalCutoff {
    id: RuleId::Cutoff3Total,
    total: 35,
};

pub type RuleRegistry = Registry<Arc<dyn CutoffRule>>;

pub fn builtin() -> RuleRegistry {
    let mut reg: RuleRegistry = Registry::new("cut-off rule");
    let rules: [Arc<dyn CutoffRule>; 4] = [
        Arc::new(CUTOFF1),
        Arc::new(CUTOFF2_WORKING),
        Arc::new(CUTOFF2_CLINICAL),
        Arc::new(CUTOFF3_TOTAL),
    ];
    for rule in rules {
        let id = rule.id();
        reg.register(id.name(), rule).expect("unique rule names");
        reg.alias(id.short(), id.name()).expect("unique aliases");
    }
    reg
}

pub fn rule(id: RuleId) -> Arc<dyn CutoffRule> {
    builtin().get(id.name()).expect("all rule ids registered").clone()
}

/// Rules used for the cross-evaluation table: cut-off 1, one variant of
/// cut-off 2, and cut-off 3.
pub fn evaluation_rules(clinical_cutoff2: bool) -> Vec<Arc<dyn CutoffRule>> {
    let second = if clinical_cutoff2 {
        RuleId::Cutoff2Clinical
    } else {
        RuleId::Cutoff2Working
    };
    [RuleId::Cutoff1, second, RuleId::Cutoff3Total]
        .into_iter()
        .map(rule)
        .collect()
}

/// Resolves a list of names or aliases ("1", "2w", "cutoff3_total", ...).
pub fn select(names: &[impl AsRef<str>]) -> Result<Vec<Arc<dyn CutoffRule>>, RegistryError> {
    let reg = builtin();
    names.iter().map(|n| reg.get(n.as_ref()).cloned()).collect()
}
