use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::inventory::{Dimension, Inventory, KeyingConfig, Transform, ITEMS_PER_DIMENSION};
use super::OlbiError;

pub const LIKERT_MIN: u8 = 1;
pub const LIKERT_MAX: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gender {
    Female,
    Male,
    Diverse,
    Unspecified,
}

/// One respondent's raw inventory answers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlbiResponse {
    pub respondent_id: String,
    /// item id -> raw Likert answer (1 = strongly agree .. 4 = strongly disagree)
    pub answers: BTreeMap<u8, u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age: Option<u16>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<Gender>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OlbiScore {
    pub exhaustion_mean: f64,
    pub disengagement_mean: f64,
    pub total: u32,
}

impl OlbiScore {
    pub fn mean(&self, dimension: Dimension) -> f64 {
        match dimension {
            Dimension::Exhaustion => self.exhaustion_mean,
            Dimension::Disengagement => self.disengagement_mean,
        }
    }
}

pub fn code_item(item: u8, raw: u8, transform: Transform) -> Result<u8, OlbiError> {
    if !(LIKERT_MIN..=LIKERT_MAX).contains(&raw) {
        return Err(OlbiError::OutOfRange { item, value: raw });
    }
    Ok(match transform {
        Transform::Identity => raw,
        Transform::Reverse => LIKERT_MIN + LIKERT_MAX - raw,
    })
}

pub fn score_inventory(
    response: &OlbiResponse,
    inventory: &Inventory,
    keying: &KeyingConfig,
) -> Result<OlbiScore, OlbiError> {
    let missing: Vec<u8> = inventory
        .ids()
        .filter(|id| !response.answers.contains_key(id))
        .collect();
    if !missing.is_empty() {
        return Err(OlbiError::Incomplete { missing });
    }
    if let Some(&unknown) = response.answers.keys().find(|id| inventory.item(**id).is_none()) {
        return Err(OlbiError::UnknownItem(unknown));
    }

    let mut exhaustion = 0u32;
    let mut disengagement = 0u32;
    for item in inventory.items() {
        let transform = keying
            .transform(item.id)
            .ok_or_else(|| OlbiError::InvalidInventory(format!("no keying for item {}", item.id)))?;
        let coded = code_item(item.id, response.answers[&item.id], transform)? as u32;
        match item.dimension {
            Dimension::Exhaustion => exhaustion += coded,
            Dimension::Disengagement => disengagement += coded,
        }
    }
    Ok(OlbiScore {
        exhaustion_mean: exhaustion as f64 / ITEMS_PER_DIMENSION as f64,
        disengagement_mean: disengagement as f64 / ITEMS_PER_DIMENSION as f64,
        total: exhaustion + disengagement,
    })
}

/// Builds a response whose *coded* scores equal the given per-dimension
/// values, inverting the keying. Useful for fixtures.
pub fn response_from_coded(
    respondent_id: impl Into<String>,
    exhaustion: &[u8; ITEMS_PER_DIMENSION],
    disengagement: &[u8; ITEMS_PER_DIMENSION],
    inventory: &Inventory,
    keying: &KeyingConfig,
) -> Result<OlbiResponse, OlbiError> {
    let mut exh = exhaustion.iter();
    let mut dis = disengagement.iter();
    let mut answers = BTreeMap::new();
    for item in inventory.items() {
        let coded = match item.dimension {
            Dimension::Exhaustion => *exh.next().expect("8 exhaustion items"),
            Dimension::Disengagement => *dis.next().expect("8 disengagement items"),
        };
        let transform = keying.transform(item.id).unwrap_or(Transform::Identity);
        answers.insert(item.id, code_item(item.id, coded, transform.inverse())?);
    }
    Ok(OlbiResponse {
        respondent_id: respondent_id.into(),
        answers,
        age: None,
        gender: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::olbi::InventoryConfig;

    fn setup() -> InventoryConfig {
        InventoryConfig::default_german()
    }

    #[test]
    fn code_item_examples() {
        assert_eq!(code_item(1, 1, Transform::Identity).unwrap(), 1);
        assert_eq!(code_item(1, 1, Transform::Reverse).unwrap(), 4);
        assert_eq!(code_item(1, 4, Transform::Reverse).unwrap(), 1);
        let err = code_item(7, 5, Transform::Identity).unwrap_err();
        assert_eq!(err, OlbiError::OutOfRange { item: 7, value: 5 });
        assert!(err.to_string().contains("item 7"));
        assert!(code_item(3, 0, Transform::Reverse).is_err());
    }

    #[test]
    fn uniform_answers() {
        let cfg = setup();
        let r = response_from_coded("r", &[2; 8], &[2; 8], &cfg.inventory, &cfg.keying).unwrap();
        let s = score_inventory(&r, &cfg.inventory, &cfg.keying).unwrap();
        assert_eq!((s.exhaustion_mean, s.disengagement_mean, s.total), (2.0, 2.0, 32));
        let r = response_from_coded("r", &[4; 8], &[4; 8], &cfg.inventory, &cfg.keying).unwrap();
        let s = score_inventory(&r, &cfg.inventory, &cfg.keying).unwrap();
        assert_eq!((s.exhaustion_mean, s.disengagement_mean, s.total), (4.0, 4.0, 64));
    }

    #[test]
    fn mixed_fixture_matches_spreadsheet_oracle() {
        // Spreadsheet-style oracle: plain sums over the coded columns.
        let exh = [3u8, 3, 2, 4, 3, 2, 3, 3];
        let dis = [2u8, 2, 3, 2, 3, 2, 2, 2];
        let exh_sum: u32 = exh.iter().map(|&v| v as u32).sum();
        let dis_sum: u32 = dis.iter().map(|&v| v as u32).sum();
        assert_eq!((exh_sum, dis_sum), (23, 18));
        let oracle = (exh_sum as f64 / 8.0, dis_sum as f64 / 8.0, exh_sum + dis_sum);
        assert_eq!(oracle, (2.875, 2.25, 41));

        let cfg = setup();
        let r = response_from_coded("r", &exh, &dis, &cfg.inventory, &cfg.keying).unwrap();
        let s = score_inventory(&r, &cfg.inventory, &cfg.keying).unwrap();
        assert_eq!((s.exhaustion_mean, s.disengagement_mean, s.total), oracle);
    }

    #[test]
    fn missing_items_are_listed() {
        let cfg = setup();
        let mut r = response_from_coded("r", &[2; 8], &[2; 8], &cfg.inventory, &cfg.keying).unwrap();
        r.answers.remove(&7);
        r.answers.remove(&12);
        let err = score_inventory(&r, &cfg.inventory, &cfg.keying).unwrap_err();
        assert_eq!(err, OlbiError::Incomplete { missing: vec![7, 12] });
    }

    #[test]
    fn out_of_range_answer_names_item() {
        let cfg = setup();
        let mut r = response_from_coded("r", &[2; 8], &[2; 8], &cfg.inventory, &cfg.keying).unwrap();
        r.answers.insert(9, 0);
        let err = score_inventory(&r, &cfg.inventory, &cfg.keying).unwrap_err();
        assert_eq!(err, OlbiError::OutOfRange { item: 9, value: 0 });
    }

    #[test]
    fn unknown_item_rejected() {
        let cfg = setup();
        let mut r = response_from_coded("r", &[2; 8], &[2; 8], &cfg.inventory, &cfg.keying).unwrap();
        r.answers.insert(17, 2);
        assert_eq!(
            score_inventory(&r, &cfg.inventory, &cfg.keying).unwrap_err(),
            OlbiError::UnknownItem(17)
        );
    }
}
