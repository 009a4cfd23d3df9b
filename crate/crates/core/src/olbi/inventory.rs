use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::OlbiError;

pub const ITEM_COUNT: usize = 16;
pub const ITEMS_PER_DIMENSION: usize = 8;

const DEFAULT_CONFIG: &str = include_str!("../../config/olbi_default.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Exhaustion,
    Disengagement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    BurnoutWorded,
    PositivelyWorded,
}

/// How a raw Likert answer is mapped onto the burnout-oriented coded scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    Identity,
    Reverse,
}

impl Transform {
    pub fn inverse(self) -> Self {
        // both transforms are involutions
        self
    }

    pub fn then(self, other: Transform) -> Transform {
        if self == other {
            Transform::Identity
        } else {
            Transform::Reverse
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OlbiItem {
    pub id: u8,
    pub dimension: Dimension,
    pub polarity: Polarity,
}

/// The validated 16-item instrument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inventory {
    items: Vec<OlbiItem>,
}

impl Inventory {
    pub fn new(mut items: Vec<OlbiItem>) -> Result<Self, OlbiError> {
        if items.len() != ITEM_COUNT {
            return Err(OlbiError::InvalidInventory(format!(
                "expected {ITEM_COUNT} items, found {}",
                items.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for item in &items {
            if !(1..=ITEM_COUNT as u8).contains(&item.id) {
                return Err(OlbiError::InvalidInventory(format!(
                    "item id {} outside 1..={ITEM_COUNT}",
                    item.id
                )));
            }
            if !seen.insert(item.id) {
                return Err(OlbiError::InvalidInventory(format!(
                    "duplicate item id {}",
                    item.id
                )));
            }
        }
        for dim in [Dimension::Exhaustion, Dimension::Disengagement] {
            let n = items.iter().filter(|i| i.dimension == dim).count();
            if n != ITEMS_PER_DIMENSION {
                return Err(OlbiError::InvalidInventory(format!(
                    "dimension {dim:?} has {n} items, expected {ITEMS_PER_DIMENSION}"
                )));
            }
        }
        items.sort_by_key(|i| i.id);
        Ok(Self { items })
    }

    pub fn items(&self) -> &[OlbiItem] {
        &self.items
    }

    pub fn item(&self, id: u8) -> Option<&OlbiItem> {
        self.items.iter().find(|i| i.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = u8> + '_ {
        self.items.iter().map(|i| i.id)
    }
}

/// Per-item coding transforms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyingConfig {
    transforms: BTreeMap<u8, Transform>,
}

impl KeyingConfig {
    pub fn new(transforms: BTreeMap<u8, Transform>, inventory: &Inventory) -> Result<Self, OlbiError> {
        for id in inventory.ids() {
            if !transforms.contains_key(&id) {
                return Err(OlbiError::InvalidInventory(format!(
                    "no keying transform for item {id}"
                )));
            }
        }
        if let Some(extra) = transforms.keys().find(|id| inventory.item(**id).is_none()) {
            return Err(OlbiError::InvalidInventory(format!(
                "keying transform for unknown item {extra}"
            )));
        }
        Ok(Self { transforms })
    }

    /// Identity coding for every item of the inventory.
    pub fn identity(inventory: &Inventory) -> Self {
        Self {
            transforms: inventory.ids().map(|id| (id, Transform::Identity)).collect(),
        }
    }

    pub fn transform(&self, item: u8) -> Option<Transform> {
        self.transforms.get(&item).copied()
    }

    /// Returns a copy with the transform of `item` flipped.
    pub fn with_toggled(&self, item: u8) -> Self {
        let mut out = self.clone();
        if let Some(t) = out.transforms.get_mut(&item) {
            *t = t.then(Transform::Reverse);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (u8, Transform)> + '_ {
        self.transforms.iter().map(|(k, v)| (*k, *v))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ItemEntry {
    id: u8,
    dimension: Dimension,
    polarity: Polarity,
    transform: Transform,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InventoryFile {
    items: Vec<ItemEntry>,
}

/// Inventory plus keying, as loaded from the editable TOML definition file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InventoryConfig {
    pub inventory: Inventory,
    pub keying: KeyingConfig,
}

impl InventoryConfig {
    /// The shipped default definition (see `config/olbi_default.toml`).
    pub fn default_german() -> Self {
        Self::from_toml_str(DEFAULT_CONFIG).expect("bundled OLBI definition is valid")
    }

    pub fn default_toml() -> &'static str {
        DEFAULT_CONFIG
    }

    pub fn from_toml_str(text: &str) -> Result<Self, OlbiError> {
        let file: InventoryFile =
            toml::from_str(text).map_err(|e| OlbiError::InvalidInventory(e.to_string()))?;
        let inventory = Inventory::new(
            file.items
                .iter()
                .map(|e| OlbiItem {
                    id: e.id,
                    dimension: e.dimension,
                    polarity: e.polarity,
                })
                .collect(),
        )?;
        let keying = KeyingConfig::new(
            file.items.iter().map(|e| (e.id, e.transform)).collect(),
            &inventory,
        )?;
        Ok(Self { inventory, keying })
    }

    pub fn load(path: &Path) -> Result<Self, OlbiError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            OlbiError::InvalidInventory(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        let file = InventoryFile {
            items: self
                .inventory
                .items()
                .iter()
                .map(|i| ItemEntry {
                    id: i.id,
                    dimension: i.dimension,
                    polarity: i.polarity,
                    transform: self.keying.transform(i.id).unwrap_or(Transform::Identity),
                })
                .collect(),
        };
        toml::to_string(&file).expect("inventory serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_definition_is_balanced() {
        let cfg = InventoryConfig::default_german();
        let items = cfg.inventory.items();
        assert_eq!(items.len(), 16);
        for dim in [Dimension::Exhaustion, Dimension::Disengagement] {
            let of_dim: Vec<_> = items.iter().filter(|i| i.dimension == dim).collect();
            assert_eq!(of_dim.len(), 8);
            let positive = of_dim
                .iter()
                .filter(|i| i.polarity == Polarity::PositivelyWorded)
                .count();
            assert_eq!(positive, 4);
        }
        // burnout-worded items are the reversed ones
        for item in items {
            let t = cfg.keying.transform(item.id).unwrap();
            assert_eq!(t == Transform::Reverse, item.polarity == Polarity::BurnoutWorded);
        }
    }

    #[test]
    fn toml_round_trip() {
        let cfg = InventoryConfig::default_german();
        let back = InventoryConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_unbalanced_inventory() {
        let mut items: Vec<OlbiItem> = InventoryConfig::default_german().inventory.items().to_vec();
        items[0].dimension = Dimension::Exhaustion;
        assert!(matches!(Inventory::new(items), Err(OlbiError::InvalidInventory(_))));
    }

    #[test]
    fn rejects_duplicate_ids() {
        let mut items: Vec<OlbiItem> = InventoryConfig::default_german().inventory.items().to_vec();
        items[1].id = 1;
        let err = Inventory::new(items).unwrap_err();
        assert!(err.to_string().contains("duplicate item id 1"));
    }

    #[test]
    fn double_toggle_restores_keying() {
        let cfg = InventoryConfig::default_german();
        for id in 1..=16 {
            assert_eq!(cfg.keying.with_toggled(id).with_toggled(id), cfg.keying);
        }
    }
}
