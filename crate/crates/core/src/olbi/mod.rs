//! Oldenburg Burnout Inventory: item coding, dimension means, totals and
//! the three published cut-off rules.

mod distribution;
mod inventory;
pub mod rules;
mod score;

pub use distribution::{label_distribution, write_scores_csv, DistributionRow, DistributionTable};
pub use inventory::{
    Dimension, Inventory, InventoryConfig, KeyingConfig, OlbiItem, Polarity, Transform,
    ITEMS_PER_DIMENSION, ITEM_COUNT,
};
pub use rules::{CutoffRule, DimensionCutoff, RuleId, TotalCutoff};
pub use score::{
    code_item, response_from_coded, score_inventory, Gender, OlbiResponse, OlbiScore, LIKERT_MAX,
    LIKERT_MIN,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OlbiError {
    #[error("answer {value} for item {item} is outside the 1..=4 Likert range")]
    OutOfRange { item: u8, value: u8 },
    #[error("incomplete response, missing items: {missing:?}")]
    Incomplete { missing: Vec<u8> },
    #[error("answer given for unknown item {0}")]
    UnknownItem(u8),
    #[error("invalid inventory definition: {0}")]
    InvalidInventory(String),
    #[error("cannot build a label distribution from zero scores")]
    EmptyTable,
}
