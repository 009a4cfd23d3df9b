use std::fmt;

use serde::{Deserialize, Serialize};

/// Binary burnout indication. Serialized as the integers `0` and `1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Label {
    NoBurnout = 0,
    Burnout = 1,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::NoBurnout, Label::Burnout];

    pub fn from_bool(burnout: bool) -> Self {
        if burnout {
            Label::Burnout
        } else {
            Label::NoBurnout
        }
    }

    pub fn is_burnout(self) -> bool {
        self == Label::Burnout
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn flipped(self) -> Self {
        Label::from_bool(!self.is_burnout())
    }

    /// Human-readable form used in reports ("burnout" / "No burnout").
    pub fn display_name(self) -> &'static str {
        match self {
            Label::Burnout => "burnout",
            Label::NoBurnout => "No burnout",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("label must be 0 or 1, got {0}")]
pub struct InvalidLabel(pub u8);

impl TryFrom<u8> for Label {
    type Error = InvalidLabel;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        match value {
            0 => Ok(Label::NoBurnout),
            1 => Ok(Label::Burnout),
            other => Err(InvalidLabel(other)),
        }
    }
}

impl From<Label> for u8 {
    fn from(label: Label) -> Self {
        label as u8
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u8)
    }
}
