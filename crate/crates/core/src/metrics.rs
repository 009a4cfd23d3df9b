//! Binary classification metrics on the burnout (positive) class.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Label;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("{predictions} predictions but {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("no predictions to score")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn add(&mut self, predicted: Label, actual: Label) {
        match (predicted, actual) {
            (Label::Burnout, Label::Burnout) => self.tp += 1,
            (Label::Burnout, Label::NoBurnout) => self.fp += 1,
            (Label::NoBurnout, Label::Burnout) => self.fn_ += 1,
            (Label::NoBurnout, Label::NoBurnout) => self.tn += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn metrics(self) -> Metrics {
        Metrics::from_confusion(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(flatten)]
    pub confusion: Confusion,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    /// True when there were neither predicted nor actual positives, so F1
    /// was set to 0 by convention.
    pub f1_undefined: bool,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Metrics {
    pub fn from_confusion(c: Confusion) -> Self {
        let precision = ratio(c.tp, c.tp + c.fp);
        let recall = ratio(c.tp, c.tp + c.fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Metrics {
            confusion: c,
            precision,
            recall,
            f1,
            accuracy: ratio(c.tp + c.tn, c.total()),
            f1_undefined: c.tp + c.fp == 0 && c.tp + c.fn_ == 0,
        }
    }
}

pub fn compute_metrics(predictions: &[Label], labels: &[Label]) -> Result<Metrics, MetricsError> {
    if predictions.len() != labels.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: predictions.len(),
            labels: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut c = Confusion::default();
    for (&p, &l) in predictions.iter().zip(labels) {
        c.add(p, l);
    }
    let m = c.metrics();
    if m.f1_undefined {
        log::warn!("no positive predictions or labels among {} samples; F1 reported as 0", c.total());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Burnout as B, NoBurnout as N};

    #[test]
    fn perfect_and_inverted() {
        let labels = [B, N, B, N, N];
        let m = compute_metrics(&labels, &labels).unwrap();
        assert_eq!((m.f1, m.confusion.fp, m.confusion.fn_), (1.0, 0, 0));
        let inv: Vec<_> = labels.iter().map(|l| l.flipped()).collect();
        let m = compute_metrics(&inv, &labels).unwrap();
        assert_eq!(m.f1, 0.0);
        assert!(!m.f1_undefined);
    }

    #[test]
    fn hand_counted_fixture() {
        let m = Metrics::from_confusion(Confusion { tp: 2, fp: 1, fn_: 2, tn: 12 });
        assert!((m.precision - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(m.recall, 0.5);
        assert!((m.f1 - 4.0 / 7.0).abs() < 1e-12);
        assert!((m.accuracy - 14.0 / 17.0).abs() < 1e-12);
    }

    #[test]
    fn undefined_f1_is_zero() {
        let m = compute_metrics(&[N, N], &[N, N]).unwrap();
        assert!(m.f1_undefined);
        assert_eq!(m.f1, 0.0);
        assert_eq!(m.accuracy, 1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(
            compute_metrics(&[B], &[]),
            Err(MetricsError::LengthMismatch { predictions: 1, labels: 0 })
        );
        assert_eq!(compute_metrics(&[], &[]), Err(MetricsError::Empty));
    }

    #[test]
    fn serializes_confusion_flat() {
        let m = Metrics::from_confusion(Confusion { tp: 1, fp: 0, fn_: 0, tn: 1 });
        let v = serde_json::to_value(m).unwrap();
        assert_eq!(v["fn"], 0);
        assert_eq!(v["tp"], 1);
    }
}
