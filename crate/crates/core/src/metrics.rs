//! Confusion-matrix counts and the three evaluation ratios.
//!
//! Accuracy, recall (sensitivity) and specificity are the reporting
//! criteria used throughout; a zero denominator is an explicit error
//! rather than a silent 0 or NaN, since silent zeros would corrupt
//! sweep comparisons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary prediction counts. Positive class (1) is malware.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positives: u64,
    pub false_positives: u64,
    pub true_negatives: u64,
    pub false_negatives: u64,
}

impl ConfusionMatrix {
    pub fn new(tp: u64, fp: u64, tn: u64, fn_: u64) -> Self {
        Self {
            true_positives: tp,
            false_positives: fp,
            true_negatives: tn,
            false_negatives: fn_,
        }
    }

    pub fn total(&self) -> u64 {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }

    /// `(TP + TN) / (TP + FP + TN + FN)`
    pub fn accuracy(&self) -> Result<f64> {
        if self.total() == 0 {
            return Err(Error::UndefinedMetric { name: "accuracy" });
        }
        Ok((self.true_positives + self.true_negatives) as f64 / self.total() as f64)
    }

    /// `TP / (TP + FN)`
    pub fn recall(&self) -> Result<f64> {
        let denom = self.true_positives + self.false_negatives;
        if denom == 0 {
            return Err(Error::UndefinedMetric { name: "recall" });
        }
        Ok(self.true_positives as f64 / denom as f64)
    }

    /// `TN / (TN + FP)`
    pub fn specificity(&self) -> Result<f64> {
        let denom = self.true_negatives + self.false_positives;
        if denom == 0 {
            return Err(Error::UndefinedMetric {
                name: "specificity",
            });
        }
        Ok(self.true_negatives as f64 / denom as f64)
    }
}

/// The three ratios in one record; serializes with plain key names.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub recall: f64,
    pub specificity: f64,
}

impl MetricsReport {
    pub fn from_confusion(cm: &ConfusionMatrix) -> Result<Self> {
        Ok(Self {
            accuracy: cm.accuracy()?,
            recall: cm.recall()?,
            specificity: cm.specificity()?,
        })
    }
}

/// Counts prediction outcomes against ground truth.
pub fn confusion(predicted: &[u8], actual: &[u8]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::LengthMismatch {
            left: predicted.len(),
            right: actual.len(),
        });
    }
    if predicted.is_empty() {
        return Err(Error::InvalidDataset("empty prediction vectors".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (i, (&p, &a)) in predicted.iter().zip(actual.iter()).enumerate() {
        if p > 1 {
            return Err(Error::LabelDomain { index: i, value: p });
        }
        if a > 1 {
            return Err(Error::LabelDomain { index: i, value: a });
        }
        match (p, a) {
            (1, 1) => cm.true_positives += 1,
            (1, 0) => cm.false_positives += 1,
            (0, 0) => cm.true_negatives += 1,
            _ => cm.false_negatives += 1,
        }
    }
    Ok(cm)
}
