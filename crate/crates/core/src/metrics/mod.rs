//! Confusion-matrix metrics and the cross-validation harness.

mod cv;

pub use cv::{
    cross_validate, CvOptions, EvaluationReport, FoldResult, StageTimings, Summary, TimingSummary,
};

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetError;
use crate::fmdt::FmdtError;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("{predictions} predictions for {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("no examples to evaluate")]
    Empty,
    #[error("class index {index} out of range for {classes} classes")]
    ClassOutOfRange { index: usize, classes: usize },
    #[error("rate undefined: no examples of the {0} class")]
    UndefinedRate(&'static str),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Fmdt(#[from] FmdtError),
}

/// Square matrix of counts indexed `[actual][predicted]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
    positive: usize,
}

/// Binary projection of a confusion matrix around the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryCounts {
    pub tp: u64,
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub tp_rate: f64,
    pub tn_rate: f64,
    pub fp_rate: f64,
    pub fn_rate: f64,
}

impl ConfusionMatrix {
    /// Tallies predictions against labels for `classes` classes.
    pub fn from_predictions(
        predictions: &[usize],
        labels: &[usize],
        classes: usize,
        positive: usize,
    ) -> Result<Self, MetricsError> {
        if predictions.len() != labels.len() {
            return Err(MetricsError::LengthMismatch {
                predictions: predictions.len(),
                labels: labels.len(),
            });
        }
        if labels.is_empty() {
            return Err(MetricsError::Empty);
        }
        let out_of_range = |index| MetricsError::ClassOutOfRange { index, classes };
        if positive >= classes {
            return Err(out_of_range(positive));
        }
        let mut counts = vec![vec![0u64; classes]; classes];
        for (&p, &y) in predictions.iter().zip(labels) {
            if p >= classes {
                return Err(out_of_range(p));
            }
            if y >= classes {
                return Err(out_of_range(y));
            }
            counts[y][p] += 1;
        }
        Ok(Self { counts, positive })
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn positive(&self) -> usize {
        self.positive
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    /// Positive class vs. all other classes.
    pub fn binary(&self) -> BinaryCounts {
        let pos = self.positive;
        let mut b = BinaryCounts::default();
        for (actual, row) in self.counts.iter().enumerate() {
            for (predicted, &c) in row.iter().enumerate() {
                match (actual == pos, predicted == pos) {
                    (true, true) => b.tp += c,
                    (true, false) => b.fn_ += c,
                    (false, true) => b.fp += c,
                    (false, false) => b.tn += c,
                }
            }
        }
        b
    }

    pub fn accuracy(&self) -> Result<f64, MetricsError> {
        let total = self.total();
        if total == 0 {
            return Err(MetricsError::Empty);
        }
        Ok(self.correct() as f64 / total as f64)
    }
}

impl BinaryCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }

    pub fn rates(&self) -> Result<Rates, MetricsError> {
        let positives = self.tp + self.fn_;
        let negatives = self.tn + self.fp;
        if positives == 0 {
            return Err(MetricsError::UndefinedRate("positive"));
        }
        if negatives == 0 {
            return Err(MetricsError::UndefinedRate("negative"));
        }
        let (p, n) = (positives as f64, negatives as f64);
        Ok(Rates {
            tp_rate: self.tp as f64 / p,
            tn_rate: self.tn as f64 / n,
            fp_rate: self.fp as f64 / n,
            fn_rate: self.fn_ as f64 / p,
        })
    }

    /// (TP + TN) / (TP + FN + FP + TN).
    pub fn accuracy(&self) -> Result<f64, MetricsError> {
        let total = self.total();
        if total == 0 {
            return Err(MetricsError::Empty);
        }
        Ok((self.tp + self.tn) as f64 / total as f64)
    }

    pub fn auc(&self) -> Result<f64, MetricsError> {
        Ok(self.rates()?.auc())
    }
}

impl Rates {
    /// Single-operating-point AUC, (1 + TPR - FPR) / 2.
    pub fn auc(&self) -> f64 {
        (1.0 + self.tp_rate - self.fp_rate) / 2.0
    }
}
