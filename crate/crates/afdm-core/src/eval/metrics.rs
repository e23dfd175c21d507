use serde::{Deserialize, Serialize};

use crate::data::ClassLabel;
use crate::learner::ClassDistribution;

/// 2x2 outcome counts with Fraud as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn record(&mut self, predicted: ClassLabel, actual: ClassLabel) {
        match (predicted, actual) {
            (ClassLabel::Fraud, ClassLabel::Fraud) => self.tp += 1,
            (ClassLabel::Fraud, ClassLabel::Legal) => self.fp += 1,
            (ClassLabel::Legal, ClassLabel::Legal) => self.tn += 1,
            (ClassLabel::Legal, ClassLabel::Fraud) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// Recall on the fraud class, tp / (tp + fn).
    pub fn detection_rate(&self) -> f64 {
        let positives = self.tp + self.fn_;
        if positives == 0 {
            return 0.0;
        }
        self.tp as f64 / positives as f64
    }

    pub fn precision(&self) -> f64 {
        let flagged = self.tp + self.fp;
        if flagged == 0 {
            return 0.0;
        }
        self.tp as f64 / flagged as f64
    }

    pub fn f1(&self) -> f64 {
        let p = self.precision();
        let r = self.detection_rate();
        if p + r == 0.0 {
            return 0.0;
        }
        2.0 * p * r / (p + r)
    }
}

/// Asymmetric misclassification weights; a missed fraud outweighs a false
/// alarm by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostParams {
    pub w_fn: f64,
    pub w_fp: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        CostParams {
            w_fn: 10.0,
            w_fp: 1.0,
        }
    }
}

/// Weighted misclassification count: w_fn x fn + w_fp x fp.
pub fn cost(cm: &ConfusionMatrix, w: &CostParams) -> f64 {
    w.w_fn * cm.fn_ as f64 + w.w_fp * cm.fp as f64
}

/// Running root-mean-square error over probabilistic predictions: the
/// squared error of each instance is averaged over both class indicators
/// before averaging over instances.
#[derive(Debug, Clone, Copy, Default)]
pub struct RmseAccumulator {
    sum: f64,
    n: u64,
}

impl RmseAccumulator {
    pub fn add(&mut self, predicted: &ClassDistribution, actual: ClassLabel) {
        let (y_fraud, y_legal) = match actual {
            ClassLabel::Fraud => (1.0, 0.0),
            ClassLabel::Legal => (0.0, 1.0),
        };
        let e_fraud = predicted.p_fraud - y_fraud;
        let e_legal = predicted.p_legal - y_legal;
        self.sum += (e_fraud * e_fraud + e_legal * e_legal) / 2.0;
        self.n += 1;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn value(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.sum / self.n as f64).sqrt()
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricError {
    #[error("rmse of an empty prediction sequence is undefined")]
    EmptyPredictions,
}

/// RMSE over a finished prediction sequence.
pub fn rmse(predictions: &[(ClassDistribution, ClassLabel)]) -> Result<f64, MetricError> {
    if predictions.is_empty() {
        return Err(MetricError::EmptyPredictions);
    }
    let mut acc = RmseAccumulator::default();
    for (d, y) in predictions {
        acc.add(d, *y);
    }
    Ok(acc.value())
}
