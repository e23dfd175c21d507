//! The uniform contract every instance-incremental classifier implements.
//! The ensemble and the evaluator program against this trait only.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{ClassLabel, DatasetSchema, FeatureVector};

/// Tolerance under which the two class probabilities count as an exact tie.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum LearnerError {
    #[error("feature vector has arity {got}, schema expects {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("feature vector does not conform to the learner schema")]
    SchemaMismatch,
    #[error("update requires a labeled instance")]
    MissingLabel,
}

/// A normalized distribution over {Fraud, Legal}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub p_fraud: f64,
    pub p_legal: f64,
}

impl ClassDistribution {
    /// Probabilities are floored at the smallest positive float: smoothed
    /// estimates are strictly positive mathematically, and the floor keeps
    /// that true even when the exponent underflows.
    pub fn new(p_fraud: f64, p_legal: f64) -> ClassDistribution {
        debug_assert!(p_fraud >= 0.0 && p_legal >= 0.0);
        debug_assert!((p_fraud + p_legal - 1.0).abs() <= 1e-9);
        ClassDistribution {
            p_fraud: p_fraud.max(f64::MIN_POSITIVE),
            p_legal: p_legal.max(f64::MIN_POSITIVE),
        }
    }

    /// The zero-information distribution.
    pub fn uniform() -> ClassDistribution {
        ClassDistribution {
            p_fraud: 0.5,
            p_legal: 0.5,
        }
    }

    /// Normalize two non-negative scores into a distribution.
    pub fn from_scores(fraud_score: f64, legal_score: f64) -> ClassDistribution {
        let total = fraud_score + legal_score;
        if total <= 0.0 || !total.is_finite() {
            return ClassDistribution::uniform();
        }
        ClassDistribution::new(fraud_score / total, legal_score / total)
    }

    pub fn probability_of(&self, label: ClassLabel) -> f64 {
        match label {
            ClassLabel::Fraud => self.p_fraud,
            ClassLabel::Legal => self.p_legal,
        }
    }

    /// Argmax with exact ties resolving to Fraud: a missed fraud costs more
    /// than a false alarm, so the zero-information call is the expensive class.
    pub fn classify(&self) -> ClassLabel {
        let tied = (self.p_fraud - self.p_legal).abs() <= TIE_EPSILON;
        if tied || self.p_fraud > self.p_legal {
            ClassLabel::Fraud
        } else {
            ClassLabel::Legal
        }
    }
}

/// An instance-incremental classifier: learns from each labeled example as it
/// arrives, in amortized time proportional to model size, never to history.
///
/// Implementations are single-writer: updates must be externally serialized,
/// while read-only predictions against a quiescent learner are safe to share.
pub trait IncrementalLearner {
    fn schema(&self) -> &DatasetSchema;

    /// Pure prediction; must not mutate state.
    fn predict_proba(&self, x: &FeatureVector) -> Result<ClassDistribution, LearnerError>;

    /// Fold one labeled instance into the sufficient statistics.
    fn update(&mut self, x: &FeatureVector) -> Result<(), LearnerError>;

    /// Number of update calls absorbed since construction or the last reset.
    fn instances_seen(&self) -> u64;

    /// Forget everything; equivalent to a freshly constructed model.
    fn reset(&mut self);

    fn classify(&self, x: &FeatureVector) -> Result<ClassLabel, LearnerError> {
        Ok(self.predict_proba(x)?.classify())
    }
}

/// Shared conformance check: arity first (so the error names the sizes), then
/// kind/range agreement, then the label when required.
pub fn check_instance(
    schema: &DatasetSchema,
    x: &FeatureVector,
    need_label: bool,
) -> Result<(), LearnerError> {
    if x.values.len() != schema.arity() {
        return Err(LearnerError::ArityMismatch {
            expected: schema.arity(),
            got: x.values.len(),
        });
    }
    if !x.conforms(schema) {
        return Err(LearnerError::SchemaMismatch);
    }
    if need_label && x.label.is_none() {
        return Err(LearnerError::MissingLabel);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_follows_argmax() {
        assert_eq!(
            ClassDistribution::new(0.7, 0.3).classify(),
            ClassLabel::Fraud
        );
        assert_eq!(
            ClassDistribution::new(0.49, 0.51).classify(),
            ClassLabel::Legal
        );
    }

    #[test]
    fn exact_tie_goes_to_fraud() {
        assert_eq!(
            ClassDistribution::new(0.5, 0.5).classify(),
            ClassLabel::Fraud
        );
        // within the stated tolerance
        assert_eq!(
            ClassDistribution::new(0.5 + 4e-13, 0.5 - 4e-13).classify(),
            ClassLabel::Fraud
        );
    }

    #[test]
    fn classify_is_invariant_under_monotone_score_rescaling() {
        // argmax of normalized scores only depends on the score order
        for (a, b) in [(2.0, 1.0), (0.3, 0.9), (5.0, 5.0)] {
            let base = ClassDistribution::from_scores(a, b).classify();
            for scale in [0.25, 1.0, 7.5] {
                let scaled = ClassDistribution::from_scores(a * scale, b * scale).classify();
                assert_eq!(base, scaled);
            }
        }
    }
}
