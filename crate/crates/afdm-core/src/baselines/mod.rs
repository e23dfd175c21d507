//! Batch learners for the comparison harness: a C4.5-flavoured decision tree
//! (the "J48" stand-in) and L2-regularized logistic regression. Both train
//! offline on a full dataset and are pure at prediction time.

mod logistic;
mod tree;

pub use logistic::{
    encode_dataset, logistic_gradient, logistic_loss, logistic_train, LogisticModel,
    LogisticParams,
};
pub use tree::{tree_train, BatchTreeModel, BatchTreeParams};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::FeatureVector;
use crate::learner::{ClassDistribution, LearnerError};

#[derive(Debug, Error, PartialEq)]
pub enum TrainError {
    #[error("cannot train on an empty dataset")]
    EmptyDataset,
}

/// Either batch model behind one prediction surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnyBatchModel {
    Tree(BatchTreeModel),
    Logistic(LogisticModel),
}

impl AnyBatchModel {
    pub fn predict_proba(&self, x: &FeatureVector) -> Result<ClassDistribution, LearnerError> {
        match self {
            AnyBatchModel::Tree(m) => m.predict_proba(x),
            AnyBatchModel::Logistic(m) => m.predict_proba(x),
        }
    }
}
