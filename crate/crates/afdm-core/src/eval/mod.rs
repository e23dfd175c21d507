//! Measurement machinery: confusion matrix, weighted cost, RMSE, stratified
//! k-fold cross-validation, prequential (test-then-train) evaluation, and the
//! multi-classifier comparison that produces the cost-ranked table.

mod kfold;
mod metrics;
mod prequential;
mod report;

pub use kfold::{kfold_evaluate_batch, kfold_evaluate_incremental, kfold_pooled};
pub use metrics::{cost, rmse, ConfusionMatrix, CostParams, MetricError, RmseAccumulator};
pub use prequential::prequential_evaluate;
pub use report::{render_table, EvalReport, Protocol};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bagging::OnlineBaggingEnsemble;
use crate::baselines::{
    logistic_train, tree_train, BatchTreeParams, LogisticParams, TrainError,
};
use crate::data::{LabeledDataset, PreprocessError};
use crate::hoeffding::{HoeffdingTreeLearner, HtParams};
use crate::knn::{KnnParams, KnnWindowLearner};
use crate::learner::LearnerError;
use crate::nb::{NbParams, NbUpdateable};
use crate::rng::derive_seed;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error("empty stream")]
    EmptyStream,
    #[error("stream instance is missing its label")]
    UnlabeledInstance,
}

/// One classifier configuration: algorithm tag plus its full hyperparameters.
/// This is the row identity of the comparison table and the payload stored in
/// every report's `hyperparameters` field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "kebab-case")]
pub enum ClassifierSpec {
    /// The canonical AFDM configuration: online-bagged NB Updateable.
    Afdm { members: usize, nb: NbParams },
    NbUpdateable { params: NbParams },
    HoeffdingTree { params: HtParams },
    KnnWindow { params: KnnParams },
    BatchTree { params: BatchTreeParams },
    Logistic { params: LogisticParams },
}

impl ClassifierSpec {
    pub fn cli_name(&self) -> &'static str {
        match self {
            ClassifierSpec::Afdm { .. } => "afdm",
            ClassifierSpec::NbUpdateable { .. } => "nb",
            ClassifierSpec::HoeffdingTree { .. } => "ht",
            ClassifierSpec::KnnWindow { .. } => "knn",
            ClassifierSpec::BatchTree { .. } => "j48tree",
            ClassifierSpec::Logistic { .. } => "logistic",
        }
    }

    pub fn from_cli_name(name: &str, bag_size: usize) -> Option<ClassifierSpec> {
        Some(match name {
            "afdm" => ClassifierSpec::Afdm {
                members: bag_size,
                nb: NbParams::default(),
            },
            "nb" => ClassifierSpec::NbUpdateable {
                params: NbParams::default(),
            },
            "ht" => ClassifierSpec::HoeffdingTree {
                params: HtParams::default(),
            },
            "knn" => ClassifierSpec::KnnWindow {
                params: KnnParams::default(),
            },
            "j48tree" => ClassifierSpec::BatchTree {
                params: BatchTreeParams::default(),
            },
            "logistic" => ClassifierSpec::Logistic {
                params: LogisticParams::default(),
            },
            _ => return None,
        })
    }

    pub fn is_incremental(&self) -> bool {
        !matches!(
            self,
            ClassifierSpec::BatchTree { .. } | ClassifierSpec::Logistic { .. }
        )
    }

    /// The six configurations of the canonical comparison run.
    pub fn canonical_six(bag_size: usize) -> Vec<ClassifierSpec> {
        ["afdm", "nb", "ht", "knn", "j48tree", "logistic"]
            .iter()
            .map(|n| ClassifierSpec::from_cli_name(n, bag_size).unwrap())
            .collect()
    }
}

/// Evaluate one configuration under stratified k-fold cross-validation.
/// Incremental learners stream the training partition; batch learners train
/// once per fold. Ensemble member seeds derive from (seed, fold), so the
/// whole report is a pure function of its arguments.
pub fn kfold_evaluate(
    spec: &ClassifierSpec,
    ds: &LabeledDataset,
    k: usize,
    seed: u64,
    weights: CostParams,
    shuffle_train: bool,
) -> Result<EvalReport, EvalError> {
    let schema = ds.schema().clone();
    let name = spec.cli_name();
    let hyper = serde_json::to_value(spec).expect("spec serializes");
    match spec {
        ClassifierSpec::Afdm { members, nb } => kfold_evaluate_incremental(
            name,
            hyper,
            |fold| {
                OnlineBaggingEnsemble::new(
                    NbUpdateable::new(schema.clone(), *nb),
                    *members,
                    derive_seed(seed, fold as u64),
                )
            },
            ds,
            k,
            seed,
            weights,
            shuffle_train,
        ),
        ClassifierSpec::NbUpdateable { params } => kfold_evaluate_incremental(
            name,
            hyper,
            |_| NbUpdateable::new(schema.clone(), *params),
            ds,
            k,
            seed,
            weights,
            shuffle_train,
        ),
        ClassifierSpec::HoeffdingTree { params } => kfold_evaluate_incremental(
            name,
            hyper,
            |_| HoeffdingTreeLearner::new(schema.clone(), *params),
            ds,
            k,
            seed,
            weights,
            shuffle_train,
        ),
        ClassifierSpec::KnnWindow { params } => kfold_evaluate_incremental(
            name,
            hyper,
            |_| KnnWindowLearner::new(schema.clone(), *params),
            ds,
            k,
            seed,
            weights,
            shuffle_train,
        ),
        ClassifierSpec::BatchTree { params } => kfold_evaluate_batch(
            name,
            hyper,
            |train| Ok(tree_train(train, *params)?),
            |model, x| Ok(model.predict_proba(x)?),
            ds,
            k,
            seed,
            weights,
        ),
        ClassifierSpec::Logistic { params } => kfold_evaluate_batch(
            name,
            hyper,
            |train| Ok(logistic_train(train, *params)?),
            |model, x| Ok(model.predict_proba(x)?),
            ds,
            k,
            seed,
            weights,
        ),
    }
}

/// Run every configuration under identical folds and weights; rows come back
/// sorted by cost ascending (stable, so ties keep the input order).
pub fn compare(
    specs: &[ClassifierSpec],
    ds: &LabeledDataset,
    k: usize,
    seed: u64,
    weights: CostParams,
    shuffle_train: bool,
) -> Result<Vec<EvalReport>, EvalError> {
    let mut reports = Vec::with_capacity(specs.len());
    for spec in specs {
        reports.push(kfold_evaluate(spec, ds, k, seed, weights, shuffle_train)?);
    }
    reports.sort_by(|a, b| a.cost.partial_cmp(&b.cost).unwrap());
    Ok(reports)
}
