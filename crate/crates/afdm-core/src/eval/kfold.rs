use std::time::Instant;

use rand::seq::SliceRandom;

use super::metrics::{ConfusionMatrix, CostParams, RmseAccumulator};
use super::report::{EvalReport, Protocol};
use super::EvalError;
use crate::data::{split_stratified_folds, FeatureVector, LabeledDataset};
use crate::learner::{ClassDistribution, IncrementalLearner};
use crate::rng::{derive_seed, rng_from_seed};

/// Stratified k-fold with one pooled confusion matrix and pooled RMSE over
/// all N held-out predictions. `train` receives the training partition and
/// the fold index; `predict` must be pure.
pub fn kfold_pooled<M>(
    ds: &LabeledDataset,
    k: usize,
    seed: u64,
    mut train: impl FnMut(&LabeledDataset, usize) -> Result<M, EvalError>,
    mut predict: impl FnMut(&M, &FeatureVector) -> Result<ClassDistribution, EvalError>,
) -> Result<(ConfusionMatrix, f64), EvalError> {
    let folds = split_stratified_folds(&ds.labels(), k, seed)?;
    let mut cm = ConfusionMatrix::default();
    let mut rmse = RmseAccumulator::default();
    for (fold_index, fold) in folds.iter().enumerate() {
        let mut in_fold = vec![false; ds.len()];
        for &i in fold {
            in_fold[i] = true;
        }
        let train_rows: Vec<FeatureVector> = ds
            .rows()
            .iter()
            .enumerate()
            .filter(|(i, _)| !in_fold[*i])
            .map(|(_, r)| r.clone())
            .collect();
        let train_ds = LabeledDataset::new(ds.schema().clone(), train_rows)
            .expect("training partition conforms");
        let model = train(&train_ds, fold_index)?;
        for &i in fold {
            let row = &ds.rows()[i];
            let dist = predict(&model, row)?;
            cm.record(dist.classify(), row.label.unwrap());
            rmse.add(&dist, row.label.unwrap());
        }
    }
    Ok((cm, rmse.value()))
}

/// k-fold evaluation of an incremental learner: the training partition is
/// streamed through `update` in dataset order (or a seeded shuffle when
/// `shuffle_train` is set), then the held-out fold is scored with no further
/// updates.
#[allow(clippy::too_many_arguments)]
pub fn kfold_evaluate_incremental<L: IncrementalLearner>(
    name: &str,
    hyperparameters: serde_json::Value,
    mut factory: impl FnMut(usize) -> L,
    ds: &LabeledDataset,
    k: usize,
    seed: u64,
    weights: CostParams,
    shuffle_train: bool,
) -> Result<EvalReport, EvalError> {
    let started = Instant::now();
    let (cm, rmse) = kfold_pooled(
        ds,
        k,
        seed,
        |train_ds, fold| {
            let mut learner = factory(fold);
            if shuffle_train {
                let mut order: Vec<usize> = (0..train_ds.len()).collect();
                order.shuffle(&mut rng_from_seed(derive_seed(seed, fold as u64)));
                for i in order {
                    learner.update(&train_ds.rows()[i])?;
                }
            } else {
                for row in train_ds.rows() {
                    learner.update(row)?;
                }
            }
            Ok(learner)
        },
        |model, x| Ok(model.predict_proba(x)?),
    )?;
    let wall = started.elapsed().as_secs_f64();
    Ok(EvalReport::from_parts(
        name,
        hyperparameters,
        Protocol::KFold { k, seed },
        weights,
        cm,
        rmse,
        wall,
        cm.total() as f64 / wall.max(1e-9),
    ))
}

/// k-fold evaluation of a batch learner: one training call per fold.
#[allow(clippy::too_many_arguments)]
pub fn kfold_evaluate_batch<M>(
    name: &str,
    hyperparameters: serde_json::Value,
    mut trainer: impl FnMut(&LabeledDataset) -> Result<M, EvalError>,
    mut predict: impl FnMut(&M, &FeatureVector) -> Result<ClassDistribution, EvalError>,
    ds: &LabeledDataset,
    k: usize,
    seed: u64,
    weights: CostParams,
) -> Result<EvalReport, EvalError> {
    let started = Instant::now();
    let (cm, rmse) = kfold_pooled(ds, k, seed, |train_ds, _| trainer(train_ds), &mut predict)?;
    let wall = started.elapsed().as_secs_f64();
    Ok(EvalReport::from_parts(
        name,
        hyperparameters,
        Protocol::KFold { k, seed },
        weights,
        cm,
        rmse,
        wall,
        cm.total() as f64 / wall.max(1e-9),
    ))
}
