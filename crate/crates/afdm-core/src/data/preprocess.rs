use rand::seq::SliceRandom;
use thiserror::Error;

use super::schema::{ClassLabel, LabeledDataset};
use super::transaction::Transaction;
use crate::rng::rng_from_seed;

#[derive(Debug, Error, PartialEq)]
pub enum PreprocessError {
    #[error("dataset has no fraud rows; the balancing ratio is undefined")]
    NoFraudRows,
    #[error("legal-per-fraud ratio must be positive, got {0}")]
    BadRatio(f64),
    #[error("k must be at least 2, got {0}")]
    BadFoldCount(usize),
    #[error("class {class} has {count} rows, fewer than k = {k}")]
    ClassTooSmall {
        class: ClassLabel,
        count: usize,
        k: usize,
    },
}

/// Majority-class undersampling on labels alone. Keeps every fraud index,
/// uniformly subsamples legal indices without replacement to
/// ceil(legal_per_fraud x fraud count) capped at the available legal rows,
/// then returns the combined index list in a seeded shuffle order.
pub fn balance_indices(
    labels: &[ClassLabel],
    legal_per_fraud: f64,
    seed: u64,
) -> Result<Vec<usize>, PreprocessError> {
    if legal_per_fraud <= 0.0 || legal_per_fraud.is_nan() {
        return Err(PreprocessError::BadRatio(legal_per_fraud));
    }
    let fraud: Vec<usize> = indices_of(labels, ClassLabel::Fraud);
    let mut legal: Vec<usize> = indices_of(labels, ClassLabel::Legal);
    if fraud.is_empty() {
        return Err(PreprocessError::NoFraudRows);
    }
    let target = ((legal_per_fraud * fraud.len() as f64).ceil() as usize).min(legal.len());

    let mut rng = rng_from_seed(seed);
    legal.shuffle(&mut rng);
    legal.truncate(target);

    let mut kept = fraud;
    kept.extend(legal);
    kept.shuffle(&mut rng);
    Ok(kept)
}

/// Balance a labeled dataset; fraud rows are invariant under this operation.
pub fn balance_dataset(
    ds: &LabeledDataset,
    legal_per_fraud: f64,
    seed: u64,
) -> Result<LabeledDataset, PreprocessError> {
    let kept = balance_indices(&ds.labels(), legal_per_fraud, seed)?;
    let rows = kept.iter().map(|&i| ds.rows()[i].clone()).collect();
    Ok(LabeledDataset::new(ds.schema().clone(), rows).expect("balanced rows conform"))
}

/// Balance a raw transaction stream with the same index selection, so the
/// `preprocess` command can emit canonical CSV.
pub fn balance_transactions(
    txs: &[Transaction],
    legal_per_fraud: f64,
    seed: u64,
) -> Result<Vec<Transaction>, PreprocessError> {
    let labels: Vec<ClassLabel> = txs.iter().map(|t| t.label()).collect();
    let kept = balance_indices(&labels, legal_per_fraud, seed)?;
    Ok(kept.iter().map(|&i| txs[i].clone()).collect())
}

/// Stratified k-fold split over labels: per-class indices are shuffled with
/// the seed and dealt round-robin, so per-class fold sizes differ by at most
/// one and the folds partition 0..N.
///
/// A class present with fewer than k rows is an error; an absent class is
/// vacuously fine.
pub fn split_stratified_folds(
    labels: &[ClassLabel],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, PreprocessError> {
    if k < 2 {
        return Err(PreprocessError::BadFoldCount(k));
    }
    let mut rng = rng_from_seed(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for class in ClassLabel::ALL {
        let mut idx = indices_of(labels, class);
        if idx.is_empty() {
            continue;
        }
        if idx.len() < k {
            return Err(PreprocessError::ClassTooSmall {
                class,
                count: idx.len(),
                k,
            });
        }
        idx.shuffle(&mut rng);
        for (i, row) in idx.into_iter().enumerate() {
            folds[i % k].push(row);
        }
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

fn indices_of(labels: &[ClassLabel], class: ClassLabel) -> Vec<usize> {
    labels
        .iter()
        .enumerate()
        .filter(|(_, l)| **l == class)
        .map(|(i, _)| i)
        .collect()
}
