//! Full-batch gradient descent on L2-regularized log loss. Features are
//! one-hot categoricals plus (optionally standardized) numerics plus a bias
//! term; weights start at zero, so training is deterministic and the zero-
//! epoch model predicts (0.5, 0.5) everywhere. The bias is not regularized.

use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::data::{AttrKind, DatasetSchema, FeatureValue, FeatureVector, LabeledDataset};
use crate::data::ClassLabel;
use crate::learner::{check_instance, ClassDistribution, LearnerError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: u32,
    pub standardize: bool,
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams {
            l2: 1e-4,
            learning_rate: 0.1,
            epochs: 200,
            standardize: true,
        }
    }
}

/// Standardization constants for the numeric dimensions: (dimension index,
/// mean, std). One-hot dimensions are left untouched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    numeric_dims: Vec<(usize, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    schema: DatasetSchema,
    params: LogisticParams,
    /// One-hot + numeric dimensions followed by the bias weight.
    weights: Vec<f64>,
    standardizer: Standardizer,
}

/// Dense dimension count for a schema, bias excluded.
fn encoded_width(schema: &DatasetSchema) -> usize {
    schema
        .attributes()
        .iter()
        .map(|a| match &a.kind {
            AttrKind::Categorical { values } => values.len(),
            AttrKind::Numeric => 1,
        })
        .sum()
}

fn encode_raw(schema: &DatasetSchema, x: &FeatureVector, out: &mut Vec<f64>) {
    out.clear();
    for (attr, value) in schema.attributes().iter().zip(&x.values) {
        match (&attr.kind, value) {
            (AttrKind::Categorical { values }, FeatureValue::Cat(v)) => {
                let start = out.len();
                out.resize(start + values.len(), 0.0);
                out[start + v] = 1.0;
            }
            (AttrKind::Numeric, FeatureValue::Num(v)) => out.push(*v),
            _ => unreachable!("conformance checked before encoding"),
        }
    }
    out.push(1.0); // bias
}

/// Encode a dataset into design-matrix rows (bias appended) and 0/1 targets
/// where Fraud maps to 1. Standardization constants come from this dataset.
pub fn encode_dataset(
    ds: &LabeledDataset,
    standardize: bool,
) -> (Vec<Vec<f64>>, Vec<f64>, Standardizer) {
    let schema = ds.schema();
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(ds.len());
    let mut buf = Vec::new();
    for row in ds.rows() {
        encode_raw(schema, row, &mut buf);
        xs.push(buf.clone());
    }
    let ys: Vec<f64> = ds
        .rows()
        .iter()
        .map(|r| if r.label == Some(ClassLabel::Fraud) { 1.0 } else { 0.0 })
        .collect();

    let mut numeric_dims = Vec::new();
    if standardize && !xs.is_empty() {
        let mut dim = 0;
        for attr in schema.attributes() {
            match &attr.kind {
                AttrKind::Categorical { values } => dim += values.len(),
                AttrKind::Numeric => {
                    let n = xs.len() as f64;
                    let mean = xs.iter().map(|r| r[dim]).sum::<f64>() / n;
                    let var = xs.iter().map(|r| (r[dim] - mean).powi(2)).sum::<f64>() / n;
                    let std = if var > 0.0 { var.sqrt() } else { 1.0 };
                    numeric_dims.push((dim, mean, std));
                    dim += 1;
                }
            }
        }
        for row in &mut xs {
            for &(d, mean, std) in &numeric_dims {
                row[d] = (row[d] - mean) / std;
            }
        }
    }
    (xs, ys, Standardizer { numeric_dims })
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean cross-entropy plus (l2/2)|w|^2 over the non-bias weights.
pub fn logistic_loss(weights: &[f64], xs: &[Vec<f64>], ys: &[f64], l2: f64) -> f64 {
    let n = xs.len() as f64;
    let mut loss = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let z: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum();
        // log(1 + exp(-|z|)) form is stable for large |z|
        let log1p_exp = if z >= 0.0 {
            (1.0 + (-z).exp()).ln()
        } else {
            -z + (1.0 + z.exp()).ln()
        };
        loss += (1.0 - y) * z + log1p_exp;
    }
    loss /= n;
    let penalty: f64 = weights[..weights.len() - 1].iter().map(|w| w * w).sum();
    loss + 0.5 * l2 * penalty
}

/// Analytic gradient of [`logistic_loss`].
pub fn logistic_gradient(weights: &[f64], xs: &[Vec<f64>], ys: &[f64], l2: f64) -> Vec<f64> {
    let n = xs.len() as f64;
    let mut grad = vec![0.0; weights.len()];
    for (x, y) in xs.iter().zip(ys) {
        let z: f64 = weights.iter().zip(x).map(|(w, v)| w * v).sum();
        let err = sigmoid(z) - y;
        for (g, v) in grad.iter_mut().zip(x) {
            *g += err * v;
        }
    }
    for g in grad.iter_mut() {
        *g /= n;
    }
    for (g, w) in grad.iter_mut().zip(weights).take(weights.len() - 1) {
        *g += l2 * w;
    }
    grad
}

pub fn logistic_train(ds: &LabeledDataset, params: LogisticParams) -> Result<LogisticModel, TrainError> {
    if ds.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let (xs, ys, standardizer) = encode_dataset(ds, params.standardize);
    let mut weights = vec![0.0; encoded_width(ds.schema()) + 1];
    for _ in 0..params.epochs {
        let grad = logistic_gradient(&weights, &xs, &ys, params.l2);
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= params.learning_rate * g;
        }
    }
    Ok(LogisticModel {
        schema: ds.schema().clone(),
        params,
        weights,
        standardizer,
    })
}

impl LogisticModel {
    pub fn params(&self) -> LogisticParams {
        self.params
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// L2 norm of the non-bias weights.
    pub fn weight_norm(&self) -> f64 {
        self.weights[..self.weights.len() - 1]
            .iter()
            .map(|w| w * w)
            .sum::<f64>()
            .sqrt()
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> Result<ClassDistribution, LearnerError> {
        check_instance(&self.schema, x, false)?;
        let mut encoded = Vec::with_capacity(self.weights.len());
        encode_raw(&self.schema, x, &mut encoded);
        for &(d, mean, std) in &self.standardizer.numeric_dims {
            encoded[d] = (encoded[d] - mean) / std;
        }
        let z: f64 = self.weights.iter().zip(&encoded).map(|(w, v)| w * v).sum();
        let p = sigmoid(z);
        Ok(ClassDistribution::new(p, 1.0 - p))
    }
}
