//! Stream-capable k-nearest-neighbour: a FIFO instance window with voting
//! over a mixed-type distance (range-normalized Euclidean for numerics,
//! 0/1 for categorical mismatches). Search is an exact linear scan; at the
//! default window size that costs microseconds and keeps predictions
//! bit-reproducible. Setting the capacity to at least the dataset size
//! reproduces a full-history lazy learner.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{ClassLabel, DatasetSchema, FeatureValue, FeatureVector};
use crate::learner::{check_instance, ClassDistribution, IncrementalLearner, LearnerError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Uniform,
    InverseDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
    pub window_capacity: usize,
    pub weighting: Weighting,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            k: 1,
            window_capacity: 5000,
            weighting: Weighting::Uniform,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum KnnParamError {
    #[error("k must satisfy 1 <= k <= window_capacity")]
    BadK,
}

impl KnnParams {
    pub fn validate(&self) -> Result<(), KnnParamError> {
        if self.k < 1 || self.k > self.window_capacity {
            return Err(KnnParamError::BadK);
        }
        Ok(())
    }
}

/// Online per-attribute (min, max) used for range normalization; grows with
/// every inserted instance and never shrinks on eviction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowStats {
    ranges: Vec<Option<(f64, f64)>>,
}

impl WindowStats {
    fn new(arity: usize) -> WindowStats {
        WindowStats {
            ranges: vec![None; arity],
        }
    }

    fn observe(&mut self, x: &FeatureVector) {
        for (slot, value) in self.ranges.iter_mut().zip(&x.values) {
            if let FeatureValue::Num(v) = value {
                *slot = Some(match slot {
                    Some((lo, hi)) => (lo.min(*v), hi.max(*v)),
                    None => (*v, *v),
                });
            }
        }
    }

    pub fn range(&self, attr: usize) -> Option<(f64, f64)> {
        self.ranges.get(attr).copied().flatten()
    }
}

/// Mixed-type distance: sqrt of summed squared per-attribute differences,
/// numerics normalized by the observed range (zero contribution when the
/// range is degenerate), categoricals contributing 0 or 1.
pub fn knn_distance(
    a: &FeatureVector,
    b: &FeatureVector,
    stats: &WindowStats,
) -> Result<f64, LearnerError> {
    if a.values.len() != b.values.len() {
        return Err(LearnerError::ArityMismatch {
            expected: a.values.len(),
            got: b.values.len(),
        });
    }
    let mut sum = 0.0;
    for (i, (va, vb)) in a.values.iter().zip(&b.values).enumerate() {
        match (va, vb) {
            (FeatureValue::Cat(x), FeatureValue::Cat(y)) => {
                if x != y {
                    sum += 1.0;
                }
            }
            (FeatureValue::Num(x), FeatureValue::Num(y)) => {
                if let Some((lo, hi)) = stats.range(i) {
                    if hi > lo {
                        let d = (x - y) / (hi - lo);
                        sum += d * d;
                    }
                }
            }
            _ => return Err(LearnerError::SchemaMismatch),
        }
    }
    Ok(sum.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct WindowItem {
    features: FeatureVector,
    seq: u64,
}

/// The windowed lazy learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnWindowLearner {
    schema: DatasetSchema,
    params: KnnParams,
    window: VecDeque<WindowItem>,
    stats: WindowStats,
    inserted: u64,
}

impl KnnWindowLearner {
    pub fn new(schema: DatasetSchema, params: KnnParams) -> KnnWindowLearner {
        params.validate().expect("invalid KNN parameters");
        let stats = WindowStats::new(schema.arity());
        KnnWindowLearner {
            schema,
            params,
            window: VecDeque::new(),
            stats,
            inserted: 0,
        }
    }

    pub fn with_defaults(schema: DatasetSchema) -> KnnWindowLearner {
        KnnWindowLearner::new(schema, KnnParams::default())
    }

    pub fn params(&self) -> KnnParams {
        self.params
    }

    pub fn window_len(&self) -> usize {
        self.window.len()
    }

    pub fn window_stats(&self) -> &WindowStats {
        &self.stats
    }

    /// Window contents oldest-first with insertion sequence numbers; the
    /// brute-force oracle tests re-derive neighbour sets from this.
    pub fn window_rows(&self) -> impl Iterator<Item = (&FeatureVector, u64)> {
        self.window.iter().map(|item| (&item.features, item.seq))
    }

    /// The selected neighbour set for a probe as (distance, sequence id)
    /// pairs in vote order; exposed so oracle tests can assert exact
    /// neighbour-set equality.
    pub fn nearest(&self, x: &FeatureVector) -> Result<Vec<(f64, u64)>, LearnerError> {
        check_instance(&self.schema, x, false)?;
        Ok(self
            .neighbours(x)
            .into_iter()
            .map(|(d, item)| (d, item.seq))
            .collect())
    }

    /// The k nearest window items for a probe: ascending distance, distance
    /// ties broken toward the newer instance.
    fn neighbours(&self, x: &FeatureVector) -> Vec<(f64, &WindowItem)> {
        let mut scored: Vec<(f64, &WindowItem)> = self
            .window
            .iter()
            .map(|item| {
                let d = knn_distance(x, &item.features, &self.stats)
                    .expect("window rows conform to the probe schema");
                (d, item)
            })
            .collect();
        scored.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap()
                .then(b.1.seq.cmp(&a.1.seq))
        });
        scored.truncate(self.params.k);
        scored
    }
}

impl IncrementalLearner for KnnWindowLearner {
    fn schema(&self) -> &DatasetSchema {
        &self.schema
    }

    fn predict_proba(&self, x: &FeatureVector) -> Result<ClassDistribution, LearnerError> {
        check_instance(&self.schema, x, false)?;
        if self.window.is_empty() {
            return Ok(ClassDistribution::uniform());
        }
        let mut fraud_votes = 0.0;
        let mut total_votes = 0.0;
        for (d, item) in self.neighbours(x) {
            let w = match self.params.weighting {
                Weighting::Uniform => 1.0,
                Weighting::InverseDistance => 1.0 / d.max(1e-12),
            };
            total_votes += w;
            if item.features.label == Some(ClassLabel::Fraud) {
                fraud_votes += w;
            }
        }
        // add-one vote smoothing keeps probabilities strictly inside (0, 1)
        Ok(ClassDistribution::new(
            (fraud_votes + 1.0) / (total_votes + 2.0),
            (total_votes - fraud_votes + 1.0) / (total_votes + 2.0),
        ))
    }

    fn update(&mut self, x: &FeatureVector) -> Result<(), LearnerError> {
        check_instance(&self.schema, x, true)?;
        if self.window.len() == self.params.window_capacity {
            self.window.pop_front();
        }
        self.stats.observe(x);
        self.window.push_back(WindowItem {
            features: x.clone(),
            seq: self.inserted,
        });
        self.inserted += 1;
        Ok(())
    }

    fn instances_seen(&self) -> u64 {
        self.inserted
    }

    fn reset(&mut self) {
        self.window.clear();
        self.stats = WindowStats::new(self.schema.arity());
        self.inserted = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Attribute;

    fn schema() -> DatasetSchema {
        DatasetSchema::new(
            vec![
                Attribute::categorical("type", &["A", "B"]),
                Attribute::numeric("amount"),
            ],
            "class",
        )
        .unwrap()
    }

    fn row(cat: usize, num: f64, label: Option<ClassLabel>) -> FeatureVector {
        FeatureVector::new(vec![FeatureValue::Cat(cat), FeatureValue::Num(num)], label)
    }

    #[test]
    fn distance_to_self_is_zero() {
        let stats = WindowStats::new(2);
        let x = row(0, 5.0, None);
        assert_eq!(knn_distance(&x, &x, &stats).unwrap(), 0.0);
    }

    #[test]
    fn single_differing_categorical_gives_unit_distance() {
        let schema = DatasetSchema::new(vec![Attribute::categorical("c", &["A", "B"])], "class")
            .unwrap();
        let _ = schema;
        let stats = WindowStats::new(1);
        let a = FeatureVector::new(vec![FeatureValue::Cat(0)], None);
        let b = FeatureVector::new(vec![FeatureValue::Cat(1)], None);
        assert_eq!(knn_distance(&a, &b, &stats).unwrap(), 1.0);
    }

    #[test]
    fn numeric_distance_normalizes_by_observed_range() {
        let mut stats = WindowStats::new(1);
        stats.observe(&FeatureVector::new(vec![FeatureValue::Num(0.0)], None));
        stats.observe(&FeatureVector::new(vec![FeatureValue::Num(10.0)], None));
        let a = FeatureVector::new(vec![FeatureValue::Num(0.0)], None);
        let b = FeatureVector::new(vec![FeatureValue::Num(10.0)], None);
        assert_eq!(knn_distance(&a, &b, &stats).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_range_contributes_nothing() {
        let mut stats = WindowStats::new(1);
        stats.observe(&FeatureVector::new(vec![FeatureValue::Num(3.0)], None));
        let a = FeatureVector::new(vec![FeatureValue::Num(3.0)], None);
        let b = FeatureVector::new(vec![FeatureValue::Num(8.0)], None);
        assert_eq!(knn_distance(&a, &b, &stats).unwrap(), 0.0);
    }

    #[test]
    fn window_is_strictly_fifo() {
        let params = KnnParams {
            window_capacity: 3,
            ..KnnParams::default()
        };
        let mut knn = KnnWindowLearner::new(schema(), params);
        for i in 0..4 {
            knn.update(&row(0, i as f64, Some(ClassLabel::Legal))).unwrap();
        }
        let kept: Vec<f64> = knn
            .window_rows()
            .map(|(fv, _)| fv.values[1].as_num().unwrap())
            .collect();
        assert_eq!(kept, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn window_size_tracks_updates_until_capacity() {
        let mut knn = KnnWindowLearner::with_defaults(schema());
        for i in 0..7 {
            knn.update(&row(0, i as f64, Some(ClassLabel::Legal))).unwrap();
            assert_eq!(knn.window_len(), i + 1);
        }
    }

    #[test]
    fn min_max_tracks_inserted_amounts() {
        let mut knn = KnnWindowLearner::with_defaults(schema());
        knn.update(&row(0, 5.0, Some(ClassLabel::Legal))).unwrap();
        knn.update(&row(0, 100.0, Some(ClassLabel::Legal))).unwrap();
        assert_eq!(knn.window_stats().range(1), Some((5.0, 100.0)));
    }

    #[test]
    fn single_fraud_neighbour_gives_two_thirds() {
        let mut knn = KnnWindowLearner::with_defaults(schema());
        knn.update(&row(1, 10.0, Some(ClassLabel::Fraud))).unwrap();
        let d = knn.predict_proba(&row(1, 10.0, None)).unwrap();
        assert!((d.p_fraud - 2.0 / 3.0).abs() < 1e-12);
        assert!((d.p_legal - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_window_is_uniform() {
        let knn = KnnWindowLearner::with_defaults(schema());
        assert_eq!(
            knn.predict_proba(&row(0, 1.0, None)).unwrap(),
            ClassDistribution::uniform()
        );
    }

    #[test]
    fn k_equals_window_size_matches_smoothed_frequencies() {
        let params = KnnParams {
            k: 10,
            window_capacity: 10,
            weighting: Weighting::Uniform,
        };
        let mut knn = KnnWindowLearner::new(schema(), params);
        for i in 0..10 {
            let label = if i < 3 { ClassLabel::Fraud } else { ClassLabel::Legal };
            knn.update(&row(i % 2, i as f64, Some(label))).unwrap();
        }
        let d = knn.predict_proba(&row(0, 4.5, None)).unwrap();
        assert!((d.p_fraud - 4.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn distance_ties_prefer_the_newer_instance() {
        let params = KnnParams {
            k: 1,
            ..KnnParams::default()
        };
        let mut knn = KnnWindowLearner::new(schema(), params);
        // two instances at identical feature positions, different labels
        knn.update(&row(0, 2.0, Some(ClassLabel::Legal))).unwrap();
        knn.update(&row(0, 2.0, Some(ClassLabel::Fraud))).unwrap();
        let d = knn.predict_proba(&row(0, 2.0, None)).unwrap();
        // the newer (fraud) instance wins the tie
        assert!(d.p_fraud > d.p_legal);
    }

    #[test]
    fn inverse_distance_weighting_favours_the_closer_class() {
        let params = KnnParams {
            k: 2,
            window_capacity: 10,
            weighting: Weighting::InverseDistance,
        };
        let mut knn = KnnWindowLearner::new(schema(), params);
        knn.update(&row(0, 0.0, Some(ClassLabel::Fraud))).unwrap();
        knn.update(&row(0, 100.0, Some(ClassLabel::Legal))).unwrap();
        let d = knn.predict_proba(&row(0, 10.0, None)).unwrap();
        assert!(d.p_fraud > d.p_legal);
    }

    #[test]
    fn predictions_match_a_brute_force_scan_oracle() {
        use rand::RngExt;
        let params = KnnParams {
            k: 5,
            window_capacity: 300,
            weighting: Weighting::Uniform,
        };
        let mut knn = KnnWindowLearner::new(schema(), params);
        let mut rng = crate::rng::rng_from_seed(31);
        for _ in 0..600 {
            let label = if rng.random_bool(0.25) { ClassLabel::Fraud } else { ClassLabel::Legal };
            knn.update(&row(rng.random_range(0..2), rng.random::<f64>() * 50.0, Some(label)))
                .unwrap();
        }
        for _ in 0..1000 {
            let probe = row(rng.random_range(0..2), rng.random::<f64>() * 60.0 - 5.0, None);

            // independent re-derivation from the exposed window contents
            let mut scored: Vec<(f64, u64, ClassLabel)> = knn
                .window_rows()
                .map(|(fv, seq)| {
                    (
                        knn_distance(&probe, fv, knn.window_stats()).unwrap(),
                        seq,
                        fv.label.unwrap(),
                    )
                })
                .collect();
            scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(b.1.cmp(&a.1)));
            scored.truncate(params.k);
            let fraud = scored.iter().filter(|(_, _, l)| *l == ClassLabel::Fraud).count() as f64;
            let expected = (fraud + 1.0) / (params.k as f64 + 2.0);

            let got = knn.predict_proba(&probe).unwrap();
            assert_eq!(got.p_fraud, expected, "probe diverged from the scan oracle");
        }
    }

    #[test]
    fn memory_is_bounded_by_capacity() {
        let params = KnnParams {
            window_capacity: 100,
            ..KnnParams::default()
        };
        let mut knn = KnnWindowLearner::new(schema(), params);
        for i in 0..20_000 {
            knn.update(&row(i % 2, (i % 997) as f64, Some(ClassLabel::Legal)))
                .unwrap();
        }
        assert_eq!(knn.window_len(), 100);
        assert_eq!(knn.instances_seen(), 20_000);
    }
}
