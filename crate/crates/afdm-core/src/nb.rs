//! Incremental Naive Bayes, the AFDM base learner.
//!
//! Sufficient statistics are per-class counts: Laplace-smoothed value counts
//! for categorical attributes and running Welford moments (count, mean, m2)
//! for numeric ones, so the model after n updates is identical (up to float
//! rounding in the moments) to one built from scratch over the same rows.
//!
//! Scoring runs in log space with a log-sum-exp normalization; with seven
//! attributes a plain product underflows 64-bit floats quickly.

use serde::{Deserialize, Serialize};

use crate::data::{AttrKind, ClassLabel, DatasetSchema, FeatureValue, FeatureVector};
use crate::learner::{check_instance, ClassDistribution, IncrementalLearner, LearnerError};

const N_CLASSES: usize = 2;
const LN_2PI: f64 = 1.8378770664093453;

/// Smoothing and numeric-stability knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbParams {
    /// Laplace constant applied to priors and categorical likelihoods.
    pub alpha: f64,
    /// Minimum Gaussian variance; also used whenever a class has fewer than
    /// two observations of an attribute.
    pub var_floor: f64,
}

impl Default for NbParams {
    fn default() -> Self {
        NbParams {
            alpha: 1.0,
            var_floor: 1e-6,
        }
    }
}

/// Welford accumulator for one (class, numeric attribute) pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn add(&mut self, v: f64) {
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
    }

    /// Sample variance, floored; the floor also covers count < 2.
    pub fn variance(&self, floor: f64) -> f64 {
        if self.count < 2 {
            return floor;
        }
        (self.m2 / (self.count - 1) as f64).max(floor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum AttrStats {
    /// value -> per-class counts
    Cat { counts: Vec<[u64; N_CLASSES]> },
    Num { moments: [Welford; N_CLASSES] },
}

/// Naive Bayes Updateable over a fixed schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NbUpdateable {
    schema: DatasetSchema,
    params: NbParams,
    class_counts: [u64; N_CLASSES],
    stats: Vec<AttrStats>,
}

impl NbUpdateable {
    pub fn new(schema: DatasetSchema, params: NbParams) -> NbUpdateable {
        let stats = schema
            .attributes()
            .iter()
            .map(|a| match &a.kind {
                AttrKind::Categorical { values } => AttrStats::Cat {
                    counts: vec![[0; N_CLASSES]; values.len()],
                },
                AttrKind::Numeric => AttrStats::Num {
                    moments: [Welford::default(); N_CLASSES],
                },
            })
            .collect();
        NbUpdateable {
            schema,
            params,
            class_counts: [0; N_CLASSES],
            stats,
        }
    }

    pub fn with_defaults(schema: DatasetSchema) -> NbUpdateable {
        NbUpdateable::new(schema, NbParams::default())
    }

    pub fn params(&self) -> NbParams {
        self.params
    }

    pub fn class_counts(&self) -> [u64; N_CLASSES] {
        self.class_counts
    }

    /// Count table entry for a categorical attribute (tests and invariants).
    pub fn cat_count(&self, attr: usize, value: usize, class: ClassLabel) -> u64 {
        match &self.stats[attr] {
            AttrStats::Cat { counts } => counts[value][class.index()],
            AttrStats::Num { .. } => panic!("attribute {attr} is numeric"),
        }
    }

    /// Moments for a numeric attribute (tests and invariants).
    pub fn moments(&self, attr: usize, class: ClassLabel) -> Welford {
        match &self.stats[attr] {
            AttrStats::Num { moments } => moments[class.index()],
            AttrStats::Cat { .. } => panic!("attribute {attr} is categorical"),
        }
    }

    /// Unnormalized log score of one class for one instance.
    fn log_score(&self, class: usize, x: &FeatureVector) -> f64 {
        let n = (self.class_counts[0] + self.class_counts[1]) as f64;
        let alpha = self.params.alpha;
        let mut score =
            ((self.class_counts[class] as f64 + alpha) / (n + alpha * N_CLASSES as f64)).ln();
        for (stats, value) in self.stats.iter().zip(&x.values) {
            match (stats, value) {
                (AttrStats::Cat { counts }, FeatureValue::Cat(v)) => {
                    let cardinality = counts.len() as f64;
                    let p = (counts[*v][class] as f64 + alpha)
                        / (self.class_counts[class] as f64 + alpha * cardinality);
                    score += p.ln();
                }
                (AttrStats::Num { moments }, FeatureValue::Num(v)) => {
                    // A numeric attribute only contributes once both classes
                    // have observed it; a one-sided floor-variance Gaussian
                    // would otherwise veto every probe for the unseen class.
                    if moments[0].count == 0 || moments[1].count == 0 {
                        continue;
                    }
                    let m = moments[class];
                    let var = m.variance(self.params.var_floor);
                    let diff = v - m.mean;
                    score += -0.5 * (LN_2PI + var.ln() + diff * diff / var);
                }
                _ => unreachable!("conformance checked before scoring"),
            }
        }
        score
    }
}

impl IncrementalLearner for NbUpdateable {
    fn schema(&self) -> &DatasetSchema {
        &self.schema
    }

    fn predict_proba(&self, x: &FeatureVector) -> Result<ClassDistribution, LearnerError> {
        check_instance(&self.schema, x, false)?;
        let log_f = self.log_score(ClassLabel::Fraud.index(), x);
        let log_l = self.log_score(ClassLabel::Legal.index(), x);
        let max = log_f.max(log_l);
        let ef = (log_f - max).exp();
        let el = (log_l - max).exp();
        Ok(ClassDistribution::new(ef / (ef + el), el / (ef + el)))
    }

    fn update(&mut self, x: &FeatureVector) -> Result<(), LearnerError> {
        check_instance(&self.schema, x, true)?;
        let class = x.label.unwrap().index();
        self.class_counts[class] += 1;
        for (stats, value) in self.stats.iter_mut().zip(&x.values) {
            match (stats, value) {
                (AttrStats::Cat { counts }, FeatureValue::Cat(v)) => {
                    counts[*v][class] += 1;
                }
                (AttrStats::Num { moments }, FeatureValue::Num(v)) => {
                    moments[class].add(*v);
                }
                _ => unreachable!("conformance checked before updating"),
            }
        }
        Ok(())
    }

    fn instances_seen(&self) -> u64 {
        self.class_counts[0] + self.class_counts[1]
    }

    fn reset(&mut self) {
        *self = NbUpdateable::new(self.schema.clone(), self.params);
    }
}
