//! Streaming fraud detection for mobile-money transaction logs.
//!
//! The crate wires a synthetic transaction generator, instance-incremental
//! classifiers (Naive Bayes Updateable, Hoeffding tree, windowed KNN), an
//! online bagging ensemble, and batch baselines into one evaluation harness
//! with k-fold and prequential (test-then-train) protocols plus the weighted
//! misclassification cost used to compare them.
//!
//! All randomness is seed-derived and flows through 64-bit PCG generators
//! (see [`rng`]), so every stream, split, and ensemble is reproducible.

pub mod bagging;
pub mod baselines;
pub mod data;
pub mod eval;
pub mod hoeffding;
pub mod knn;
pub mod learner;
pub mod nb;
pub mod rng;
pub mod snapshot;
pub mod synth;

pub use data::{
    AttrKind, Attribute, ClassLabel, DatasetSchema, FeatureValue, FeatureVector, LabeledDataset,
    Transaction, TxType,
};
pub use learner::{ClassDistribution, IncrementalLearner};
