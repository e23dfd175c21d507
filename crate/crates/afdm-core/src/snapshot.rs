//! Versioned JSON persistence for trained models. A snapshot wraps the full
//! learner state behind an algorithm tag and the schema it was trained on;
//! restoring validates both before reconstructing, and a restored model
//! reproduces the saved model's predictions exactly (all statistics are
//! plain counts and `f64`s, which round-trip through JSON losslessly).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bagging::OnlineBaggingEnsemble;
use crate::baselines::{BatchTreeModel, LogisticModel};
use crate::data::{DatasetSchema, FeatureVector};
use crate::eval::ClassifierSpec;
use crate::hoeffding::HoeffdingTreeLearner;
use crate::knn::KnnWindowLearner;
use crate::learner::{ClassDistribution, IncrementalLearner, LearnerError};
use crate::nb::NbUpdateable;
use crate::rng::derive_seed;

pub const SNAPSHOT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot format version {found}, this build reads {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("unknown algorithm tag `{0}`")]
    UnknownAlgorithm(String),
    #[error("snapshot schema does not match the expected schema")]
    SchemaMismatch,
    #[error("malformed snapshot: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("snapshot io: {0}")]
    Io(#[from] std::io::Error),
}

/// Any model the toolkit can persist and score with.
#[derive(Debug, Clone, PartialEq)]
pub enum SnapshotModel {
    Nb(NbUpdateable),
    Ht(HoeffdingTreeLearner),
    Knn(KnnWindowLearner),
    BaggedNb(OnlineBaggingEnsemble<NbUpdateable>),
    Tree(BatchTreeModel),
    Logistic(LogisticModel),
}

impl SnapshotModel {
    pub fn algorithm_tag(&self) -> &'static str {
        match self {
            SnapshotModel::Nb(_) => "nb-updateable",
            SnapshotModel::Ht(_) => "hoeffding-tree",
            SnapshotModel::Knn(_) => "knn-window",
            SnapshotModel::BaggedNb(_) => "afdm-bagged-nb",
            SnapshotModel::Tree(_) => "batch-tree",
            SnapshotModel::Logistic(_) => "logistic",
        }
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> Result<ClassDistribution, LearnerError> {
        match self {
            SnapshotModel::Nb(m) => m.predict_proba(x),
            SnapshotModel::Ht(m) => m.predict_proba(x),
            SnapshotModel::Knn(m) => m.predict_proba(x),
            SnapshotModel::BaggedNb(m) => m.predict_proba(x),
            SnapshotModel::Tree(m) => m.predict_proba(x),
            SnapshotModel::Logistic(m) => m.predict_proba(x),
        }
    }

    fn instances(&self) -> u64 {
        match self {
            SnapshotModel::Nb(m) => m.instances_seen(),
            SnapshotModel::Ht(m) => m.instances_seen(),
            SnapshotModel::Knn(m) => m.instances_seen(),
            SnapshotModel::BaggedNb(m) => m.instances_seen(),
            SnapshotModel::Tree(_) | SnapshotModel::Logistic(_) => 0,
        }
    }

    fn state_value(&self) -> serde_json::Value {
        match self {
            SnapshotModel::Nb(m) => serde_json::to_value(m),
            SnapshotModel::Ht(m) => serde_json::to_value(m),
            SnapshotModel::Knn(m) => serde_json::to_value(m),
            SnapshotModel::BaggedNb(m) => serde_json::to_value(m),
            SnapshotModel::Tree(m) => serde_json::to_value(m),
            SnapshotModel::Logistic(m) => serde_json::to_value(m),
        }
        .expect("model state serializes")
    }
}

/// An incremental model built from a [`ClassifierSpec`], used by the stream
/// command. Batch specs have no streaming form.
pub fn build_incremental(
    spec: &ClassifierSpec,
    schema: DatasetSchema,
    seed: u64,
) -> Option<SnapshotModel> {
    Some(match spec {
        ClassifierSpec::Afdm { members, nb } => SnapshotModel::BaggedNb(OnlineBaggingEnsemble::new(
            NbUpdateable::new(schema, *nb),
            *members,
            derive_seed(seed, 0),
        )),
        ClassifierSpec::NbUpdateable { params } => {
            SnapshotModel::Nb(NbUpdateable::new(schema, *params))
        }
        ClassifierSpec::HoeffdingTree { params } => {
            SnapshotModel::Ht(HoeffdingTreeLearner::new(schema, *params))
        }
        ClassifierSpec::KnnWindow { params } => {
            SnapshotModel::Knn(KnnWindowLearner::new(schema, *params))
        }
        ClassifierSpec::BatchTree { .. } | ClassifierSpec::Logistic { .. } => return None,
    })
}

impl IncrementalLearner for SnapshotModel {
    fn schema(&self) -> &DatasetSchema {
        match self {
            SnapshotModel::Nb(m) => m.schema(),
            SnapshotModel::Ht(m) => m.schema(),
            SnapshotModel::Knn(m) => m.schema(),
            SnapshotModel::BaggedNb(m) => m.schema(),
            SnapshotModel::Tree(_) | SnapshotModel::Logistic(_) => {
                panic!("batch models do not stream")
            }
        }
    }

    fn predict_proba(&self, x: &FeatureVector) -> Result<ClassDistribution, LearnerError> {
        SnapshotModel::predict_proba(self, x)
    }

    fn update(&mut self, x: &FeatureVector) -> Result<(), LearnerError> {
        match self {
            SnapshotModel::Nb(m) => m.update(x),
            SnapshotModel::Ht(m) => m.update(x),
            SnapshotModel::Knn(m) => m.update(x),
            SnapshotModel::BaggedNb(m) => m.update(x),
            SnapshotModel::Tree(_) | SnapshotModel::Logistic(_) => {
                Err(LearnerError::SchemaMismatch)
            }
        }
    }

    fn instances_seen(&self) -> u64 {
        self.instances()
    }

    fn reset(&mut self) {
        match self {
            SnapshotModel::Nb(m) => m.reset(),
            SnapshotModel::Ht(m) => m.reset(),
            SnapshotModel::Knn(m) => m.reset(),
            SnapshotModel::BaggedNb(m) => m.reset(),
            SnapshotModel::Tree(_) | SnapshotModel::Logistic(_) => {}
        }
    }
}

/// The on-disk envelope: version, algorithm tag, training schema, instance
/// count, tool metadata, and the verbatim model state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSnapshot {
    pub format_version: u32,
    pub algorithm: String,
    pub created_by: String,
    pub schema: DatasetSchema,
    pub instances: u64,
    pub state: serde_json::Value,
}

impl ModelSnapshot {
    pub fn capture(model: &SnapshotModel, schema: &DatasetSchema) -> ModelSnapshot {
        ModelSnapshot {
            format_version: SNAPSHOT_FORMAT_VERSION,
            algorithm: model.algorithm_tag().to_string(),
            created_by: format!("afdm {}", env!("CARGO_PKG_VERSION")),
            schema: schema.clone(),
            instances: model.instances(),
            state: model.state_value(),
        }
    }

    pub fn restore(&self) -> Result<SnapshotModel, SnapshotError> {
        if self.format_version != SNAPSHOT_FORMAT_VERSION {
            return Err(SnapshotError::VersionMismatch {
                found: self.format_version,
                expected: SNAPSHOT_FORMAT_VERSION,
            });
        }
        let state = self.state.clone();
        let model = match self.algorithm.as_str() {
            "nb-updateable" => SnapshotModel::Nb(serde_json::from_value(state)?),
            "hoeffding-tree" => SnapshotModel::Ht(serde_json::from_value(state)?),
            "knn-window" => SnapshotModel::Knn(serde_json::from_value(state)?),
            "afdm-bagged-nb" => SnapshotModel::BaggedNb(serde_json::from_value(state)?),
            "batch-tree" => SnapshotModel::Tree(serde_json::from_value(state)?),
            "logistic" => SnapshotModel::Logistic(serde_json::from_value(state)?),
            other => return Err(SnapshotError::UnknownAlgorithm(other.to_string())),
        };
        Ok(model)
    }

    /// Canonical serialization: pretty JSON with the state object's keys in
    /// sorted order, so save -> restore -> save is byte-identical.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<ModelSnapshot, SnapshotError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), SnapshotError> {
        Ok(std::fs::write(path, self.to_json())?)
    }

    pub fn load(path: &std::path::Path) -> Result<ModelSnapshot, SnapshotError> {
        ModelSnapshot::from_json(&std::fs::read_to_string(path)?)
    }
}
