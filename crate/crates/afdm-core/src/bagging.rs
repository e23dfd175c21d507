//! Online bagging: the streaming analogue of bootstrap resampling. Each
//! ensemble member applies every arriving instance k ~ Poisson(1) times,
//! which approximates an independent with-replacement resample per member;
//! the ensemble prediction is the arithmetic mean of the member
//! distributions, which is what trims the variance of any single learner.
//!
//! Replication counts are a pure function of (seed, member index, stream
//! position), so runs are reproducible and permuting instances together with
//! their positions permutes every member's training multiset identically.
//!
//! Batch bootstrap bagging for the baseline comparison lives here too.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::data::{DatasetSchema, FeatureVector, LabeledDataset};
use crate::learner::{ClassDistribution, IncrementalLearner, LearnerError};
use crate::rng::{keyed_rng, rng_from_seed, AfdmRng};

/// One Poisson(1) draw via Knuth's product-of-uniforms loop.
pub fn poisson_one(rng: &mut AfdmRng) -> u32 {
    const EXP_NEG_ONE: f64 = 0.36787944117144233;
    let mut k = 0u32;
    let mut p = 1.0f64;
    loop {
        p *= rng.random::<f64>();
        if p <= EXP_NEG_ONE {
            return k;
        }
        k += 1;
    }
}

/// How many times a member replays each instance. `Fixed` is a diagnostic
/// hook: `Fixed(1)` makes a one-member ensemble coincide with its base
/// learner exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Replication {
    Poisson,
    Fixed(u32),
}

/// M independent copies of one incremental learner under Poisson replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineBaggingEnsemble<L> {
    members: Vec<L>,
    seed: u64,
    replication: Replication,
    position: u64,
    updates: u64,
}

impl<L: IncrementalLearner + Clone> OnlineBaggingEnsemble<L> {
    /// Build M members by cloning a fresh prototype.
    pub fn new(prototype: L, members: usize, seed: u64) -> OnlineBaggingEnsemble<L> {
        OnlineBaggingEnsemble::with_replication(prototype, members, seed, Replication::Poisson)
    }

    pub fn with_replication(
        prototype: L,
        members: usize,
        seed: u64,
        replication: Replication,
    ) -> OnlineBaggingEnsemble<L> {
        assert!(members >= 1, "ensemble needs at least one member");
        assert_eq!(prototype.instances_seen(), 0, "prototype must be untrained");
        OnlineBaggingEnsemble {
            members: vec![prototype; members],
            seed,
            replication,
            position: 0,
            updates: 0,
        }
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[L] {
        &self.members
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Replication count for one (member, position) pair; pure in the keys.
    pub fn replication_count(&self, member: u64, position: u64) -> u32 {
        match self.replication {
            Replication::Fixed(k) => k,
            Replication::Poisson => poisson_one(&mut keyed_rng(self.seed, member, position)),
        }
    }

    /// Apply one labeled instance at an explicit stream position. Positions
    /// key the member RNG draws, so replaying (instance, position) pairs in
    /// any order reproduces identical member states.
    pub fn update_at(&mut self, x: &FeatureVector, position: u64) -> Result<(), LearnerError> {
        for (i, member) in self.members.iter_mut().enumerate() {
            let reps = match self.replication {
                Replication::Fixed(k) => k,
                Replication::Poisson => poisson_one(&mut keyed_rng(self.seed, i as u64, position)),
            };
            for _ in 0..reps {
                member.update(x)?;
            }
        }
        self.updates += 1;
        Ok(())
    }
}

impl<L: IncrementalLearner + Clone> IncrementalLearner for OnlineBaggingEnsemble<L> {
    fn schema(&self) -> &DatasetSchema {
        self.members[0].schema()
    }

    fn predict_proba(&self, x: &FeatureVector) -> Result<ClassDistribution, LearnerError> {
        let mut fraud = 0.0;
        let mut legal = 0.0;
        for member in &self.members {
            let d = member.predict_proba(x)?;
            fraud += d.p_fraud;
            legal += d.p_legal;
        }
        // mean of valid distributions; renormalize against rounding drift
        Ok(ClassDistribution::from_scores(fraud, legal))
    }

    fn update(&mut self, x: &FeatureVector) -> Result<(), LearnerError> {
        let position = self.position;
        self.update_at(x, position)?;
        self.position += 1;
        Ok(())
    }

    fn instances_seen(&self) -> u64 {
        self.updates
    }

    fn reset(&mut self) {
        for member in &mut self.members {
            member.reset();
        }
        self.position = 0;
        self.updates = 0;
    }
}

/// With-replacement index sample of size n for one bootstrap member.
pub fn bootstrap_sample_indices(seed: u64, member: u64, n: usize) -> Vec<usize> {
    let mut rng = rng_from_seed(crate::rng::derive_seed(seed, member));
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

/// Sampling scheme for batch bagging; `Identity` is the degenerate test hook
/// that trains every member on the dataset as-is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BootstrapMode {
    Resample,
    Identity,
}

/// Mean-vote ensemble of batch models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaggedBatchModel<M> {
    pub members: Vec<M>,
}

impl<M> BaggedBatchModel<M> {
    pub fn predict_with(
        &self,
        mut predict: impl FnMut(&M) -> Result<ClassDistribution, LearnerError>,
    ) -> Result<ClassDistribution, LearnerError> {
        let mut fraud = 0.0;
        let mut legal = 0.0;
        for member in &self.members {
            let d = predict(member)?;
            fraud += d.p_fraud;
            legal += d.p_legal;
        }
        Ok(ClassDistribution::from_scores(fraud, legal))
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BootstrapError<E> {
    #[error("cannot bootstrap an empty dataset")]
    EmptyDataset,
    #[error("member training failed: {0}")]
    Train(E),
}

/// Train M batch models, each on an N-sized with-replacement sample drawn
/// from its member-specific stream; prediction is the member mean.
pub fn bootstrap_bag_train<M, E>(
    factory: impl Fn(&LabeledDataset) -> Result<M, E>,
    ds: &LabeledDataset,
    members: usize,
    seed: u64,
    mode: BootstrapMode,
) -> Result<BaggedBatchModel<M>, BootstrapError<E>> {
    if ds.is_empty() {
        return Err(BootstrapError::EmptyDataset);
    }
    let mut trained = Vec::with_capacity(members);
    for member in 0..members {
        let sample = match mode {
            BootstrapMode::Identity => ds.clone(),
            BootstrapMode::Resample => {
                let idx = bootstrap_sample_indices(seed, member as u64, ds.len());
                let rows = idx.iter().map(|&i| ds.rows()[i].clone()).collect();
                LabeledDataset::new(ds.schema().clone(), rows).expect("sampled rows conform")
            }
        };
        trained.push(factory(&sample).map_err(BootstrapError::Train)?);
    }
    Ok(BaggedBatchModel { members: trained })
}
