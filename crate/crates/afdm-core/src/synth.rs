//! Seeded synthetic mobile-money streams with scripted account-takeover
//! fraud, standing in for a real one-month transaction log so every
//! experiment is reproducible offline.
//!
//! The fraud scenario is the classic balance drain: a TRANSFER of the
//! victim's full balance to a freshly created mule account followed by a
//! CASH_OUT of the same amount from the mule, both in the same hour. Victim
//! accounts are frozen afterwards, mirroring the usual post-fraud handling.
//!
//! All randomness comes from a 64-bit PCG seeded from `GeneratorConfig::seed`
//! (see [`crate::rng`]), so identical configs produce byte-identical streams
//! on every platform.

use rand::RngExt;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Transaction, TxType};
use crate::rng::{rng_from_seed, AfdmRng};

/// Customer opening balances: LogNormal(ln-mean 10, ln-sigma 0.5), median
/// around 22k currency units, so ordinary spending rarely empties an account
/// inside the simulated month.
const INITIAL_BALANCE_LOG_MEAN: f64 = 10.0;
const INITIAL_BALANCE_LOG_SIGMA: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("type_mix must have 5 entries summing to 1 within 1e-9")]
    BadTypeMix,
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("tx_per_step_mean must be positive")]
    BadTxRate,
    #[error("fraud_scenario_rate must lie in [0, 1]")]
    BadFraudRate,
    #[error("amount parameters must be finite with non-negative sigma")]
    BadAmountParams,
    #[error("concept_drift is reserved and must be null")]
    DriftReserved,
}

/// Generator knobs; JSON field names mirror this struct exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    /// Simulated hours.
    pub n_steps: u32,
    pub customers: u32,
    pub merchants: u32,
    /// Per-step transaction count is Poisson(tx_per_step_mean x customers / 100).
    pub tx_per_step_mean: f64,
    /// Probabilities for CASH_IN, CASH_OUT, DEBIT, PAYMENT, TRANSFER in order.
    pub type_mix: [f64; 5],
    pub amount_log_mean: f64,
    pub amount_log_sigma: f64,
    /// Per step, per customer probability of triggering the drain scenario.
    pub fraud_scenario_rate: f64,
    pub seed: u64,
    /// Reserved hook for a future drift profile; must stay null in v1.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub concept_drift: Option<serde_json::Value>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_steps: 720,
            customers: 1000,
            merchants: 100,
            tx_per_step_mean: 7.0,
            type_mix: [0.22, 0.33, 0.01, 0.36, 0.08],
            amount_log_mean: 5.0,
            amount_log_sigma: 1.2,
            fraud_scenario_rate: 5e-4,
            seed: 42,
            concept_drift: None,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let sum: f64 = self.type_mix.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || self.type_mix.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(ConfigError::BadTypeMix);
        }
        if self.n_steps < 1 {
            return Err(ConfigError::ZeroCount("n_steps"));
        }
        if self.customers < 1 {
            return Err(ConfigError::ZeroCount("customers"));
        }
        if self.merchants < 1 {
            return Err(ConfigError::ZeroCount("merchants"));
        }
        if self.tx_per_step_mean <= 0.0 || !self.tx_per_step_mean.is_finite() {
            return Err(ConfigError::BadTxRate);
        }
        if !(0.0..=1.0).contains(&self.fraud_scenario_rate) {
            return Err(ConfigError::BadFraudRate);
        }
        if !self.amount_log_mean.is_finite()
            || !self.amount_log_sigma.is_finite()
            || self.amount_log_sigma < 0.0
        {
            return Err(ConfigError::BadAmountParams);
        }
        if self.concept_drift.is_some() {
            return Err(ConfigError::DriftReserved);
        }
        Ok(())
    }
}

/// A tracked customer ledger entry; balance never goes negative.
#[derive(Debug, Clone, PartialEq)]
pub struct AccountState {
    pub id: String,
    pub balance: f64,
}

impl AccountState {
    pub fn new(id: String, balance: f64) -> AccountState {
        debug_assert!(balance >= 0.0);
        AccountState { id, balance }
    }
}

/// The balance-drain signature: TRANSFER of the full victim balance to a
/// fresh mule, then CASH_OUT of the same amount from the mule, both flagged
/// fraudulent at the same step. Returns an empty list when the victim has
/// nothing to steal.
pub fn inject_fraud_scenario(
    victim: &mut AccountState,
    step: u32,
    mule_id: String,
    sink_id: String,
) -> Vec<Transaction> {
    if victim.balance <= 0.0 {
        return Vec::new();
    }
    let amount = victim.balance;
    victim.balance = 0.0;
    vec![
        Transaction {
            step,
            tx_type: TxType::Transfer,
            amount,
            orig_id: victim.id.clone(),
            old_balance_orig: amount,
            new_balance_orig: 0.0,
            dest_id: mule_id.clone(),
            old_balance_dest: 0.0,
            new_balance_dest: amount,
            is_fraud: true,
            is_flagged: false,
        },
        Transaction {
            step,
            tx_type: TxType::CashOut,
            amount,
            orig_id: mule_id,
            old_balance_orig: amount,
            new_balance_orig: 0.0,
            dest_id: sink_id,
            old_balance_dest: 0.0,
            new_balance_dest: 0.0,
            is_fraud: true,
            is_flagged: false,
        },
    ]
}

struct World {
    customers: Vec<AccountState>,
    /// Indices of customers still transacting; drained victims are frozen.
    active: Vec<usize>,
    merchants: Vec<String>,
    mule_seq: u64,
}

impl World {
    fn new(cfg: &GeneratorConfig, rng: &mut AfdmRng) -> World {
        let opening = LogNormal::new(INITIAL_BALANCE_LOG_MEAN, INITIAL_BALANCE_LOG_SIGMA)
            .expect("constant parameters are valid");
        let customers = (0..cfg.customers)
            .map(|i| AccountState::new(format!("C{:07}", i + 1), opening.sample(rng)))
            .collect();
        let merchants = (0..cfg.merchants).map(|j| format!("M{:07}", j + 1)).collect();
        World {
            customers,
            active: (0..cfg.customers as usize).collect(),
            merchants,
            mule_seq: 0,
        }
    }

    fn pick_active(&self, rng: &mut AfdmRng) -> Option<usize> {
        if self.active.is_empty() {
            return None;
        }
        Some(self.active[rng.random_range(0..self.active.len())])
    }

    fn pick_merchant(&self, rng: &mut AfdmRng) -> String {
        self.merchants[rng.random_range(0..self.merchants.len())].clone()
    }

    fn freeze(&mut self, customer: usize) {
        self.active.retain(|&c| c != customer);
    }

    fn next_mule(&mut self) -> String {
        self.mule_seq += 1;
        format!("C9{:06}", self.mule_seq)
    }
}

/// Generate the full stream for a config. Transactions come out ordered by
/// non-decreasing step; every originating ledger stays non-negative because
/// debits exceeding the payer balance are declined rather than emitted.
pub fn generate(cfg: &GeneratorConfig) -> Result<Vec<Transaction>, ConfigError> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut world = World::new(cfg, &mut rng);
    let amounts = LogNormal::new(cfg.amount_log_mean, cfg.amount_log_sigma)
        .map_err(|_| ConfigError::BadAmountParams)?;
    let per_step = Poisson::new(cfg.tx_per_step_mean * cfg.customers as f64 / 100.0)
        .map_err(|_| ConfigError::BadTxRate)?;

    let mut out = Vec::new();
    for step in 0..cfg.n_steps {
        let n_tx = per_step.sample(&mut rng) as usize;
        for _ in 0..n_tx {
            let tx_type = sample_type(&cfg.type_mix, &mut rng);
            let amount = amounts.sample(&mut rng);
            if let Some(tx) = emit_legal(&mut world, step, tx_type, amount, &mut rng) {
                out.push(tx);
            }
        }
        // One Bernoulli trial per (step, customer); triggers on an empty or
        // frozen account dissolve into nothing.
        for c in 0..world.customers.len() {
            if rng.random::<f64>() < cfg.fraud_scenario_rate {
                let mule = world.next_mule();
                let sink = world.pick_merchant(&mut rng);
                let txs = inject_fraud_scenario(&mut world.customers[c], step, mule, sink);
                if !txs.is_empty() {
                    out.extend(txs);
                    world.freeze(c);
                }
            }
        }
    }
    Ok(out)
}

fn sample_type(mix: &[f64; 5], rng: &mut AfdmRng) -> TxType {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in mix.iter().enumerate() {
        acc += p;
        if u < acc {
            return TxType::ALL[i];
        }
    }
    TxType::Transfer
}

fn emit_legal(
    world: &mut World,
    step: u32,
    tx_type: TxType,
    amount: f64,
    rng: &mut AfdmRng,
) -> Option<Transaction> {
    match tx_type {
        TxType::CashIn => {
            // Deposit via an agent: the customer is the credited destination;
            // agent books are not modeled and report zero.
            let c = world.pick_active(rng)?;
            let orig = world.pick_merchant(rng);
            let cust = &mut world.customers[c];
            let old = cust.balance;
            cust.balance += amount;
            Some(Transaction {
                step,
                tx_type,
                amount,
                orig_id: orig,
                old_balance_orig: 0.0,
                new_balance_orig: 0.0,
                dest_id: cust.id.clone(),
                old_balance_dest: old,
                new_balance_dest: cust.balance,
                is_fraud: false,
                is_flagged: false,
            })
        }
        TxType::CashOut | TxType::Debit | TxType::Payment => {
            let c = world.pick_active(rng)?;
            let dest = world.pick_merchant(rng);
            let cust = &mut world.customers[c];
            if amount > cust.balance {
                return None; // insufficient funds: declined
            }
            let old = cust.balance;
            cust.balance -= amount;
            Some(Transaction {
                step,
                tx_type,
                amount,
                orig_id: cust.id.clone(),
                old_balance_orig: old,
                new_balance_orig: cust.balance,
                dest_id: dest,
                old_balance_dest: 0.0,
                new_balance_dest: 0.0,
                is_fraud: false,
                is_flagged: false,
            })
        }
        TxType::Transfer => {
            if world.active.len() < 2 {
                return None;
            }
            let from = world.pick_active(rng)?;
            let to = loop {
                let t = world.pick_active(rng)?;
                if t != from {
                    break t;
                }
            };
            if amount > world.customers[from].balance {
                return None;
            }
            let old_from = world.customers[from].balance;
            world.customers[from].balance -= amount;
            let old_to = world.customers[to].balance;
            world.customers[to].balance += amount;
            Some(Transaction {
                step,
                tx_type,
                amount,
                orig_id: world.customers[from].id.clone(),
                old_balance_orig: old_from,
                new_balance_orig: world.customers[from].balance,
                dest_id: world.customers[to].id.clone(),
                old_balance_dest: old_to,
                new_balance_dest: world.customers[to].balance,
                is_fraud: false,
                is_flagged: false,
            })
        }
    }
}
