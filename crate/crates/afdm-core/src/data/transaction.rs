use serde::{Deserialize, Serialize};

use super::schema::{
    Attribute, ClassLabel, DatasetSchema, FeatureValue, FeatureVector,
};

/// The five mobile-money transaction types carried by the canonical log format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TxType {
    CashIn,
    CashOut,
    Debit,
    Payment,
    Transfer,
}

impl TxType {
    pub const ALL: [TxType; 5] = [
        TxType::CashIn,
        TxType::CashOut,
        TxType::Debit,
        TxType::Payment,
        TxType::Transfer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TxType::CashIn => "CASH_IN",
            TxType::CashOut => "CASH_OUT",
            TxType::Debit => "DEBIT",
            TxType::Payment => "PAYMENT",
            TxType::Transfer => "TRANSFER",
        }
    }

    /// Closed-world parse: anything outside the five names is rejected.
    pub fn parse(s: &str) -> Option<TxType> {
        match s {
            "CASH_IN" => Some(TxType::CashIn),
            "CASH_OUT" => Some(TxType::CashOut),
            "DEBIT" => Some(TxType::Debit),
            "PAYMENT" => Some(TxType::Payment),
            "TRANSFER" => Some(TxType::Transfer),
            _ => None,
        }
    }

    /// Dense index matching the canonical schema's value order.
    pub fn index(self) -> usize {
        match self {
            TxType::CashIn => 0,
            TxType::CashOut => 1,
            TxType::Debit => 2,
            TxType::Payment => 3,
            TxType::Transfer => 4,
        }
    }

    /// True for types that debit the originating account.
    pub fn is_outgoing(self) -> bool {
        !matches!(self, TxType::CashIn)
    }
}

/// One mobile-money event: the unit of streaming.
///
/// Amounts and balances are non-negative 64-bit decimals; `step` is the hour
/// index since the start of the log. `is_flagged` is an upstream rule flag
/// carried through but never shown to the learners.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transaction {
    pub step: u32,
    pub tx_type: TxType,
    pub amount: f64,
    pub orig_id: String,
    pub old_balance_orig: f64,
    pub new_balance_orig: f64,
    pub dest_id: String,
    pub old_balance_dest: f64,
    pub new_balance_dest: f64,
    pub is_fraud: bool,
    pub is_flagged: bool,
}

impl Transaction {
    pub fn label(&self) -> ClassLabel {
        if self.is_fraud {
            ClassLabel::Fraud
        } else {
            ClassLabel::Legal
        }
    }
}

/// The model-facing attribute space: the transaction type plus the six
/// numeric columns that survive preprocessing. Account identifiers and the
/// upstream flag are dropped (high-cardinality noise and a leaked rule signal).
pub fn canonical_schema() -> DatasetSchema {
    DatasetSchema::new(
        vec![
            Attribute::categorical(
                "type",
                &["CASH_IN", "CASH_OUT", "DEBIT", "PAYMENT", "TRANSFER"],
            ),
            Attribute::numeric("step"),
            Attribute::numeric("amount"),
            Attribute::numeric("oldbalanceOrg"),
            Attribute::numeric("newbalanceOrig"),
            Attribute::numeric("oldbalanceDest"),
            Attribute::numeric("newbalanceDest"),
        ],
        "isFraud",
    )
    .expect("canonical schema is well-formed")
}

/// Encode a transaction against the canonical schema. Total: every in-invariant
/// transaction maps to a conforming 7-attribute vector with a label.
pub fn to_features(tx: &Transaction, schema: &DatasetSchema) -> FeatureVector {
    debug_assert_eq!(schema.arity(), 7, "to_features expects the canonical schema");
    FeatureVector::new(
        vec![
            FeatureValue::Cat(tx.tx_type.index()),
            FeatureValue::Num(tx.step as f64),
            FeatureValue::Num(tx.amount),
            FeatureValue::Num(tx.old_balance_orig),
            FeatureValue::Num(tx.new_balance_orig),
            FeatureValue::Num(tx.old_balance_dest),
            FeatureValue::Num(tx.new_balance_dest),
        ],
        Some(tx.label()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_tx() -> Transaction {
        Transaction {
            step: 1,
            tx_type: TxType::Transfer,
            amount: 181.0,
            orig_id: "C1".into(),
            old_balance_orig: 181.0,
            new_balance_orig: 0.0,
            dest_id: "C2".into(),
            old_balance_dest: 0.0,
            new_balance_dest: 0.0,
            is_fraud: true,
            is_flagged: false,
        }
    }

    #[test]
    fn encodes_the_transfer_example() {
        let schema = canonical_schema();
        let fv = to_features(&sample_tx(), &schema);
        assert!(fv.conforms(&schema));
        assert_eq!(fv.label, Some(ClassLabel::Fraud));
        assert_eq!(
            fv.values,
            vec![
                FeatureValue::Cat(TxType::Transfer.index()),
                FeatureValue::Num(1.0),
                FeatureValue::Num(181.0),
                FeatureValue::Num(181.0),
                FeatureValue::Num(0.0),
                FeatureValue::Num(0.0),
                FeatureValue::Num(0.0),
            ]
        );
    }

    #[test]
    fn dropped_fields_do_not_affect_encoding() {
        let schema = canonical_schema();
        let a = sample_tx();
        let mut b = sample_tx();
        b.orig_id = "C999".into();
        b.dest_id = "C888".into();
        b.is_flagged = true;
        assert_eq!(to_features(&a, &schema), to_features(&b, &schema));
    }

    #[test]
    fn arity_is_always_seven() {
        let schema = canonical_schema();
        let mut tx = sample_tx();
        tx.tx_type = TxType::CashIn;
        tx.is_fraud = false;
        let fv = to_features(&tx, &schema);
        assert_eq!(fv.values.len(), 7);
        assert_eq!(fv.label, Some(ClassLabel::Legal));
    }

    #[test]
    fn tx_type_parse_is_closed_world() {
        assert_eq!(TxType::parse("TRANSFER"), Some(TxType::Transfer));
        assert_eq!(TxType::parse("WIRE"), None);
        assert_eq!(TxType::parse("transfer"), None);
    }
}
