//! Transaction records, their model-facing feature encoding, CSV ingestion,
//! and the preprocessing steps (balancing, stratified fold split) applied
//! before training.

mod csv_io;
mod preprocess;
mod schema;
mod transaction;

pub use csv_io::{parse_csv, write_csv, CsvError, TransactionReader, CANONICAL_HEADER};
pub use preprocess::{
    balance_dataset, balance_indices, balance_transactions, split_stratified_folds,
    PreprocessError,
};
pub use schema::{
    AttrKind, Attribute, ClassLabel, DatasetSchema, FeatureValue, FeatureVector, LabeledDataset,
    SchemaError,
};
pub use transaction::{canonical_schema, to_features, Transaction, TxType};
