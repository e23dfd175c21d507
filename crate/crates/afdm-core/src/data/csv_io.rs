use std::io::{Read, Write};

use thiserror::Error;

use super::transaction::{Transaction, TxType};

/// Column layout of the canonical log format. The header row is mandatory and
/// must match these names exactly, in order.
pub const CANONICAL_HEADER: [&str; 11] = [
    "step",
    "type",
    "amount",
    "nameOrig",
    "oldbalanceOrg",
    "newbalanceOrig",
    "nameDest",
    "oldbalanceDest",
    "newbalanceDest",
    "isFraud",
    "isFlaggedFraud",
];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("header column {index} is `{found}`, expected `{expected}`")]
    HeaderMismatch {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("header has {found} columns, expected {expected}")]
    HeaderArity { expected: usize, found: usize },
    #[error("line {line}: {reason}")]
    Row { line: u64, reason: String },
    #[error("csv read error: {0}")]
    Io(#[from] csv::Error),
}

impl CsvError {
    fn row(line: u64, reason: impl Into<String>) -> CsvError {
        CsvError::Row {
            line,
            reason: reason.into(),
        }
    }

    /// Row-level errors are skippable under `--skip-bad-rows`; header and IO
    /// errors always abort.
    pub fn is_row_error(&self) -> bool {
        matches!(self, CsvError::Row { .. })
    }
}

/// Streaming reader over the canonical CSV format. The header is validated
/// eagerly by [`parse_csv`]; each data row then yields either a transaction or
/// a row error carrying its line number, so the caller decides between
/// abort-on-first and skip-and-count.
pub struct TransactionReader<R: Read> {
    inner: csv::StringRecordsIntoIter<R>,
}

impl<R: Read> Iterator for TransactionReader<R> {
    type Item = Result<Transaction, CsvError>;

    fn next(&mut self) -> Option<Self::Item> {
        let record = match self.inner.next()? {
            Ok(r) => r,
            Err(e) => return Some(Err(e.into())),
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        Some(parse_record(&record, line))
    }
}

/// Open a canonical CSV byte stream: validates the header row, then yields
/// transactions in file order.
pub fn parse_csv<R: Read>(source: R) -> Result<TransactionReader<R>, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    if headers.len() != CANONICAL_HEADER.len() {
        return Err(CsvError::HeaderArity {
            expected: CANONICAL_HEADER.len(),
            found: headers.len(),
        });
    }
    for (i, expected) in CANONICAL_HEADER.iter().enumerate() {
        let found = &headers[i];
        if found != *expected {
            return Err(CsvError::HeaderMismatch {
                index: i,
                expected: (*expected).to_string(),
                found: found.to_string(),
            });
        }
    }
    Ok(TransactionReader {
        inner: reader.into_records(),
    })
}

fn parse_record(record: &csv::StringRecord, line: u64) -> Result<Transaction, CsvError> {
    if record.len() != CANONICAL_HEADER.len() {
        return Err(CsvError::row(
            line,
            format!("{} fields, expected {}", record.len(), CANONICAL_HEADER.len()),
        ));
    }
    let step: u32 = record[0]
        .parse()
        .map_err(|_| CsvError::row(line, format!("non-integer step `{}`", &record[0])))?;
    let tx_type = TxType::parse(&record[1])
        .ok_or_else(|| CsvError::row(line, format!("unknown transaction type `{}`", &record[1])))?;
    let amount = parse_money(&record[2], "amount", line)?;
    let old_balance_orig = parse_money(&record[4], "oldbalanceOrg", line)?;
    let new_balance_orig = parse_money(&record[5], "newbalanceOrig", line)?;
    let old_balance_dest = parse_money(&record[7], "oldbalanceDest", line)?;
    let new_balance_dest = parse_money(&record[8], "newbalanceDest", line)?;
    let is_fraud = parse_flag(&record[9], "isFraud", line)?;
    let is_flagged = parse_flag(&record[10], "isFlaggedFraud", line)?;
    Ok(Transaction {
        step,
        tx_type,
        amount,
        orig_id: record[3].to_string(),
        old_balance_orig,
        new_balance_orig,
        dest_id: record[6].to_string(),
        old_balance_dest,
        new_balance_dest,
        is_fraud,
        is_flagged,
    })
}

fn parse_money(field: &str, name: &str, line: u64) -> Result<f64, CsvError> {
    let v: f64 = field
        .parse()
        .map_err(|_| CsvError::row(line, format!("non-numeric {name} `{field}`")))?;
    if !v.is_finite() || v < 0.0 {
        return Err(CsvError::row(line, format!("negative or non-finite {name} `{field}`")));
    }
    Ok(v)
}

fn parse_flag(field: &str, name: &str, line: u64) -> Result<bool, CsvError> {
    match field {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(CsvError::row(line, format!("{name} must be 0 or 1, got `{other}`"))),
    }
}

/// Write transactions in the canonical format. `f64` values print in Rust's
/// shortest round-trip form, so parse → write → parse is the identity.
pub fn write_csv<W: Write>(txs: &[Transaction], out: W) -> std::io::Result<()> {
    let mut w = std::io::BufWriter::new(out);
    writeln!(w, "{}", CANONICAL_HEADER.join(","))?;
    for tx in txs {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            tx.step,
            tx.tx_type.as_str(),
            tx.amount,
            tx.orig_id,
            tx.old_balance_orig,
            tx.new_balance_orig,
            tx.dest_id,
            tx.old_balance_dest,
            tx.new_balance_dest,
            tx.is_fraud as u8,
            tx.is_flagged as u8,
        )?;
    }
    w.flush()
}
