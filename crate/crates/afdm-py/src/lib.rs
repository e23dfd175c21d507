//! Python bindings for the streaming fraud-detection toolkit: dataset
//! loading/generation, the k-fold comparison, prequential runs, and an
//! incremental classifier handle for per-transaction scoring.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use afdm_core::data::{
    balance_transactions, canonical_schema, parse_csv, to_features, write_csv, ClassLabel,
    DatasetSchema, FeatureValue, FeatureVector, LabeledDataset, Transaction, TxType,
};
use afdm_core::eval::{compare, prequential_evaluate, render_table, ClassifierSpec, CostParams};
use afdm_core::learner::IncrementalLearner;
use afdm_core::snapshot::{build_incremental, ModelSnapshot, SnapshotModel};
use afdm_core::synth::{generate as synth_generate, GeneratorConfig};

fn value_err(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn spec_from_name(name: &str, bag_size: usize) -> PyResult<ClassifierSpec> {
    ClassifierSpec::from_cli_name(name, bag_size)
        .ok_or_else(|| value_err(format!("unknown classifier `{name}`")))
}

/// A transaction row as Python sees it:
/// (type, step, amount, old_balance_orig, new_balance_orig,
///  old_balance_dest, new_balance_dest).
type PyRow = (String, f64, f64, f64, f64, f64, f64);

fn row_to_features(row: &PyRow, label: Option<ClassLabel>) -> PyResult<FeatureVector> {
    let tx_type = TxType::parse(&row.0)
        .ok_or_else(|| value_err(format!("unknown transaction type `{}`", row.0)))?;
    Ok(FeatureVector::new(
        vec![
            FeatureValue::Cat(tx_type.index()),
            FeatureValue::Num(row.1),
            FeatureValue::Num(row.2),
            FeatureValue::Num(row.3),
            FeatureValue::Num(row.4),
            FeatureValue::Num(row.5),
            FeatureValue::Num(row.6),
        ],
        label,
    ))
}

/// An in-memory transaction set backed by the canonical schema.
#[pyclass]
struct Dataset {
    txs: Vec<Transaction>,
}

impl Dataset {
    fn to_labeled(&self) -> LabeledDataset {
        let schema = canonical_schema();
        let rows = self.txs.iter().map(|tx| to_features(tx, &schema)).collect();
        LabeledDataset::new(schema, rows).expect("encoded transactions conform")
    }
}

#[pymethods]
impl Dataset {
    /// Load a canonical transaction CSV.
    #[staticmethod]
    #[pyo3(signature = (path, skip_bad_rows = false))]
    fn from_csv(path: &str, skip_bad_rows: bool) -> PyResult<Dataset> {
        let file = std::fs::File::open(path).map_err(value_err)?;
        let reader = parse_csv(std::io::BufReader::new(file)).map_err(value_err)?;
        let mut txs = Vec::new();
        for row in reader {
            match row {
                Ok(tx) => txs.push(tx),
                Err(err) if skip_bad_rows && err.is_row_error() => {}
                Err(err) => return Err(value_err(err)),
            }
        }
        Ok(Dataset { txs })
    }

    fn to_csv(&self, path: &str) -> PyResult<()> {
        let file = std::fs::File::create(path).map_err(value_err)?;
        write_csv(&self.txs, file).map_err(value_err)
    }

    fn __len__(&self) -> usize {
        self.txs.len()
    }

    fn fraud_count(&self) -> usize {
        self.txs.iter().filter(|t| t.is_fraud).count()
    }

    /// Undersample the legal class to `ratio` legal rows per fraud row.
    fn balance(&self, ratio: f64, seed: u64) -> PyResult<Dataset> {
        let kept = balance_transactions(&self.txs, ratio, seed).map_err(value_err)?;
        Ok(Dataset { txs: kept })
    }

    /// Rows as (type, step, amount, old_balance_orig, new_balance_orig,
    /// old_balance_dest, new_balance_dest, is_fraud) tuples.
    #[allow(clippy::type_complexity)]
    fn rows(&self) -> Vec<(String, f64, f64, f64, f64, f64, f64, bool)> {
        self.txs
            .iter()
            .map(|t| {
                (
                    t.tx_type.as_str().to_string(),
                    t.step as f64,
                    t.amount,
                    t.old_balance_orig,
                    t.new_balance_orig,
                    t.old_balance_dest,
                    t.new_balance_dest,
                    t.is_fraud,
                )
            })
            .collect()
    }
}

/// Generate a synthetic dataset from a GeneratorConfig JSON document
/// (missing fields take the documented defaults).
#[pyfunction]
fn generate(config_json: &str) -> PyResult<Dataset> {
    let config: GeneratorConfig = serde_json::from_str(config_json).map_err(value_err)?;
    let txs = synth_generate(&config).map_err(value_err)?;
    Ok(Dataset { txs })
}

/// Stratified k-fold comparison over comma-separated classifier names;
/// returns the report rows as a JSON array sorted by cost.
#[pyfunction]
#[pyo3(signature = (dataset, classifiers, k = 10, seed = 42, w_fn = 10.0, w_fp = 1.0, bag_size = 10))]
#[allow(clippy::too_many_arguments)]
fn kfold_compare(
    dataset: &Dataset,
    classifiers: &str,
    k: usize,
    seed: u64,
    w_fn: f64,
    w_fp: f64,
    bag_size: usize,
) -> PyResult<String> {
    let specs: Vec<ClassifierSpec> = classifiers
        .split(',')
        .map(|n| spec_from_name(n.trim(), bag_size))
        .collect::<PyResult<_>>()?;
    let ds = dataset.to_labeled();
    let reports = compare(&specs, &ds, k, seed, CostParams { w_fn, w_fp }, false)
        .map_err(value_err)?;
    serde_json::to_string_pretty(&reports).map_err(value_err)
}

/// The comparison as an aligned text table (same rows as kfold_compare).
#[pyfunction]
#[pyo3(signature = (dataset, classifiers, k = 10, seed = 42, w_fn = 10.0, w_fp = 1.0, bag_size = 10))]
#[allow(clippy::too_many_arguments)]
fn kfold_table(
    dataset: &Dataset,
    classifiers: &str,
    k: usize,
    seed: u64,
    w_fn: f64,
    w_fp: f64,
    bag_size: usize,
) -> PyResult<String> {
    let specs: Vec<ClassifierSpec> = classifiers
        .split(',')
        .map(|n| spec_from_name(n.trim(), bag_size))
        .collect::<PyResult<_>>()?;
    let ds = dataset.to_labeled();
    let reports = compare(&specs, &ds, k, seed, CostParams { w_fn, w_fp }, false)
        .map_err(value_err)?;
    Ok(render_table(&reports))
}

/// Prequential (test-then-train) run of one incremental classifier over the
/// dataset in order; returns the cumulative snapshots as a JSON array.
#[pyfunction]
#[pyo3(signature = (dataset, classifier = "afdm", report_every = 1000, seed = 42, w_fn = 10.0, w_fp = 1.0, bag_size = 10))]
#[allow(clippy::too_many_arguments)]
fn prequential(
    dataset: &Dataset,
    classifier: &str,
    report_every: u64,
    seed: u64,
    w_fn: f64,
    w_fp: f64,
    bag_size: usize,
) -> PyResult<String> {
    let spec = spec_from_name(classifier, bag_size)?;
    if !spec.is_incremental() {
        return Err(value_err(format!("classifier `{classifier}` cannot stream")));
    }
    let schema = canonical_schema();
    let mut model = build_incremental(&spec, schema.clone(), seed).expect("incremental spec");
    let rows = dataset.txs.iter().map(|tx| to_features(tx, &schema));
    let snapshots = prequential_evaluate(
        &mut model,
        rows,
        CostParams { w_fn, w_fp },
        report_every,
        spec.cli_name(),
        serde_json::to_value(&spec).map_err(value_err)?,
    )
    .map_err(value_err)?;
    serde_json::to_string_pretty(&snapshots).map_err(value_err)
}

/// An incremental classifier handle: predict, then learn, one transaction at
/// a time.
#[pyclass]
struct StreamClassifier {
    model: SnapshotModel,
    schema: DatasetSchema,
}

#[pymethods]
impl StreamClassifier {
    #[new]
    #[pyo3(signature = (classifier = "afdm", bag_size = 10, seed = 42))]
    fn new(classifier: &str, bag_size: usize, seed: u64) -> PyResult<StreamClassifier> {
        let spec = spec_from_name(classifier, bag_size)?;
        if !spec.is_incremental() {
            return Err(value_err(format!("classifier `{classifier}` cannot stream")));
        }
        let schema = canonical_schema();
        let model = build_incremental(&spec, schema.clone(), seed).expect("incremental spec");
        Ok(StreamClassifier { model, schema })
    }

    /// (p_fraud, p_legal) for one transaction row.
    fn predict_proba(&self, row: PyRow) -> PyResult<(f64, f64)> {
        let features = row_to_features(&row, None)?;
        let d = self.model.predict_proba(&features).map_err(value_err)?;
        Ok((d.p_fraud, d.p_legal))
    }

    /// True when the row classifies as fraud (ties go to fraud).
    fn classify(&self, row: PyRow) -> PyResult<bool> {
        let features = row_to_features(&row, None)?;
        let d = self.model.predict_proba(&features).map_err(value_err)?;
        Ok(d.classify() == ClassLabel::Fraud)
    }

    /// Fold one labeled transaction into the model.
    fn update(&mut self, row: PyRow, is_fraud: bool) -> PyResult<()> {
        let label = if is_fraud { ClassLabel::Fraud } else { ClassLabel::Legal };
        let features = row_to_features(&row, Some(label))?;
        self.model.update(&features).map_err(value_err)
    }

    fn instances_seen(&self) -> u64 {
        self.model.instances_seen()
    }

    /// Versioned snapshot of the current model state.
    fn snapshot_json(&self) -> String {
        ModelSnapshot::capture(&self.model, &self.schema).to_json()
    }

    #[staticmethod]
    fn from_snapshot_json(text: &str) -> PyResult<StreamClassifier> {
        let snap = ModelSnapshot::from_json(text).map_err(value_err)?;
        let model = snap.restore().map_err(value_err)?;
        Ok(StreamClassifier {
            model,
            schema: snap.schema,
        })
    }
}

#[pymodule]
fn afdm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<StreamClassifier>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(kfold_compare, m)?)?;
    m.add_function(wrap_pyfunction!(kfold_table, m)?)?;
    m.add_function(wrap_pyfunction!(prequential, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
