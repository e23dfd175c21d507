use serde::{Deserialize, Serialize};

use super::metrics::{cost, ConfusionMatrix, CostParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Protocol {
    KFold { k: usize, seed: u64 },
    Prequential { report_every: u64 },
}

/// All metrics for one classifier under one protocol; the row type of the
/// comparison table.
///
/// Wall-clock and throughput are measured and shown in the text table and in
/// stream snapshots, but skipped by the JSON serializer so that rerunning a
/// pipeline with the same seeds yields byte-identical report files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub classifier: String,
    pub hyperparameters: serde_json::Value,
    pub protocol: Protocol,
    pub weights: CostParams,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    pub detection_rate: f64,
    pub precision: f64,
    pub f1: f64,
    pub rmse: f64,
    pub cost: f64,
    #[serde(skip)]
    pub wall_clock_secs: f64,
    #[serde(skip)]
    pub instances_per_sec: f64,
}

impl EvalReport {
    /// Derive every rate from the confusion matrix so the matrix stays the
    /// single source of truth.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        classifier: impl Into<String>,
        hyperparameters: serde_json::Value,
        protocol: Protocol,
        weights: CostParams,
        confusion: ConfusionMatrix,
        rmse: f64,
        wall_clock_secs: f64,
        instances_per_sec: f64,
    ) -> EvalReport {
        EvalReport {
            classifier: classifier.into(),
            hyperparameters,
            protocol,
            weights,
            accuracy: confusion.accuracy(),
            detection_rate: confusion.detection_rate(),
            precision: confusion.precision(),
            f1: confusion.f1(),
            rmse,
            cost: cost(&confusion, &weights),
            confusion,
            wall_clock_secs,
            instances_per_sec,
        }
    }

    pub fn instances(&self) -> u64 {
        self.confusion.total()
    }
}

/// Fixed-width text table for a set of reports, the human-readable side of
/// the comparison output.
pub fn render_table(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<10} {:>7} {:>7} {:>7} {:>7} {:>9} {:>10} {:>10} {:>8} {:>8} {:>10} {:>8} {:>12}\n",
        "classifier", "tp", "fp", "tn", "fn", "accuracy", "detection", "precision", "f1",
        "rmse", "cost", "wall_s", "inst/s"
    ));
    for r in reports {
        out.push_str(&format!(
            "{:<10} {:>7} {:>7} {:>7} {:>7} {:>9.4} {:>10.4} {:>10.4} {:>8.4} {:>8.4} {:>10.1} {:>8.2} {:>12.0}\n",
            r.classifier,
            r.confusion.tp,
            r.confusion.fp,
            r.confusion.tn,
            r.confusion.fn_,
            r.accuracy,
            r.detection_rate,
            r.precision,
            r.f1,
            r.rmse,
            r.cost,
            r.wall_clock_secs,
            r.instances_per_sec,
        ));
    }
    out
}
