//! Incremental decision tree in the VFDT style: leaves accumulate split
//! statistics and grow into internal nodes once the Hoeffding bound certifies
//! that the best attribute would win over the runner-up on the full stream.
//!
//! Numeric attributes are summarized by equal-width histograms. A leaf
//! buffers raw numeric values until its first split check, freezes its bin
//! edges over the min/max observed by then, and histograms the buffer, so
//! the statistics stay consistent with one fixed binning. Leaves predict the
//! Laplace-smoothed majority class; there is no pruning and no leaf-level
//! Naive Bayes, which keeps this learner distinct from the NB module in the
//! comparison table.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{AttrKind, DatasetSchema, FeatureValue, FeatureVector};
use crate::learner::{check_instance, ClassDistribution, IncrementalLearner, LearnerError};

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("range must be positive, got {0}")]
    BadRange(f64),
    #[error("delta must lie in (0, 1], got {0}")]
    BadDelta(f64),
    #[error("n must be at least 1")]
    BadN,
}

/// The Hoeffding bound: with confidence 1 - delta, the observed mean of n
/// samples of a variable with range R is within this epsilon of the true
/// mean. Monotonically decreasing in n.
pub fn hoeffding_bound(range: f64, delta: f64, n: u64) -> Result<f64, BoundError> {
    if range <= 0.0 || !range.is_finite() || range.is_nan() {
        return Err(BoundError::BadRange(range));
    }
    if delta.is_nan() || delta <= 0.0 || delta > 1.0 {
        return Err(BoundError::BadDelta(delta));
    }
    if n < 1 {
        return Err(BoundError::BadN);
    }
    Ok((range * range * (1.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HtParams {
    /// Split confidence delta.
    pub delta: f64,
    /// Instances a leaf absorbs between split checks.
    pub grace_period: u64,
    /// Tie threshold: split anyway once epsilon falls below this.
    pub tie_tau: f64,
    /// Bins per numeric attribute.
    pub n_bins: usize,
}

impl Default for HtParams {
    fn default() -> Self {
        HtParams {
            delta: 1e-7,
            grace_period: 200,
            tie_tau: 0.05,
            n_bins: 10,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum HtParamError {
    #[error("delta must lie in (0, 1)")]
    BadDelta,
    #[error("grace_period must be at least 1")]
    BadGrace,
    #[error("tie_tau must be non-negative")]
    BadTau,
    #[error("n_bins must be at least 2")]
    BadBins,
}

impl HtParams {
    pub fn validate(&self) -> Result<(), HtParamError> {
        if self.delta.is_nan() || self.delta <= 0.0 || self.delta >= 1.0 {
            return Err(HtParamError::BadDelta);
        }
        if self.grace_period < 1 {
            return Err(HtParamError::BadGrace);
        }
        if self.tie_tau < 0.0 || self.tie_tau.is_nan() {
            return Err(HtParamError::BadTau);
        }
        if self.n_bins < 2 {
            return Err(HtParamError::BadBins);
        }
        Ok(())
    }
}

/// Histogram state for one numeric attribute at one leaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct NumStats {
    min: f64,
    max: f64,
    seen: u64,
    /// Frozen equal-width bin edges (n_bins + 1 entries) or None pre-freeze.
    edges: Option<Vec<f64>>,
    /// Per-bin class counts once frozen.
    bins: Vec<[u64; 2]>,
    /// Raw (value, class) pairs awaiting the first split check; at most
    /// grace_period entries, dropped at freeze time.
    buffer: Vec<(f64, usize)>,
}

impl NumStats {
    fn new() -> NumStats {
        NumStats {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            seen: 0,
            edges: None,
            bins: Vec::new(),
            buffer: Vec::new(),
        }
    }

    fn add(&mut self, v: f64, class: usize) {
        self.seen += 1;
        self.min = self.min.min(v);
        self.max = self.max.max(v);
        match &self.edges {
            Some(edges) => {
                let bin = bin_index(edges, v);
                self.bins[bin][class] += 1;
            }
            None => self.buffer.push((v, class)),
        }
    }

    fn freeze(&mut self, n_bins: usize) {
        if self.edges.is_some() {
            return;
        }
        let (lo, hi) = if self.seen == 0 {
            (0.0, 1.0)
        } else if self.min == self.max {
            (self.min - 0.5, self.max + 0.5)
        } else {
            (self.min, self.max)
        };
        let width = (hi - lo) / n_bins as f64;
        let edges: Vec<f64> = (0..=n_bins).map(|i| lo + width * i as f64).collect();
        self.bins = vec![[0; 2]; n_bins];
        for (v, class) in std::mem::take(&mut self.buffer) {
            let bin = bin_index(&edges, v);
            self.bins[bin][class] += 1;
        }
        self.edges = Some(edges);
    }
}

fn bin_index(edges: &[f64], v: f64) -> usize {
    let n_bins = edges.len() - 1;
    let lo = edges[0];
    let hi = edges[n_bins];
    if v <= lo {
        return 0;
    }
    if v >= hi {
        return n_bins - 1;
    }
    let width = (hi - lo) / n_bins as f64;
    (((v - lo) / width) as usize).min(n_bins - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum LeafAttr {
    /// value -> per-class counts.
    Cat { counts: Vec<[u64; 2]> },
    Num(NumStats),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Leaf {
    class_counts: [u64; 2],
    since_check: u64,
    attrs: Vec<LeafAttr>,
}

impl Leaf {
    fn new(schema: &DatasetSchema) -> Leaf {
        let attrs = schema
            .attributes()
            .iter()
            .map(|a| match &a.kind {
                AttrKind::Categorical { values } => LeafAttr::Cat {
                    counts: vec![[0; 2]; values.len()],
                },
                AttrKind::Numeric => LeafAttr::Num(NumStats::new()),
            })
            .collect();
        Leaf {
            class_counts: [0; 2],
            since_check: 0,
            attrs,
        }
    }

    fn total(&self) -> u64 {
        self.class_counts[0] + self.class_counts[1]
    }

    fn is_impure(&self) -> bool {
        self.class_counts[0] > 0 && self.class_counts[1] > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Node {
    Leaf(Leaf),
    CatSplit {
        attr: usize,
        children: Vec<Node>,
    },
    NumSplit {
        attr: usize,
        threshold: f64,
        below: Box<Node>,
        above: Box<Node>,
    },
}

/// A leaf's best split on one attribute.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    attr: usize,
    gain: f64,
    /// Some(threshold) for numeric, None for categorical multiway.
    threshold: Option<f64>,
}

/// The streaming Hoeffding-tree classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoeffdingTreeLearner {
    schema: DatasetSchema,
    params: HtParams,
    root: Node,
    instances: u64,
}

impl HoeffdingTreeLearner {
    pub fn new(schema: DatasetSchema, params: HtParams) -> HoeffdingTreeLearner {
        params.validate().expect("invalid Hoeffding tree parameters");
        let root = Node::Leaf(Leaf::new(&schema));
        HoeffdingTreeLearner {
            schema,
            params,
            root,
            instances: 0,
        }
    }

    pub fn with_defaults(schema: DatasetSchema) -> HoeffdingTreeLearner {
        HoeffdingTreeLearner::new(schema, HtParams::default())
    }

    pub fn params(&self) -> HtParams {
        self.params
    }

    pub fn leaf_count(&self) -> usize {
        fn walk(node: &Node) -> usize {
            match node {
                Node::Leaf(_) => 1,
                Node::CatSplit { children, .. } => children.iter().map(walk).sum(),
                Node::NumSplit { below, above, .. } => walk(below) + walk(above),
            }
        }
        walk(&self.root)
    }

    pub fn node_count(&self) -> usize {
        fn walk(node: &Node) -> usize {
            match node {
                Node::Leaf(_) => 1,
                Node::CatSplit { children, .. } => 1 + children.iter().map(walk).sum::<usize>(),
                Node::NumSplit { below, above, .. } => 1 + walk(below) + walk(above),
            }
        }
        walk(&self.root)
    }

    pub fn depth(&self) -> usize {
        fn walk(node: &Node) -> usize {
            match node {
                Node::Leaf(_) => 0,
                Node::CatSplit { children, .. } => 1 + children.iter().map(walk).max().unwrap_or(0),
                Node::NumSplit { below, above, .. } => 1 + walk(below).max(walk(above)),
            }
        }
        walk(&self.root)
    }

    /// Attribute index of the root split, if the root has split.
    pub fn root_split_attr(&self) -> Option<usize> {
        match &self.root {
            Node::Leaf(_) => None,
            Node::CatSplit { attr, .. } | Node::NumSplit { attr, .. } => Some(*attr),
        }
    }

    /// Count of stored statistic cells across the tree; memory is
    /// proportional to this, bounded by nodes x attributes x
    /// max(cardinality, n_bins, grace_period) plus a constant per node.
    pub fn stat_cells(&self) -> usize {
        fn leaf_cells(leaf: &Leaf) -> usize {
            let mut cells = 2;
            for attr in &leaf.attrs {
                cells += match attr {
                    LeafAttr::Cat { counts } => 2 * counts.len(),
                    LeafAttr::Num(ns) => {
                        4 + 2 * ns.bins.len()
                            + 2 * ns.buffer.len()
                            + ns.edges.as_ref().map_or(0, |e| e.len())
                    }
                };
            }
            cells
        }
        fn walk(node: &Node) -> usize {
            match node {
                Node::Leaf(leaf) => leaf_cells(leaf),
                Node::CatSplit { children, .. } => 2 + children.iter().map(walk).sum::<usize>(),
                Node::NumSplit { below, above, .. } => 3 + walk(below) + walk(above),
            }
        }
        walk(&self.root)
    }

    fn route<'a>(&'a self, x: &FeatureVector) -> &'a Leaf {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf(leaf) => return leaf,
                Node::CatSplit { attr, children } => {
                    let v = x.values[*attr].as_cat().expect("schema conformance");
                    node = &children[v];
                }
                Node::NumSplit {
                    attr,
                    threshold,
                    below,
                    above,
                } => {
                    let v = x.values[*attr].as_num().expect("schema conformance");
                    node = if v <= *threshold { below } else { above };
                }
            }
        }
    }

    /// The node slot this instance routes into (always a leaf slot).
    fn route_slot<'a>(root: &'a mut Node, x: &FeatureVector) -> &'a mut Node {
        let mut node = root;
        loop {
            if matches!(node, Node::Leaf(_)) {
                return node;
            }
            node = match node {
                Node::Leaf(_) => unreachable!(),
                Node::CatSplit { attr, children } => {
                    let v = x.values[*attr].as_cat().expect("schema conformance");
                    &mut children[v]
                }
                Node::NumSplit {
                    attr,
                    threshold,
                    below,
                    above,
                } => {
                    let v = x.values[*attr].as_num().expect("schema conformance");
                    if v <= *threshold {
                        below
                    } else {
                        above
                    }
                }
            };
        }
    }

    /// Split check for a leaf that has absorbed one grace period. Freezes
    /// numeric bin edges first, then compares the two best attribute gains
    /// against the Hoeffding bound at the leaf's instance count.
    fn try_split(leaf: &mut Leaf, schema: &DatasetSchema, params: &HtParams) -> Option<Node> {
        for attr in &mut leaf.attrs {
            if let LeafAttr::Num(ns) = attr {
                ns.freeze(params.n_bins);
            }
        }
        let candidates = best_candidates(leaf);
        let best = candidates.first().copied()?;
        if best.gain <= 0.0 {
            return None;
        }
        let second_gain = candidates.get(1).map_or(0.0, |c| c.gain);
        // R = log2(#classes) = 1 for information gain over two classes
        let epsilon = hoeffding_bound(1.0, params.delta, leaf.total()).expect("validated params");
        if best.gain - second_gain > epsilon || epsilon < params.tie_tau {
            Some(make_split(schema, best))
        } else {
            None
        }
    }
}

/// Per-attribute best split gains, sorted descending; gain ties keep
/// attribute order so the outcome is deterministic.
fn best_candidates(leaf: &Leaf) -> Vec<Candidate> {
    let parent_entropy = entropy(leaf.class_counts);
    let total = leaf.total() as f64;
    let mut out = Vec::with_capacity(leaf.attrs.len());
    for (attr, stats) in leaf.attrs.iter().enumerate() {
        match stats {
            LeafAttr::Cat { counts } => {
                let mut weighted = 0.0;
                for vc in counts {
                    let n = (vc[0] + vc[1]) as f64;
                    if n > 0.0 {
                        weighted += n / total * entropy(*vc);
                    }
                }
                out.push(Candidate {
                    attr,
                    gain: parent_entropy - weighted,
                    threshold: None,
                });
            }
            LeafAttr::Num(ns) => {
                let Some(edges) = &ns.edges else { continue };
                let mut best_gain = 0.0;
                let mut best_threshold = None;
                let mut below = [0u64; 2];
                for (i, bin) in ns.bins.iter().enumerate().take(ns.bins.len() - 1) {
                    below[0] += bin[0];
                    below[1] += bin[1];
                    let above = [
                        leaf.class_counts[0] - below[0],
                        leaf.class_counts[1] - below[1],
                    ];
                    let n_below = (below[0] + below[1]) as f64;
                    let n_above = (above[0] + above[1]) as f64;
                    if n_below == 0.0 || n_above == 0.0 {
                        continue;
                    }
                    let gain = parent_entropy
                        - n_below / total * entropy(below)
                        - n_above / total * entropy(above);
                    if gain > best_gain {
                        best_gain = gain;
                        best_threshold = Some(edges[i + 1]);
                    }
                }
                if let Some(threshold) = best_threshold {
                    out.push(Candidate {
                        attr,
                        gain: best_gain,
                        threshold: Some(threshold),
                    });
                }
            }
        }
    }
    out.sort_by(|a, b| b.gain.partial_cmp(&a.gain).unwrap().then(a.attr.cmp(&b.attr)));
    out
}

fn make_split(schema: &DatasetSchema, best: Candidate) -> Node {
    match best.threshold {
        None => {
            let cardinality = schema
                .cardinality(best.attr)
                .expect("categorical candidate on categorical attribute");
            Node::CatSplit {
                attr: best.attr,
                children: (0..cardinality)
                    .map(|_| Node::Leaf(Leaf::new(schema)))
                    .collect(),
            }
        }
        Some(threshold) => Node::NumSplit {
            attr: best.attr,
            threshold,
            below: Box::new(Node::Leaf(Leaf::new(schema))),
            above: Box::new(Node::Leaf(Leaf::new(schema))),
        },
    }
}

fn entropy(counts: [u64; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for c in counts {
        if c > 0 {
            let p = c as f64 / n;
            h -= p * p.log2();
        }
    }
    h
}

impl IncrementalLearner for HoeffdingTreeLearner {
    fn schema(&self) -> &DatasetSchema {
        &self.schema
    }

    fn predict_proba(&self, x: &FeatureVector) -> Result<ClassDistribution, LearnerError> {
        check_instance(&self.schema, x, false)?;
        let leaf = self.route(x);
        let n = leaf.total() as f64;
        // Laplace-smoothed leaf distribution, alpha = 1
        Ok(ClassDistribution::new(
            (leaf.class_counts[0] as f64 + 1.0) / (n + 2.0),
            (leaf.class_counts[1] as f64 + 1.0) / (n + 2.0),
        ))
    }

    fn update(&mut self, x: &FeatureVector) -> Result<(), LearnerError> {
        check_instance(&self.schema, x, true)?;
        let class = x.label.unwrap().index();
        self.instances += 1;

        let slot = Self::route_slot(&mut self.root, x);
        let Node::Leaf(leaf) = slot else { unreachable!() };
        leaf.class_counts[class] += 1;
        leaf.since_check += 1;
        for (stats, value) in leaf.attrs.iter_mut().zip(&x.values) {
            match (stats, value) {
                (LeafAttr::Cat { counts }, FeatureValue::Cat(v)) => counts[*v][class] += 1,
                (LeafAttr::Num(ns), FeatureValue::Num(v)) => ns.add(*v, class),
                _ => unreachable!("conformance checked before updating"),
            }
        }

        if leaf.since_check >= self.params.grace_period {
            leaf.since_check = 0;
            if leaf.is_impure() {
                if let Some(split) = Self::try_split(leaf, &self.schema, &self.params) {
                    *slot = split;
                }
            }
        }
        Ok(())
    }

    fn instances_seen(&self) -> u64 {
        self.instances
    }

    fn reset(&mut self) {
        self.root = Node::Leaf(Leaf::new(&self.schema));
        self.instances = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, ClassLabel};
    use crate::rng::rng_from_seed;
    use rand::RngExt;

    fn type_only_schema() -> DatasetSchema {
        DatasetSchema::new(
            vec![Attribute::categorical(
                "type",
                &["CASH_IN", "CASH_OUT", "DEBIT", "PAYMENT", "TRANSFER"],
            )],
            "class",
        )
        .unwrap()
    }

    fn cat_row(v: usize, label: ClassLabel) -> FeatureVector {
        FeatureVector::new(vec![FeatureValue::Cat(v)], Some(label))
    }

    #[test]
    fn bound_is_zero_at_delta_one() {
        assert_eq!(hoeffding_bound(1.0, 1.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn bound_matches_direct_evaluation() {
        // sqrt(ln(1e7) / 2000)
        let eps = hoeffding_bound(1.0, 1e-7, 1000).unwrap();
        assert!((eps - 0.089772).abs() < 1e-6);
    }

    #[test]
    fn bound_halves_when_n_quadruples() {
        let e1 = hoeffding_bound(1.0, 1e-7, 1000).unwrap();
        let e4 = hoeffding_bound(1.0, 1e-7, 4000).unwrap();
        assert_eq!(e4, e1 / 2.0);
    }

    #[test]
    fn bound_rejects_domain_violations() {
        assert_eq!(hoeffding_bound(0.0, 0.5, 10).unwrap_err(), BoundError::BadRange(0.0));
        assert_eq!(hoeffding_bound(1.0, 0.0, 10).unwrap_err(), BoundError::BadDelta(0.0));
        assert_eq!(hoeffding_bound(1.0, 1.5, 10).unwrap_err(), BoundError::BadDelta(1.5));
        assert_eq!(hoeffding_bound(1.0, 0.5, 0).unwrap_err(), BoundError::BadN);
    }

    #[test]
    fn separable_stream_splits_the_root_and_classifies_perfectly() {
        let schema = type_only_schema();
        let mut tree = HoeffdingTreeLearner::with_defaults(schema.clone());
        let mut rng = rng_from_seed(5);
        let mut rows = Vec::new();
        for _ in 0..10_000 {
            let v = rng.random_range(0..5usize);
            let label = if v == 4 { ClassLabel::Fraud } else { ClassLabel::Legal };
            rows.push(cat_row(v, label));
        }
        let mut split_at = None;
        for (i, row) in rows.iter().enumerate() {
            tree.update(row).unwrap();
            if split_at.is_none() && tree.root_split_attr().is_some() {
                split_at = Some(i + 1);
            }
        }
        assert_eq!(tree.root_split_attr(), Some(0));
        assert!(
            split_at.unwrap() <= 2 * tree.params().grace_period as usize,
            "split came at {split_at:?}"
        );
        let correct = rows
            .iter()
            .filter(|r| tree.classify(r).unwrap() == r.label.unwrap())
            .count();
        assert_eq!(correct, rows.len());
    }

    #[test]
    fn pure_leaf_never_splits() {
        let mut tree = HoeffdingTreeLearner::with_defaults(type_only_schema());
        for _ in 0..5_000 {
            tree.update(&cat_row(2, ClassLabel::Legal)).unwrap();
        }
        assert_eq!(tree.root_split_attr(), None);
        assert_eq!(tree.leaf_count(), 1);
    }

    #[test]
    fn huge_grace_period_keeps_a_single_majority_leaf() {
        let params = HtParams {
            grace_period: 1_000_000_000,
            ..HtParams::default()
        };
        let mut tree = HoeffdingTreeLearner::new(type_only_schema(), params);
        for i in 0..3_000u64 {
            let label = if i % 10 == 0 { ClassLabel::Fraud } else { ClassLabel::Legal };
            tree.update(&cat_row((i % 5) as usize, label)).unwrap();
        }
        assert_eq!(tree.leaf_count(), 1);
        let d = tree.predict_proba(&cat_row(0, ClassLabel::Legal)).unwrap();
        assert!((d.p_fraud - 301.0 / 3002.0).abs() < 1e-12);
    }

    #[test]
    fn empty_tree_predicts_uniform() {
        let tree = HoeffdingTreeLearner::with_defaults(type_only_schema());
        let d = tree
            .predict_proba(&FeatureVector::new(vec![FeatureValue::Cat(0)], None))
            .unwrap();
        assert_eq!(d, ClassDistribution::uniform());
    }

    #[test]
    fn leaf_counts_follow_the_smoothing_example() {
        let mut tree = HoeffdingTreeLearner::with_defaults(type_only_schema());
        for _ in 0..9 {
            tree.update(&cat_row(1, ClassLabel::Fraud)).unwrap();
        }
        tree.update(&cat_row(1, ClassLabel::Legal)).unwrap();
        let d = tree.predict_proba(&cat_row(1, ClassLabel::Fraud)).unwrap();
        assert!((d.p_fraud - 10.0 / 12.0).abs() < 1e-12);
        assert!((d.p_legal - 2.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn prediction_does_not_mutate_state() {
        let mut tree = HoeffdingTreeLearner::with_defaults(type_only_schema());
        tree.update(&cat_row(0, ClassLabel::Fraud)).unwrap();
        let before = tree.clone();
        let _ = tree.predict_proba(&cat_row(3, ClassLabel::Legal)).unwrap();
        assert_eq!(tree, before);
    }

    #[test]
    fn numeric_split_learns_a_threshold() {
        let schema = DatasetSchema::new(vec![Attribute::numeric("amount")], "class").unwrap();
        let mut tree = HoeffdingTreeLearner::with_defaults(schema);
        let mut rng = rng_from_seed(11);
        let mut rows = Vec::new();
        for _ in 0..5_000 {
            let fraud: bool = rng.random_bool(0.4);
            let v = if fraud {
                800.0 + rng.random::<f64>() * 100.0
            } else {
                rng.random::<f64>() * 100.0
            };
            rows.push(FeatureVector::new(
                vec![FeatureValue::Num(v)],
                Some(if fraud { ClassLabel::Fraud } else { ClassLabel::Legal }),
            ));
        }
        for row in &rows {
            tree.update(row).unwrap();
        }
        assert_eq!(tree.root_split_attr(), Some(0));
        let correct = rows
            .iter()
            .filter(|r| tree.classify(r).unwrap() == r.label.unwrap())
            .count();
        assert_eq!(correct, rows.len());
    }

    #[test]
    fn tree_growth_is_monotone_and_memory_stays_bounded() {
        let schema = DatasetSchema::new(
            vec![
                Attribute::categorical("type", &["A", "B", "C"]),
                Attribute::numeric("x"),
                Attribute::numeric("y"),
            ],
            "class",
        )
        .unwrap();
        let mut tree = HoeffdingTreeLearner::with_defaults(schema.clone());
        let mut rng = rng_from_seed(3);
        let mut last_nodes = 0;
        let mut last_depth = 0;
        for i in 0..30_000 {
            let t = rng.random_range(0..3usize);
            let x: f64 = rng.random::<f64>() * 10.0;
            let y: f64 = rng.random::<f64>() * 10.0;
            // noisy concept over two attributes
            let fraud = (t == 0 && x > 5.0) || (t != 0 && y > 7.0) || rng.random_bool(0.05);
            let row = FeatureVector::new(
                vec![FeatureValue::Cat(t), FeatureValue::Num(x), FeatureValue::Num(y)],
                Some(if fraud { ClassLabel::Fraud } else { ClassLabel::Legal }),
            );
            tree.update(&row).unwrap();
            if i % 5_000 == 0 {
                let nodes = tree.node_count();
                let depth = tree.depth();
                assert!(nodes >= last_nodes, "node count shrank");
                assert!(depth >= last_depth, "depth shrank");
                last_nodes = nodes;
                last_depth = depth;
            }
        }
        assert!(tree.leaf_count() > 1, "expected growth on an impure stream");
        let params = tree.params();
        let per_attr = 3usize.max(params.n_bins).max(params.grace_period as usize);
        let bound = tree.node_count() * (2 + schema.arity() * (2 * per_attr + 12));
        assert!(
            tree.stat_cells() <= bound,
            "stat cells {} exceed bound {bound}",
            tree.stat_cells()
        );
    }

    #[test]
    fn near_one_delta_with_large_tau_splits_at_first_check() {
        let params = HtParams {
            delta: 1.0 - 1e-12,
            tie_tau: 10.0,
            grace_period: 50,
            ..HtParams::default()
        };
        let mut tree = HoeffdingTreeLearner::new(type_only_schema(), params);
        // impure but informative: value 0 mostly fraud, others legal
        let mut rng = rng_from_seed(9);
        for i in 0..50usize {
            let v = i % 5;
            let label = if v == 0 && rng.random_bool(0.9) {
                ClassLabel::Fraud
            } else {
                ClassLabel::Legal
            };
            tree.update(&cat_row(v, label)).unwrap();
        }
        assert!(tree.root_split_attr().is_some(), "no split at first check");
    }
}
