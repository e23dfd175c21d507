//! Greedy gain-ratio decision tree: categorical attributes split multiway,
//! numeric attributes split on midpoints between consecutive distinct sorted
//! values. Determinism comes from sorted thresholds and fixed tie rules
//! (higher gain ratio wins; ties go to the lower attribute index, then the
//! lower threshold), so training is invariant to row order. No pruning;
//! min_leaf is the smallest node size still eligible for splitting.

use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::data::{
    AttrKind, ClassLabel, DatasetSchema, FeatureVector, LabeledDataset,
};
use crate::learner::{check_instance, ClassDistribution, LearnerError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchTreeParams {
    /// Minimum instances a node needs before a split is considered.
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

impl Default for BatchTreeParams {
    fn default() -> Self {
        BatchTreeParams {
            min_leaf: 2,
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum TreeNode {
    Leaf {
        counts: [u64; 2],
    },
    CatSplit {
        attr: usize,
        children: Vec<TreeNode>,
    },
    NumSplit {
        attr: usize,
        threshold: f64,
        below: Box<TreeNode>,
        above: Box<TreeNode>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchTreeModel {
    schema: DatasetSchema,
    params: BatchTreeParams,
    root: TreeNode,
}

#[derive(Debug, Clone, Copy)]
struct Split {
    attr: usize,
    ratio: f64,
    threshold: Option<f64>,
}

pub fn tree_train(ds: &LabeledDataset, params: BatchTreeParams) -> Result<BatchTreeModel, TrainError> {
    if ds.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let rows: Vec<&FeatureVector> = ds.rows().iter().collect();
    let root = grow(&rows, ds.schema(), &params, 0);
    Ok(BatchTreeModel {
        schema: ds.schema().clone(),
        params,
        root,
    })
}

fn class_counts(rows: &[&FeatureVector]) -> [u64; 2] {
    let mut counts = [0u64; 2];
    for row in rows {
        counts[row.label.unwrap().index()] += 1;
    }
    counts
}

fn grow(
    rows: &[&FeatureVector],
    schema: &DatasetSchema,
    params: &BatchTreeParams,
    depth: usize,
) -> TreeNode {
    let counts = class_counts(rows);
    let pure = counts[0] == 0 || counts[1] == 0;
    let depth_capped = params.max_depth.is_some_and(|cap| depth >= cap);
    if pure || rows.len() < params.min_leaf || depth_capped {
        return TreeNode::Leaf { counts };
    }
    let Some(split) = best_split(rows, schema) else {
        return TreeNode::Leaf { counts };
    };
    match split.threshold {
        None => {
            let cardinality = schema.cardinality(split.attr).expect("categorical split");
            let mut groups: Vec<Vec<&FeatureVector>> = vec![Vec::new(); cardinality];
            for row in rows {
                let v = row.values[split.attr].as_cat().expect("conforming row");
                groups[v].push(row);
            }
            let children = groups
                .into_iter()
                .map(|group| {
                    if group.is_empty() {
                        // unseen branch predicts the parent distribution
                        TreeNode::Leaf { counts }
                    } else {
                        grow(&group, schema, params, depth + 1)
                    }
                })
                .collect();
            TreeNode::CatSplit {
                attr: split.attr,
                children,
            }
        }
        Some(threshold) => {
            let (below, above): (Vec<&FeatureVector>, Vec<&FeatureVector>) = rows
                .iter()
                .partition(|row| row.values[split.attr].as_num().expect("conforming row") <= threshold);
            TreeNode::NumSplit {
                attr: split.attr,
                threshold,
                below: Box::new(grow(&below, schema, params, depth + 1)),
                above: Box::new(grow(&above, schema, params, depth + 1)),
            }
        }
    }
}

/// The highest-gain-ratio split that produces at least two non-empty
/// children; None when no attribute can partition the rows.
fn best_split(rows: &[&FeatureVector], schema: &DatasetSchema) -> Option<Split> {
    let parent = entropy(class_counts(rows));
    let total = rows.len() as f64;
    let mut best: Option<Split> = None;

    for (attr, attribute) in schema.attributes().iter().enumerate() {
        let candidate = match &attribute.kind {
            AttrKind::Categorical { values } => {
                let mut groups = vec![[0u64; 2]; values.len()];
                for row in rows {
                    let v = row.values[attr].as_cat().expect("conforming row");
                    groups[v][row.label.unwrap().index()] += 1;
                }
                let non_empty = groups.iter().filter(|g| g[0] + g[1] > 0).count();
                if non_empty < 2 {
                    None
                } else {
                    let mut weighted = 0.0;
                    let mut split_info = 0.0;
                    for g in &groups {
                        let n = (g[0] + g[1]) as f64;
                        if n > 0.0 {
                            weighted += n / total * entropy(*g);
                            split_info -= n / total * (n / total).log2();
                        }
                    }
                    Some(Split {
                        attr,
                        ratio: (parent - weighted) / split_info,
                        threshold: None,
                    })
                }
            }
            AttrKind::Numeric => best_numeric_split(rows, attr, parent, total),
        };
        if let Some(c) = candidate {
            // strict improvement keeps the lowest attribute index on ties
            if best.is_none() || c.ratio > best.unwrap().ratio {
                best = Some(c);
            }
        }
    }
    best
}

/// Best binary threshold for one numeric attribute: midpoints between
/// consecutive distinct sorted values, ties resolved toward the lower
/// threshold.
fn best_numeric_split(
    rows: &[&FeatureVector],
    attr: usize,
    parent: f64,
    total: f64,
) -> Option<Split> {
    let mut values: Vec<(f64, usize)> = rows
        .iter()
        .map(|row| {
            (
                row.values[attr].as_num().expect("conforming row"),
                row.label.unwrap().index(),
            )
        })
        .collect();
    values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let all_counts = class_counts(rows);
    let mut below = [0u64; 2];
    let mut best: Option<Split> = None;
    for i in 0..values.len() - 1 {
        below[values[i].1] += 1;
        if values[i].0 == values[i + 1].0 {
            continue;
        }
        let threshold = (values[i].0 + values[i + 1].0) / 2.0;
        let above = [all_counts[0] - below[0], all_counts[1] - below[1]];
        let n_below = (below[0] + below[1]) as f64;
        let n_above = (above[0] + above[1]) as f64;
        let gain = parent - n_below / total * entropy(below) - n_above / total * entropy(above);
        let p = n_below / total;
        let split_info = -(p * p.log2() + (1.0 - p) * (1.0 - p).log2());
        let ratio = gain / split_info;
        if best.is_none() || ratio > best.unwrap().ratio {
            best = Some(Split {
                attr,
                ratio,
                threshold: Some(threshold),
            });
        }
    }
    best
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

impl BatchTreeModel {
    pub fn params(&self) -> BatchTreeParams {
        self.params
    }

    pub fn depth(&self) -> usize {
        fn walk(node: &TreeNode) -> usize {
            match node {
                TreeNode::Leaf { .. } => 0,
                TreeNode::CatSplit { children, .. } => {
                    1 + children.iter().map(walk).max().unwrap_or(0)
                }
                TreeNode::NumSplit { below, above, .. } => 1 + walk(below).max(walk(above)),
            }
        }
        walk(&self.root)
    }

    pub fn predict_proba(&self, x: &FeatureVector) -> Result<ClassDistribution, LearnerError> {
        check_instance(&self.schema, x, false)?;
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { counts } => {
                    let n = (counts[0] + counts[1]) as f64;
                    return Ok(ClassDistribution::new(
                        (counts[0] as f64 + 1.0) / (n + 2.0),
                        (counts[1] as f64 + 1.0) / (n + 2.0),
                    ));
                }
                TreeNode::CatSplit { attr, children } => {
                    let v = x.values[*attr].as_cat().expect("conforming row");
                    node = &children[v];
                }
                TreeNode::NumSplit {
                    attr,
                    threshold,
                    below,
                    above,
                } => {
                    let v = x.values[*attr].as_num().expect("conforming row");
                    node = if v <= *threshold { below } else { above };
                }
            }
        }
    }

    pub fn classify(&self, x: &FeatureVector) -> Result<ClassLabel, LearnerError> {
        Ok(self.predict_proba(x)?.classify())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Attribute, FeatureValue};

    fn dataset(schema: DatasetSchema, rows: Vec<FeatureVector>) -> LabeledDataset {
        LabeledDataset::new(schema, rows).unwrap()
    }

    fn binary_schema() -> DatasetSchema {
        DatasetSchema::new(
            vec![
                Attribute::categorical("a", &["0", "1"]),
                Attribute::categorical("b", &["0", "1"]),
            ],
            "class",
        )
        .unwrap()
    }

    fn cat2(a: usize, b: usize, label: ClassLabel) -> FeatureVector {
        FeatureVector::new(vec![FeatureValue::Cat(a), FeatureValue::Cat(b)], Some(label))
    }

    #[test]
    fn single_separating_attribute_gives_depth_one_perfect_tree() {
        let schema = DatasetSchema::new(
            vec![Attribute::categorical("t", &["X", "Y"])],
            "class",
        )
        .unwrap();
        let rows: Vec<FeatureVector> = (0..20)
            .map(|i| {
                let v = i % 2;
                FeatureVector::new(
                    vec![FeatureValue::Cat(v)],
                    Some(if v == 0 { ClassLabel::Fraud } else { ClassLabel::Legal }),
                )
            })
            .collect();
        let ds = dataset(schema, rows);
        let model = tree_train(&ds, BatchTreeParams::default()).unwrap();
        assert_eq!(model.depth(), 1);
        for row in ds.rows() {
            assert_eq!(model.classify(row).unwrap(), row.label.unwrap());
        }
    }

    #[test]
    fn pure_dataset_is_a_single_leaf() {
        let schema = binary_schema();
        let rows = vec![
            cat2(0, 0, ClassLabel::Legal),
            cat2(1, 0, ClassLabel::Legal),
            cat2(0, 1, ClassLabel::Legal),
        ];
        let model = tree_train(&dataset(schema, rows), BatchTreeParams::default()).unwrap();
        assert_eq!(model.depth(), 0);
    }

    #[test]
    fn xor_trains_to_depth_two_with_perfect_accuracy() {
        let schema = binary_schema();
        let rows = vec![
            cat2(0, 0, ClassLabel::Legal),
            cat2(0, 1, ClassLabel::Fraud),
            cat2(1, 0, ClassLabel::Fraud),
            cat2(1, 1, ClassLabel::Legal),
        ];
        let ds = dataset(schema, rows);
        let model = tree_train(&ds, BatchTreeParams::default()).unwrap();
        assert_eq!(model.depth(), 2);
        for row in ds.rows() {
            assert_eq!(model.classify(row).unwrap(), row.label.unwrap());
        }
    }

    #[test]
    fn numeric_threshold_lands_between_the_classes() {
        let schema = DatasetSchema::new(vec![Attribute::numeric("x")], "class").unwrap();
        let rows: Vec<FeatureVector> = (0..10)
            .map(|i| {
                let v = i as f64;
                FeatureVector::new(
                    vec![FeatureValue::Num(v)],
                    Some(if v < 5.0 { ClassLabel::Legal } else { ClassLabel::Fraud }),
                )
            })
            .collect();
        let ds = dataset(schema, rows);
        let model = tree_train(&ds, BatchTreeParams::default()).unwrap();
        assert_eq!(model.depth(), 1);
        match &model.root {
            TreeNode::NumSplit { threshold, .. } => assert_eq!(*threshold, 4.5),
            other => panic!("expected numeric split, got {other:?}"),
        }
    }

    #[test]
    fn training_is_invariant_to_row_order() {
        let schema = DatasetSchema::new(
            vec![Attribute::numeric("x"), Attribute::numeric("y")],
            "class",
        )
        .unwrap();
        let mut rows: Vec<FeatureVector> = (0..40)
            .map(|i| {
                let x = (i % 10) as f64;
                let y = (i / 10) as f64;
                let label = if x + y > 6.0 { ClassLabel::Fraud } else { ClassLabel::Legal };
                FeatureVector::new(
                    vec![FeatureValue::Num(x), FeatureValue::Num(y)],
                    Some(label),
                )
            })
            .collect();
        let a = tree_train(
            &dataset(schema.clone(), rows.clone()),
            BatchTreeParams::default(),
        )
        .unwrap();
        rows.reverse();
        rows.swap(3, 17);
        let b = tree_train(&dataset(schema, rows), BatchTreeParams::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn leaf_smoothing_matches_the_example() {
        // leaf (Fraud 3, Legal 1) -> (4/6, 2/6)
        let model = BatchTreeModel {
            schema: DatasetSchema::new(vec![Attribute::numeric("x")], "class").unwrap(),
            params: BatchTreeParams::default(),
            root: TreeNode::Leaf { counts: [3, 1] },
        };
        let d = model
            .predict_proba(&FeatureVector::new(vec![FeatureValue::Num(0.0)], None))
            .unwrap();
        assert!((d.p_fraud - 4.0 / 6.0).abs() < 1e-12);
        assert!((d.p_legal - 2.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let schema = DatasetSchema::new(vec![Attribute::numeric("x")], "class").unwrap();
        let ds = LabeledDataset::new(schema, vec![]).unwrap();
        assert_eq!(
            tree_train(&ds, BatchTreeParams::default()).unwrap_err(),
            TrainError::EmptyDataset
        );
    }

    #[test]
    fn max_depth_caps_growth() {
        let schema = binary_schema();
        let rows = vec![
            cat2(0, 0, ClassLabel::Legal),
            cat2(0, 1, ClassLabel::Fraud),
            cat2(1, 0, ClassLabel::Fraud),
            cat2(1, 1, ClassLabel::Legal),
        ];
        let params = BatchTreeParams {
            max_depth: Some(1),
            ..BatchTreeParams::default()
        };
        let model = tree_train(&dataset(schema, rows), params).unwrap();
        assert!(model.depth() <= 1);
    }
}
