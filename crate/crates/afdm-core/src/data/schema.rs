use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Binary class label. Fraud is the positive class everywhere in this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    Fraud,
    Legal,
}

impl ClassLabel {
    /// Dense index used by count tables: Fraud = 0, Legal = 1.
    pub fn index(self) -> usize {
        match self {
            ClassLabel::Fraud => 0,
            ClassLabel::Legal => 1,
        }
    }

    pub fn from_index(i: usize) -> ClassLabel {
        if i == 0 {
            ClassLabel::Fraud
        } else {
            ClassLabel::Legal
        }
    }

    pub const ALL: [ClassLabel; 2] = [ClassLabel::Fraud, ClassLabel::Legal];
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassLabel::Fraud => write!(f, "Fraud"),
            ClassLabel::Legal => write!(f, "Legal"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttrKind {
    Categorical { values: Vec<String> },
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub kind: AttrKind,
}

impl Attribute {
    pub fn categorical(name: &str, values: &[&str]) -> Attribute {
        Attribute {
            name: name.to_string(),
            kind: AttrKind::Categorical {
                values: values.iter().map(|v| v.to_string()).collect(),
            },
        }
    }

    pub fn numeric(name: &str) -> Attribute {
        Attribute {
            name: name.to_string(),
            kind: AttrKind::Numeric,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SchemaError {
    #[error("duplicate attribute name `{0}`")]
    DuplicateAttribute(String),
    #[error("categorical attribute `{0}` has an empty value set")]
    EmptyValueSet(String),
    #[error("class attribute name `{0}` collides with a feature attribute")]
    ClassNameCollision(String),
}

/// Ordered attribute list plus the (always binary Fraud/Legal) class attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSchema {
    attributes: Vec<Attribute>,
    class_name: String,
}

impl DatasetSchema {
    pub fn new(attributes: Vec<Attribute>, class_name: &str) -> Result<DatasetSchema, SchemaError> {
        let mut seen = std::collections::HashSet::new();
        for attr in &attributes {
            if !seen.insert(attr.name.as_str()) {
                return Err(SchemaError::DuplicateAttribute(attr.name.clone()));
            }
            if let AttrKind::Categorical { values } = &attr.kind {
                if values.is_empty() {
                    return Err(SchemaError::EmptyValueSet(attr.name.clone()));
                }
            }
        }
        if seen.contains(class_name) {
            return Err(SchemaError::ClassNameCollision(class_name.to_string()));
        }
        Ok(DatasetSchema {
            attributes,
            class_name: class_name.to_string(),
        })
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn class_name(&self) -> &str {
        &self.class_name
    }

    /// Indices of numeric attributes, in schema order.
    pub fn numeric_indices(&self) -> Vec<usize> {
        self.attributes
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a.kind, AttrKind::Numeric))
            .map(|(i, _)| i)
            .collect()
    }

    /// Cardinality of a categorical attribute, None for numerics.
    pub fn cardinality(&self, attr: usize) -> Option<usize> {
        match &self.attributes[attr].kind {
            AttrKind::Categorical { values } => Some(values.len()),
            AttrKind::Numeric => None,
        }
    }
}

/// One attribute value: a categorical value index or a numeric reading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureValue {
    Cat(usize),
    Num(f64),
}

impl FeatureValue {
    pub fn as_num(self) -> Option<f64> {
        match self {
            FeatureValue::Num(v) => Some(v),
            FeatureValue::Cat(_) => None,
        }
    }

    pub fn as_cat(self) -> Option<usize> {
        match self {
            FeatureValue::Cat(i) => Some(i),
            FeatureValue::Num(_) => None,
        }
    }
}

/// Schema-ordered attribute values with an optional class label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<FeatureValue>,
    pub label: Option<ClassLabel>,
}

impl FeatureVector {
    pub fn new(values: Vec<FeatureValue>, label: Option<ClassLabel>) -> FeatureVector {
        FeatureVector { values, label }
    }

    /// Arity match plus categorical indices within their value-set ranges and
    /// kind agreement per position.
    pub fn conforms(&self, schema: &DatasetSchema) -> bool {
        if self.values.len() != schema.arity() {
            return false;
        }
        self.values
            .iter()
            .zip(schema.attributes())
            .all(|(v, attr)| match (&attr.kind, v) {
                (AttrKind::Categorical { values }, FeatureValue::Cat(i)) => *i < values.len(),
                (AttrKind::Numeric, FeatureValue::Num(_)) => true,
                _ => false,
            })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DatasetError {
    #[error("row {0} does not conform to the schema")]
    NonConformingRow(usize),
    #[error("row {0} is missing its class label")]
    UnlabeledRow(usize),
}

/// A schema plus fully labeled rows; every row is validated on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    schema: DatasetSchema,
    rows: Vec<FeatureVector>,
}

impl LabeledDataset {
    pub fn new(schema: DatasetSchema, rows: Vec<FeatureVector>) -> Result<LabeledDataset, DatasetError> {
        for (i, row) in rows.iter().enumerate() {
            if row.label.is_none() {
                return Err(DatasetError::UnlabeledRow(i));
            }
            if !row.conforms(&schema) {
                return Err(DatasetError::NonConformingRow(i));
            }
        }
        Ok(LabeledDataset { schema, rows })
    }

    pub fn schema(&self) -> &DatasetSchema {
        &self.schema
    }

    pub fn rows(&self) -> &[FeatureVector] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<ClassLabel> {
        self.rows.iter().map(|r| r.label.unwrap()).collect()
    }

    pub fn class_count(&self, label: ClassLabel) -> usize {
        self.rows.iter().filter(|r| r.label == Some(label)).count()
    }
}
