use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{validate_schema, AttributeKind, AttributeSchema, Dataset, Value};
use crate::partition::{Activation, FuzzyPartition};
use crate::pit::{fit_tables, transform_dataset, QuantileTable};

use super::{grow_tree, matching_degree, FmdtError, Hyperparameters, InferenceMode, TreeNode};

/// Version tag written into every model file.
pub const MODEL_VERSION: &str = "fmdt-pit/1";

/// Wall-clock time of the two training stages.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrainTimings {
    /// Quantile tables, transform and fuzzy partitions.
    pub partitioning: Duration,
    /// Tree induction.
    pub learning: Duration,
}

impl TrainTimings {
    pub fn total(&self) -> Duration {
        self.partitioning + self.learning
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Complexity {
    pub leaf_count: usize,
    pub avg_depth: f64,
    /// Mean number of fuzzy sets over continuous attributes (0 if none).
    pub avg_fuzzy_sets: f64,
}

/// Association degrees of one activated leaf.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafAssociation {
    /// Child index taken at each internal node from the root.
    pub path: Vec<usize>,
    pub matching_degree: f64,
    /// `matching_degree * class_weight` per class.
    pub degrees: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub class: usize,
    /// Per-class score: largest association degree (max matching) or the
    /// sum over leaves (weighted vote). All zero when no leaf fires.
    pub scores: Vec<f64>,
}

/// A trained tree together with everything inference needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct FmdtModel {
    schema: Vec<AttributeSchema>,
    class_labels: Vec<String>,
    hyperparameters: Hyperparameters,
    tables: Vec<QuantileTable>,
    partitions: Vec<FuzzyPartition>,
    root: TreeNode,
    majority_class: usize,
    /// Attribute index -> position in `tables` / `partitions`.
    slots: Vec<Option<usize>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct ModelFile {
    version: String,
    schema: Vec<AttributeSchema>,
    class_labels: Vec<String>,
    hyperparameters: Hyperparameters,
    majority_class: usize,
    tables: Vec<QuantileTable>,
    partitions: Vec<FuzzyPartition>,
    tree: TreeNode,
}

impl From<FmdtModel> for ModelFile {
    fn from(m: FmdtModel) -> Self {
        ModelFile {
            version: MODEL_VERSION.to_string(),
            schema: m.schema,
            class_labels: m.class_labels,
            hyperparameters: m.hyperparameters,
            majority_class: m.majority_class,
            tables: m.tables,
            partitions: m.partitions,
            tree: m.root,
        }
    }
}

impl TryFrom<ModelFile> for FmdtModel {
    type Error = FmdtError;

    fn try_from(f: ModelFile) -> Result<Self, Self::Error> {
        if f.version != MODEL_VERSION {
            return Err(FmdtError::UnsupportedVersion(f.version));
        }
        FmdtModel::from_parts(
            f.schema,
            f.class_labels,
            f.hyperparameters,
            f.tables,
            f.partitions,
            f.tree,
            f.majority_class,
        )
    }
}

/// Transformed attribute value, ready for tree traversal.
enum Encoded {
    Fuzzy(Activation),
    Crisp(usize),
}

impl FmdtModel {
    /// Quantile tables, PIT transform, uniform partitions, then induction.
    pub fn train(ds: &Dataset, hp: &Hyperparameters) -> Result<Self, FmdtError> {
        Self::train_timed(ds, hp).map(|(m, _)| m)
    }

    pub fn train_timed(
        ds: &Dataset,
        hp: &Hyperparameters,
    ) -> Result<(Self, TrainTimings), FmdtError> {
        hp.validate()?;
        if ds.num_attributes() == 0 {
            return Err(FmdtError::NoAttributes);
        }
        let started = Instant::now();
        let tables = fit_tables(ds, hp.quantiles)?;
        let transformed = transform_dataset(ds, &tables)?;
        let partitions = tables
            .iter()
            .map(|t| FuzzyPartition::uniform(t.attribute_index, hp.fuzzy_sets))
            .collect::<Result<Vec<_>, _>>()?;
        let partitioning = started.elapsed();

        let started = Instant::now();
        let root = grow_tree(&transformed, &partitions, hp)?;
        let learning = started.elapsed();

        let counts = ds.class_counts();
        let majority_class = argmax(counts.iter().map(|&c| c as f64));
        let model = Self::from_parts(
            ds.schema().to_vec(),
            ds.class_labels().to_vec(),
            hp.clone(),
            tables,
            partitions,
            root,
            majority_class,
        )?;
        Ok((
            model,
            TrainTimings {
                partitioning,
                learning,
            },
        ))
    }

    /// Assembles a model, checking that all parts agree.
    pub fn from_parts(
        schema: Vec<AttributeSchema>,
        class_labels: Vec<String>,
        hyperparameters: Hyperparameters,
        tables: Vec<QuantileTable>,
        partitions: Vec<FuzzyPartition>,
        root: TreeNode,
        majority_class: usize,
    ) -> Result<Self, FmdtError> {
        let invalid = |m: String| Err(FmdtError::InvalidModel(m));
        validate_schema(&schema)?;
        hyperparameters.validate()?;
        if class_labels.len() < 2 {
            return invalid(format!("{} class labels", class_labels.len()));
        }
        if majority_class >= class_labels.len() {
            return invalid(format!("majority class {majority_class} out of range"));
        }
        if tables.len() != partitions.len() {
            return invalid("tables and partitions differ in number".into());
        }
        let mut slots = vec![None; schema.len()];
        for (i, (t, p)) in tables.iter().zip(&partitions).enumerate() {
            let a = t.attribute_index;
            if p.attribute_index != a {
                return invalid(format!(
                    "table {i} and partition {i} describe different attributes"
                ));
            }
            match schema.get(a) {
                Some(attr) if attr.kind.is_continuous() && slots[a].is_none() => slots[a] = Some(i),
                _ => {
                    return invalid(format!(
                        "table for attribute {a} is not a continuous attribute"
                    ))
                }
            }
            if p.len() != hyperparameters.fuzzy_sets {
                return invalid(format!("partition for attribute {a} has {} sets", p.len()));
            }
        }
        if let Some(a) = schema
            .iter()
            .find(|a| a.kind.is_continuous() && slots[a.index].is_none())
        {
            return invalid(format!("no table for continuous attribute '{}'", a.name));
        }

        let model = Self {
            schema,
            class_labels,
            hyperparameters,
            tables,
            partitions,
            root,
            majority_class,
            slots,
        };
        model.check_tree()?;
        Ok(model)
    }

    fn check_tree(&self) -> Result<(), FmdtError> {
        let mut problem = None;
        let m = self.class_labels.len();
        self.root.walk(&mut |node, depth, path| {
            if problem.is_some() {
                return;
            }
            match node {
                TreeNode::Internal {
                    attribute_index,
                    children,
                    ..
                } => {
                    let a = *attribute_index;
                    if a >= self.schema.len() {
                        problem = Some(format!("split on unknown attribute {a}"));
                    } else if path.contains(&a) {
                        problem = Some(format!("attribute {a} repeats on a path"));
                    } else if children.len() != self.arity(a) {
                        problem = Some(format!(
                            "split on attribute {a} has {} children, expected {}",
                            children.len(),
                            self.arity(a)
                        ));
                    }
                }
                TreeNode::Leaf {
                    class_weights,
                    depth: d,
                    ..
                } => {
                    if class_weights.len() != m {
                        problem = Some(format!("leaf has {} class weights", class_weights.len()));
                    } else if *d != depth {
                        problem = Some(format!("leaf records depth {d} at depth {depth}"));
                    }
                }
            }
        });
        if problem.is_none() && self.root.depth() > self.hyperparameters.max_depth {
            problem = Some("tree deeper than max_depth".into());
        }
        problem.map_or(Ok(()), |p| Err(FmdtError::InvalidModel(p)))
    }

    fn arity(&self, attribute: usize) -> usize {
        match &self.schema[attribute].kind {
            AttributeKind::Continuous => self.hyperparameters.fuzzy_sets,
            AttributeKind::Categorical(c) => c.len(),
        }
    }

    pub fn schema(&self) -> &[AttributeSchema] {
        &self.schema
    }

    pub fn class_labels(&self) -> &[String] {
        &self.class_labels
    }

    pub fn hyperparameters(&self) -> &Hyperparameters {
        &self.hyperparameters
    }

    pub fn tables(&self) -> &[QuantileTable] {
        &self.tables
    }

    pub fn partitions(&self) -> &[FuzzyPartition] {
        &self.partitions
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Class predicted when no leaf is activated.
    pub fn majority_class(&self) -> usize {
        self.majority_class
    }

    pub fn complexity(&self) -> Complexity {
        let mut leaf_count = 0;
        let mut depth_sum = 0;
        self.root.walk(&mut |n, d, _| {
            if n.is_leaf() {
                leaf_count += 1;
                depth_sum += d;
            }
        });
        let avg_fuzzy_sets = if self.partitions.is_empty() {
            0.0
        } else {
            self.partitions.iter().map(|p| p.len() as f64).sum::<f64>()
                / self.partitions.len() as f64
        };
        Complexity {
            leaf_count,
            avg_depth: depth_sum as f64 / leaf_count as f64,
            avg_fuzzy_sets,
        }
    }

    fn encode(&self, x: &[Value]) -> Result<Vec<Encoded>, FmdtError> {
        if x.len() != self.schema.len() {
            return Err(FmdtError::SchemaMismatch(format!(
                "example has {} values, model expects {}",
                x.len(),
                self.schema.len()
            )));
        }
        self.schema
            .iter()
            .zip(x)
            .map(|(attr, v)| match (&attr.kind, *v) {
                (AttributeKind::Continuous, Value::Continuous(raw)) if raw.is_finite() => {
                    let slot = self.slots[attr.index].expect("validated at construction");
                    let u = self.tables[slot].cdf(raw);
                    Ok(Encoded::Fuzzy(self.partitions[slot].activation(u)))
                }
                (AttributeKind::Continuous, Value::Continuous(_)) => Err(
                    FmdtError::SchemaMismatch(format!("non-finite value for '{}'", attr.name)),
                ),
                (AttributeKind::Categorical(_), Value::Categorical(c)) => Ok(Encoded::Crisp(c)),
                _ => Err(FmdtError::SchemaMismatch(format!(
                    "value kind does not match attribute '{}'",
                    attr.name
                ))),
            })
            .collect()
    }

    /// Visits every leaf with nonzero matching degree, depth-first.
    fn visit_active_leaves(
        &self,
        encoded: &[Encoded],
        visit: &mut impl FnMut(&[usize], f64, &[f64]),
    ) {
        let tnorm = self.hyperparameters.tnorm;
        fn go(
            node: &TreeNode,
            md: f64,
            encoded: &[Encoded],
            tnorm: super::TNorm,
            path: &mut Vec<usize>,
            visit: &mut impl FnMut(&[usize], f64, &[f64]),
        ) {
            match node {
                TreeNode::Leaf { class_weights, .. } => visit(path, md, class_weights),
                TreeNode::Internal {
                    attribute_index,
                    children,
                    ..
                } => {
                    let mut descend = |child: usize, mu: f64| {
                        let child_md = matching_degree(tnorm, mu, md);
                        if child_md > 0.0 {
                            path.push(child);
                            go(&children[child], child_md, encoded, tnorm, path, visit);
                            path.pop();
                        }
                    };
                    match &encoded[*attribute_index] {
                        Encoded::Fuzzy(act) => {
                            for (child, mu) in act.nonzero() {
                                descend(child, mu);
                            }
                        }
                        // unseen categories activate no branch
                        Encoded::Crisp(c) if *c < children.len() => descend(*c, 1.0),
                        Encoded::Crisp(_) => {}
                    }
                }
            }
        }
        go(&self.root, 1.0, encoded, tnorm, &mut Vec::new(), visit);
    }

    /// Association degrees of `x` (raw attribute units) with every class at
    /// every activated leaf.
    pub fn association_degrees(&self, x: &[Value]) -> Result<Vec<LeafAssociation>, FmdtError> {
        let encoded = self.encode(x)?;
        let mut out = Vec::new();
        self.visit_active_leaves(&encoded, &mut |path, md, weights| {
            out.push(LeafAssociation {
                path: path.to_vec(),
                matching_degree: md,
                degrees: weights.iter().map(|w| md * w).collect(),
            });
        });
        Ok(out)
    }

    pub fn predict(&self, x: &[Value], mode: InferenceMode) -> Result<Prediction, FmdtError> {
        let encoded = self.encode(x)?;
        let mut scores: Vec<f64> = vec![0.0; self.class_labels.len()];
        let mut fired = false;
        self.visit_active_leaves(&encoded, &mut |_, md, weights| {
            fired = true;
            for (s, w) in scores.iter_mut().zip(weights) {
                let ad = md * w;
                match mode {
                    InferenceMode::MaxMatching => *s = (*s).max(ad),
                    InferenceMode::WeightedVote => *s += ad,
                }
            }
        });
        let class = if fired && scores.iter().any(|&s| s > 0.0) {
            argmax(scores.iter().copied())
        } else {
            self.majority_class
        };
        Ok(Prediction { class, scores })
    }

    /// Predicts every row of `ds`, which must share the model's schema.
    pub fn predict_dataset(
        &self,
        ds: &Dataset,
        mode: InferenceMode,
    ) -> Result<Vec<Prediction>, FmdtError> {
        if ds.schema() != self.schema.as_slice() {
            return Err(FmdtError::SchemaMismatch(
                "dataset schema differs from the model's".into(),
            ));
        }
        if ds.class_labels() != self.class_labels.as_slice() {
            return Err(FmdtError::SchemaMismatch(
                "dataset class labels differ from the model's".into(),
            ));
        }
        (0..ds.num_rows())
            .into_par_iter()
            .map(|i| self.predict(&ds.row(i), mode))
            .collect()
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let mut text = self.to_json().map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)
    }

    pub fn load(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}

/// Index of the largest value; ties go to the lowest index.
fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}
