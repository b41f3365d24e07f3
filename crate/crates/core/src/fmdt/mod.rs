//! Multi-way fuzzy decision trees grown on PIT-transformed data.
//!
//! Each internal node splits on one attribute and gets one child per fuzzy
//! set (continuous attributes) or per category (categorical attributes).
//! Examples flow into every child they partially belong to, carrying a
//! matching degree composed along the path with a T-norm. Leaves hold the
//! normalized per-class fuzzy cardinality of the examples that reach them.

mod induce;
mod model;

pub use induce::grow_tree;
pub use model::{Complexity, FmdtModel, LeafAssociation, Prediction, TrainTimings, MODEL_VERSION};

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetError;
use crate::partition::PartitionError;
use crate::pit::{PitError, DEFAULT_QUANTILES};

#[derive(Debug, thiserror::Error)]
pub enum FmdtError {
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparameter(String),
    #[error("fuzzy entropy of a node with zero cardinality")]
    ZeroCardinality,
    #[error("children cardinality {children} exceeds parent cardinality {parent}")]
    CardinalityAccounting { parent: f64, children: f64 },
    #[error("dataset has no attributes")]
    NoAttributes,
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("unsupported model version '{0}'")]
    UnsupportedVersion(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Pit(#[from] PitError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// T-norm used to compose matching degrees along a path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TNorm {
    #[default]
    Product,
}

impl TNorm {
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            TNorm::Product => a * b,
        }
    }
}

impl std::str::FromStr for TNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "product" => Ok(TNorm::Product),
            other => Err(format!("unsupported t-norm '{other}' (supported: product)")),
        }
    }
}

/// How leaf association degrees are turned into a class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InferenceMode {
    /// Class of the single largest association degree.
    MaxMatching,
    /// Class with the largest sum of association degrees over leaves.
    #[default]
    WeightedVote,
}

impl std::str::FromStr for InferenceMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "max-matching" | "max" => Ok(InferenceMode::MaxMatching),
            "weighted-vote" | "vote" => Ok(InferenceMode::WeightedVote),
            other => Err(format!(
                "unknown inference mode '{other}' (expected max-matching or weighted-vote)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Fuzzy sets per continuous attribute.
    pub fuzzy_sets: usize,
    /// Quantiles per continuous attribute.
    pub quantiles: usize,
    pub max_depth: usize,
    /// A node is pure once its majority class reaches `1 - gamma`.
    pub gamma: f64,
    /// Nodes lighter than `phi * N` are not split.
    pub phi: f64,
    /// Children lighter than `lambda * N` become leaves.
    pub lambda: f64,
    pub tnorm: TNorm,
    pub inference: InferenceMode,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Self {
            fuzzy_sets: 5,
            quantiles: DEFAULT_QUANTILES,
            max_depth: 5,
            gamma: 0.001,
            phi: 0.02,
            lambda: 1e-4,
            tnorm: TNorm::Product,
            inference: InferenceMode::WeightedVote,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<(), FmdtError> {
        let bad = |m: String| Err(FmdtError::InvalidHyperparameter(m));
        if self.fuzzy_sets < 2 {
            return bad(format!("fuzzy_sets must be >= 2, got {}", self.fuzzy_sets));
        }
        if self.quantiles < 2 {
            return bad(format!("quantiles must be >= 2, got {}", self.quantiles));
        }
        for (name, v) in [
            ("gamma", self.gamma),
            ("phi", self.phi),
            ("lambda", self.lambda),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        Ok(())
    }
}

/// Per-class fuzzy cardinalities of a node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeStats(pub Vec<f64>);

impl NodeStats {
    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Class proportions, or `None` when the total is zero.
    pub fn proportions(&self) -> Option<Vec<f64>> {
        let total = self.total();
        (total > 0.0).then(|| self.0.iter().map(|c| c / total).collect())
    }
}

/// Matching degree of a child node from its membership and the parent's.
pub fn matching_degree(tnorm: TNorm, membership: f64, parent_degree: f64) -> f64 {
    tnorm.apply(membership, parent_degree)
}

/// Shannon entropy (bits) of the class proportions of `stats`.
pub fn fuzzy_entropy(stats: &NodeStats) -> Result<f64, FmdtError> {
    let total = stats.total();
    if total <= 0.0 {
        return Err(FmdtError::ZeroCardinality);
    }
    Ok(entropy_of(&stats.0, total))
}

fn entropy_of(counts: &[f64], total: f64) -> f64 {
    counts
        .iter()
        .filter(|&&c| c > 0.0)
        .map(|&c| {
            let p = c / total;
            -p * p.log2()
        })
        .sum()
}

/// Absolute slack allowed per unit of parent cardinality when children's
/// totals are compared against the parent's.
const CONSERVATION_TOLERANCE: f64 = 1e-6;

/// Entropy of `parent` minus the cardinality-weighted entropy of `children`.
///
/// Children with zero cardinality contribute nothing.
pub fn fuzzy_info_gain(parent: &NodeStats, children: &[NodeStats]) -> Result<f64, FmdtError> {
    let parent_total = parent.total();
    let parent_entropy = fuzzy_entropy(parent)?;
    let child_totals: Vec<f64> = children.iter().map(NodeStats::total).collect();
    let children_total: f64 = child_totals.iter().sum();
    if children_total > parent_total + CONSERVATION_TOLERANCE * parent_total.max(1.0) {
        return Err(FmdtError::CardinalityAccounting {
            parent: parent_total,
            children: children_total,
        });
    }
    let weighted: f64 = children
        .iter()
        .zip(&child_totals)
        .filter(|&(_, &t)| t > 0.0)
        .map(|(c, &t)| t / parent_total * entropy_of(&c.0, t))
        .sum();
    Ok(parent_entropy - weighted)
}

/// Leaf class weights: normalized class cardinalities, falling back to
/// `fallback` (the parent's proportions) when the leaf is empty.
pub fn class_weights(stats: &NodeStats, fallback: &[f64]) -> Vec<f64> {
    stats.proportions().unwrap_or_else(|| fallback.to_vec())
}

/// A node of the fitted tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TreeNode {
    Internal {
        attribute_index: usize,
        /// Fuzzy cardinality of the training examples reaching this node.
        cardinality: f64,
        /// Information gain of the chosen split.
        gain: f64,
        children: Vec<TreeNode>,
    },
    Leaf {
        class_weights: Vec<f64>,
        cardinality: f64,
        depth: usize,
    },
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    pub fn cardinality(&self) -> f64 {
        match self {
            TreeNode::Internal { cardinality, .. } | TreeNode::Leaf { cardinality, .. } => {
                *cardinality
            }
        }
    }

    /// Visits every node depth-first with its depth and the attributes on
    /// the path above it.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a TreeNode, usize, &[usize])) {
        fn go<'a>(
            node: &'a TreeNode,
            depth: usize,
            path: &mut Vec<usize>,
            visit: &mut impl FnMut(&'a TreeNode, usize, &[usize]),
        ) {
            visit(node, depth, path);
            if let TreeNode::Internal {
                attribute_index,
                children,
                ..
            } = node
            {
                path.push(*attribute_index);
                for c in children {
                    go(c, depth + 1, path, visit);
                }
                path.pop();
            }
        }
        go(self, 0, &mut Vec::new(), visit);
    }

    /// Leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&TreeNode> {
        let mut out = Vec::new();
        self.walk(&mut |n, _, _| {
            if n.is_leaf() {
                out.push(n);
            }
        });
        out
    }

    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut max = 0;
        self.walk(&mut |_, d, _| max = max.max(d));
        max
    }
}
