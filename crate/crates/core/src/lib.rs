//! Fuzzy multi-way decision trees over quantile-based probability integral
//! transforms.
//!
//! Continuous attributes are mapped through an approximate CDF built from
//! training quantiles, which makes them roughly uniform on [0, 1]. A fixed
//! number of equally spaced triangular fuzzy sets then partitions every
//! attribute, and a multi-way fuzzy decision tree is grown on the result.
//!
//! ```
//! use fmdt_core::{synth, FmdtModel, Hyperparameters, InferenceMode};
//!
//! let data = synth::two_gaussians(2_000, 7);
//! let model = FmdtModel::train(&data, &Hyperparameters::default()).unwrap();
//! let p = model.predict(&data.row(0), InferenceMode::WeightedVote).unwrap();
//! assert!(p.class < 2);
//! ```

pub mod dataset;
pub mod fmdt;
pub mod metrics;
pub mod parallel;
pub mod partition;
pub mod pit;
pub mod synth;

mod error;

pub use dataset::{
    load_csv, split_by_fold, stratified_folds, AttributeKind, AttributeSchema, Column, CsvOptions,
    Dataset, FoldAssignment, SchemaSpec, Value,
};
pub use error::Error;
pub use fmdt::{
    Complexity, FmdtModel, Hyperparameters, InferenceMode, Prediction, TNorm, TreeNode,
};
pub use metrics::{cross_validate, ConfusionMatrix, CvOptions, EvaluationReport};
pub use partition::{FuzzyPartition, TriangularFuzzySet};
pub use pit::{compute_quantiles, QuantileTable};
