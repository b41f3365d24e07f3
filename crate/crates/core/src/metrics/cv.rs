use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{split_by_fold, stratified_folds, Dataset};
use crate::fmdt::{Complexity, FmdtModel, Hyperparameters, InferenceMode};

use super::{ConfusionMatrix, MetricsError, Rates};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CvOptions {
    pub k: usize,
    pub seed: u64,
    pub positive_class: usize,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            k: 5,
            seed: 42,
            positive_class: 0,
        }
    }
}

/// Stage wall-clock times in seconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub partitioning: f64,
    pub learning: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_rows: usize,
    pub test_rows: usize,
    pub confusion: ConfusionMatrix,
    pub accuracy: f64,
    /// Binary problems with both classes present in the test fold only.
    pub rates: Option<Rates>,
    pub auc: Option<f64>,
    pub complexity: Complexity,
    pub timings: StageTimings,
}

/// Mean and sample standard deviation across folds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }

    /// `mean ±std` with the given scale and decimals, e.g. `80.23 ±0.05`.
    pub fn format(&self, scale: f64, decimals: usize) -> String {
        format!(
            "{:.*} ±{:.*}",
            decimals,
            self.mean * scale,
            decimals,
            self.std * scale
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub k: usize,
    pub seed: u64,
    pub positive_class: String,
    pub class_labels: Vec<String>,
    pub hyperparameters: Hyperparameters,
    pub folds: Vec<FoldResult>,
    pub accuracy: Summary,
    pub auc: Option<Summary>,
    pub leaf_count: Summary,
    pub avg_depth: Summary,
    pub avg_fuzzy_sets: Summary,
    pub timings: TimingSummary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingSummary {
    pub partitioning: Summary,
    pub learning: Summary,
    pub total: Summary,
}

impl EvaluationReport {
    /// Zeroes every wall-clock field, leaving only deterministic content.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        let zero = Summary {
            mean: 0.0,
            std: 0.0,
        };
        r.timings = TimingSummary {
            partitioning: zero,
            learning: zero,
            total: zero,
        };
        for f in &mut r.folds {
            f.timings = StageTimings::default();
        }
        r
    }

    /// Console table: one row per fold, then mean ± std rows.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:>4}  {:>9}  {:>7}  {:>7}  {:>9}  {:>10}  {:>12}  {:>10}  {:>8}",
            "fold",
            "accuracy%",
            "auc%",
            "leaves",
            "avg_depth",
            "avg_fsets",
            "partition_s",
            "learn_s",
            "total_s"
        );
        for f in &self.folds {
            let auc = f
                .auc
                .map_or_else(|| "-".to_string(), |a| format!("{:.2}", a * 100.0));
            let _ = writeln!(
                s,
                "{:>4}  {:>9.2}  {:>7}  {:>7}  {:>9.2}  {:>10.2}  {:>12.3}  {:>10.3}  {:>8.3}",
                f.fold,
                f.accuracy * 100.0,
                auc,
                f.complexity.leaf_count,
                f.complexity.avg_depth,
                f.complexity.avg_fuzzy_sets,
                f.timings.partitioning,
                f.timings.learning,
                f.timings.total,
            );
        }
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "Accuracy rate %           {}",
            self.accuracy.format(100.0, 2)
        );
        if let Some(auc) = &self.auc {
            let _ = writeln!(s, "AUC %                     {}", auc.format(100.0, 2));
        }
        let _ = writeln!(
            s,
            "Number of leaves          {}",
            self.leaf_count.format(1.0, 2)
        );
        let _ = writeln!(
            s,
            "Avg. depth                {}",
            self.avg_depth.format(1.0, 2)
        );
        let _ = writeln!(
            s,
            "Avg. number of fuzzy sets {}",
            self.avg_fuzzy_sets.format(1.0, 2)
        );
        let _ = writeln!(
            s,
            "Partitioning (s)          {}",
            self.timings.partitioning.format(1.0, 3)
        );
        let _ = writeln!(
            s,
            "Learning (s)              {}",
            self.timings.learning.format(1.0, 3)
        );
        let _ = writeln!(
            s,
            "Total time (s)            {}",
            self.timings.total.format(1.0, 3)
        );
        s
    }
}

/// Stratified k-fold cross-validation of FMDT on `ds`.
pub fn cross_validate(
    ds: &Dataset,
    hp: &Hyperparameters,
    options: CvOptions,
) -> Result<EvaluationReport, MetricsError> {
    let classes = ds.num_classes();
    if options.positive_class >= classes {
        return Err(MetricsError::ClassOutOfRange {
            index: options.positive_class,
            classes,
        });
    }
    hp.validate()?;
    let folds = stratified_folds(ds, options.k, options.seed)?;
    let mode: InferenceMode = hp.inference;

    let mut results = Vec::with_capacity(options.k);
    for fold in 0..options.k {
        let (train, test) = split_by_fold(ds, &folds, fold)?;
        let (model, timings) = FmdtModel::train_timed(&train, hp)?;
        let predictions: Vec<usize> = model
            .predict_dataset(&test, mode)?
            .into_iter()
            .map(|p| p.class)
            .collect();
        let confusion = ConfusionMatrix::from_predictions(
            &predictions,
            test.labels(),
            classes,
            options.positive_class,
        )?;
        let accuracy = confusion.accuracy()?;
        let rates = if classes == 2 {
            confusion.binary().rates().ok()
        } else {
            None
        };
        results.push(FoldResult {
            fold,
            train_rows: train.num_rows(),
            test_rows: test.num_rows(),
            accuracy,
            auc: rates.map(|r| r.auc()),
            rates,
            confusion,
            complexity: model.complexity(),
            timings: StageTimings {
                partitioning: timings.partitioning.as_secs_f64(),
                learning: timings.learning.as_secs_f64(),
                total: timings.total().as_secs_f64(),
            },
        });
    }

    let pick =
        |f: &dyn Fn(&FoldResult) -> f64| Summary::of(&results.iter().map(f).collect::<Vec<_>>());
    let aucs: Vec<f64> = results.iter().filter_map(|r| r.auc).collect();
    Ok(EvaluationReport {
        k: options.k,
        seed: options.seed,
        positive_class: ds.class_labels()[options.positive_class].clone(),
        class_labels: ds.class_labels().to_vec(),
        hyperparameters: hp.clone(),
        accuracy: pick(&|r| r.accuracy),
        auc: (!aucs.is_empty()).then(|| Summary::of(&aucs)),
        leaf_count: pick(&|r| r.complexity.leaf_count as f64),
        avg_depth: pick(&|r| r.complexity.avg_depth),
        avg_fuzzy_sets: pick(&|r| r.complexity.avg_fuzzy_sets),
        timings: TimingSummary {
            partitioning: pick(&|r| r.timings.partitioning),
            learning: pick(&|r| r.timings.learning),
            total: pick(&|r| r.timings.total),
        },
        folds: results,
    })
}
