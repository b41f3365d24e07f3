//! Quantile tables and the probability integral transform.
//!
//! A [`QuantileTable`] approximates an attribute's CDF by the q-quantiles of
//! its training values, joined by straight lines. Mapping a value through
//! that CDF makes the attribute approximately uniform on [0, 1]; the
//! piecewise-linear inverse maps levels back to attribute units.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{AttributeKind, Column, Dataset, DatasetError};

/// Default number of quantiles per attribute.
pub const DEFAULT_QUANTILES: usize = 1000;

#[derive(Debug, thiserror::Error)]
pub enum PitError {
    #[error("cannot compute quantiles of an empty sample")]
    EmptySample,
    #[error("quantile count must be at least 2, got {0}")]
    TooFewQuantiles(usize),
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("level {0} outside [0, 1]")]
    LevelOutOfRange(f64),
    #[error("no quantile table for continuous attribute {0}")]
    MissingTable(usize),
    #[error("quantile table for attribute {0} does not match a continuous attribute")]
    UnexpectedTable(usize),
    #[error("invalid quantile table: {0}")]
    InvalidTable(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

/// Anchors `(value, level)` of a piecewise-linear CDF, strictly increasing in
/// both coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileTable {
    pub attribute_index: usize,
    /// Effective quantile count (`min(q, n)` of the request).
    pub q: usize,
    anchors: Vec<(f64, f64)>,
}

impl QuantileTable {
    /// Builds a table from explicit anchors, checking monotonicity.
    pub fn from_anchors(
        attribute_index: usize,
        q: usize,
        anchors: Vec<(f64, f64)>,
    ) -> Result<Self, PitError> {
        if anchors.is_empty() {
            return Err(PitError::InvalidTable("no anchors".into()));
        }
        for &(v, l) in &anchors {
            if !v.is_finite() || !(0.0..=1.0).contains(&l) {
                return Err(PitError::InvalidTable(format!("bad anchor ({v}, {l})")));
            }
        }
        if anchors
            .windows(2)
            .any(|w| w[0].0 >= w[1].0 || w[0].1 >= w[1].1)
        {
            return Err(PitError::InvalidTable(
                "anchors not strictly increasing".into(),
            ));
        }
        Ok(Self {
            attribute_index,
            q,
            anchors,
        })
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    /// True when every training value was identical.
    pub fn is_degenerate(&self) -> bool {
        self.anchors.len() == 1
    }

    /// Approximate CDF: 0 below the first anchor, 1 above the last, linear
    /// interpolation in between.
    pub fn cdf(&self, x: f64) -> f64 {
        let a = &self.anchors;
        let (first, last) = (a[0], a[a.len() - 1]);
        if x < first.0 {
            return 0.0;
        }
        if x > last.0 {
            return 1.0;
        }
        // first index with value >= x
        let hi = a.partition_point(|&(v, _)| v < x);
        let (v1, l1) = a[hi];
        if v1 == x {
            return l1;
        }
        let (v0, l0) = a[hi - 1];
        l0 + (x - v0) / (v1 - v0) * (l1 - l0)
    }

    /// Inverse of [`QuantileTable::cdf`], clamped to the anchor range.
    pub fn quantile(&self, u: f64) -> Result<f64, PitError> {
        if !(0.0..=1.0).contains(&u) {
            return Err(PitError::LevelOutOfRange(u));
        }
        let a = &self.anchors;
        let (first, last) = (a[0], a[a.len() - 1]);
        if u <= first.1 {
            return Ok(first.0);
        }
        if u >= last.1 {
            return Ok(last.0);
        }
        let hi = a.partition_point(|&(_, l)| l < u);
        let (v1, l1) = a[hi];
        if l1 == u {
            return Ok(v1);
        }
        let (v0, l0) = a[hi - 1];
        let x = v0 + (u - l0) / (l1 - l0) * (v1 - v0);
        Ok(x.clamp(v0, v1))
    }
}

/// Nearest-rank q-quantiles of `values`, with equal quantiles collapsed onto
/// the highest level. `q` larger than the sample size falls back to `n`.
pub fn compute_quantiles(
    attribute_index: usize,
    values: &[f64],
    q: usize,
) -> Result<QuantileTable, PitError> {
    if values.is_empty() {
        return Err(PitError::EmptySample);
    }
    if q < 2 {
        return Err(PitError::TooFewQuantiles(q));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(PitError::NonFinite);
    }
    let mut sorted = values.to_vec();
    sorted.par_sort_unstable_by(f64::total_cmp);
    Ok(quantiles_of_sorted(attribute_index, &sorted, q))
}

fn quantiles_of_sorted(attribute_index: usize, sorted: &[f64], q: usize) -> QuantileTable {
    let n = sorted.len();
    let q = q.min(n);
    let mut anchors: Vec<(f64, f64)> = Vec::with_capacity(q.saturating_sub(1));
    for i in 1..q {
        // 1-based rank ceil(i * n / q)
        let rank = (i * n).div_ceil(q);
        let value = sorted[rank - 1];
        let level = i as f64 / q as f64;
        match anchors.last_mut() {
            Some(last) if last.0 == value => last.1 = level,
            _ => anchors.push((value, level)),
        }
    }
    if anchors.is_empty() {
        // q == n == 1: a single example carries the whole distribution
        anchors.push((sorted[0], 1.0));
    }
    QuantileTable {
        attribute_index,
        q,
        anchors,
    }
}

/// One table per continuous attribute of `ds`, in attribute order.
pub fn fit_tables(ds: &Dataset, q: usize) -> Result<Vec<QuantileTable>, PitError> {
    if q < 2 {
        return Err(PitError::TooFewQuantiles(q));
    }
    ds.schema()
        .par_iter()
        .filter(|a| a.kind.is_continuous())
        .map(|a| match ds.column(a.index) {
            Column::Continuous(v) => compute_quantiles(a.index, v, q),
            Column::Categorical(_) => unreachable!("continuous attribute"),
        })
        .collect()
}

/// Replaces every continuous value by its approximate CDF level.
///
/// `tables` must contain exactly one table per continuous attribute.
pub fn transform_dataset(ds: &Dataset, tables: &[QuantileTable]) -> Result<Dataset, PitError> {
    let by_attr = index_tables(ds, tables)?;
    let columns: Vec<Column> = ds
        .columns()
        .par_iter()
        .enumerate()
        .map(|(i, col)| match col {
            Column::Continuous(v) => {
                let t = &tables[by_attr[i].expect("checked by index_tables")];
                Column::Continuous(v.iter().map(|&x| t.cdf(x)).collect())
            }
            Column::Categorical(_) => col.clone(),
        })
        .collect();
    Ok(ds.with_columns(columns)?)
}

fn index_tables(ds: &Dataset, tables: &[QuantileTable]) -> Result<Vec<Option<usize>>, PitError> {
    let mut by_attr = vec![None; ds.num_attributes()];
    for (ti, t) in tables.iter().enumerate() {
        match ds.schema().get(t.attribute_index) {
            Some(a) if a.kind == AttributeKind::Continuous && by_attr[a.index].is_none() => {
                by_attr[a.index] = Some(ti)
            }
            _ => return Err(PitError::UnexpectedTable(t.attribute_index)),
        }
    }
    for a in ds.schema() {
        if a.kind.is_continuous() && by_attr[a.index].is_none() {
            return Err(PitError::MissingTable(a.index));
        }
    }
    Ok(by_attr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::AttributeSchema;
    use proptest::prelude::*;

    fn table_2468() -> QuantileTable {
        QuantileTable::from_anchors(0, 5, vec![(2.0, 0.2), (4.0, 0.4), (6.0, 0.6), (8.0, 0.8)])
            .unwrap()
    }

    /// Naive nearest-rank oracle: sort, index, collapse by hand.
    fn oracle(values: &[f64], q: usize) -> Vec<(f64, f64)> {
        let mut s = values.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = s.len();
        let q = q.min(n);
        let mut out: Vec<(f64, f64)> = Vec::new();
        for i in 1..q {
            let rank = ((i * n) as f64 / q as f64).ceil() as usize;
            let v = s[rank - 1];
            if let Some(last) = out.last_mut() {
                if last.0 == v {
                    last.1 = i as f64 / q as f64;
                    continue;
                }
            }
            out.push((v, i as f64 / q as f64));
        }
        out
    }

    #[test]
    fn one_to_ten_fifths() {
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        let t = compute_quantiles(0, &values, 5).unwrap();
        assert_eq!(
            t.anchors(),
            &[(2.0, 0.2), (4.0, 0.4), (6.0, 0.6), (8.0, 0.8)]
        );
        assert_eq!(t.anchors(), oracle(&values, 5).as_slice());
    }

    #[test]
    fn constant_vector_collapses() {
        let t = compute_quantiles(0, &[7.0; 4], 4).unwrap();
        assert_eq!(t.anchors(), &[(7.0, 0.75)]);
        assert!(t.is_degenerate());
    }

    #[test]
    fn rejects_bad_input() {
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        assert!(matches!(
            compute_quantiles(0, &values, 1),
            Err(PitError::TooFewQuantiles(1))
        ));
        assert!(matches!(
            compute_quantiles(0, &[], 4),
            Err(PitError::EmptySample)
        ));
        assert!(matches!(
            compute_quantiles(0, &[1.0, f64::NAN], 2),
            Err(PitError::NonFinite)
        ));
    }

    #[test]
    fn q_above_n_falls_back_to_n() {
        let t = compute_quantiles(0, &[3.0, 1.0, 2.0], 1000).unwrap();
        assert_eq!(t.q, 3);
        assert_eq!(t.anchors(), &[(1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0)]);
        let single = compute_quantiles(0, &[5.0], 10).unwrap();
        assert_eq!(single.anchors(), &[(5.0, 1.0)]);
    }

    #[test]
    fn cdf_examples() {
        let t = table_2468();
        assert!((t.cdf(5.0) - 0.5).abs() < 1e-15);
        assert_eq!(t.cdf(1.0), 0.0);
        assert_eq!(t.cdf(9.0), 1.0);
        assert_eq!(t.cdf(4.0), 0.4);
        assert_eq!(t.cdf(2.0), 0.2);
        assert_eq!(t.cdf(8.0), 0.8);
    }

    #[test]
    fn quantile_examples() {
        let t = table_2468();
        assert!((t.quantile(0.5).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(t.quantile(0.0).unwrap(), 2.0);
        assert_eq!(t.quantile(0.8).unwrap(), 8.0);
        assert_eq!(t.quantile(1.0).unwrap(), 8.0);
        assert!(matches!(t.quantile(1.5), Err(PitError::LevelOutOfRange(_))));
        assert!(t.quantile(-0.1).is_err());
    }

    #[test]
    fn degenerate_table_cdf_and_inverse() {
        let t = compute_quantiles(0, &[7.0; 4], 4).unwrap();
        assert_eq!(t.cdf(7.0), 0.75);
        assert_eq!(t.cdf(6.9), 0.0);
        assert_eq!(t.cdf(7.1), 1.0);
        for u in [0.0, 0.3, 0.75, 1.0] {
            assert_eq!(t.quantile(u).unwrap(), 7.0);
        }
    }

    #[test]
    fn from_anchors_validates() {
        assert!(QuantileTable::from_anchors(0, 2, vec![]).is_err());
        assert!(QuantileTable::from_anchors(0, 2, vec![(1.0, 0.5), (1.0, 0.6)]).is_err());
        assert!(QuantileTable::from_anchors(0, 2, vec![(1.0, 0.5), (2.0, 0.5)]).is_err());
        assert!(QuantileTable::from_anchors(0, 2, vec![(1.0, 1.5)]).is_err());
    }

    #[test]
    fn serializes_anchor_pairs() {
        let json = serde_json::to_string(&table_2468()).unwrap();
        assert_eq!(
            json,
            r#"{"attribute_index":0,"q":5,"anchors":[[2.0,0.2],[4.0,0.4],[6.0,0.6],[8.0,0.8]]}"#
        );
        let back: QuantileTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, table_2468());
    }

    fn mixed_dataset() -> Dataset {
        let schema = vec![
            AttributeSchema {
                name: "a".into(),
                index: 0,
                kind: AttributeKind::Continuous,
            },
            AttributeSchema {
                name: "b".into(),
                index: 1,
                kind: AttributeKind::Categorical(vec!["x".into(), "y".into()]),
            },
            AttributeSchema {
                name: "c".into(),
                index: 2,
                kind: AttributeKind::Continuous,
            },
        ];
        Dataset::new(
            schema,
            vec!["n".into(), "p".into()],
            vec![
                Column::Continuous(vec![3.0, 3.0, 3.0, 3.0]),
                Column::Categorical(vec![1, 0, 1, 1]),
                Column::Continuous(vec![0.5, -1.0, 2.0, 8.0]),
            ],
            vec![0, 1, 0, 1],
        )
        .unwrap()
    }

    #[test]
    fn transform_leaves_categoricals_alone() {
        let ds = mixed_dataset();
        let tables = fit_tables(&ds, 1000).unwrap();
        assert_eq!(tables.len(), 2);
        let out = transform_dataset(&ds, &tables).unwrap();
        assert_eq!(out.column(1), ds.column(1));
        assert_eq!(out.labels(), ds.labels());
        // constant column: every value is the single anchor
        assert_eq!(out.column(0), &Column::Continuous(vec![0.75; 4]));
        let Column::Continuous(c) = out.column(2) else {
            panic!()
        };
        let expected: Vec<f64> = [0.5, -1.0, 2.0, 8.0]
            .iter()
            .map(|&x| tables[1].cdf(x))
            .collect();
        assert_eq!(c, &expected);
    }

    #[test]
    fn transform_requires_every_table() {
        let ds = mixed_dataset();
        let tables = fit_tables(&ds, 10).unwrap();
        assert!(matches!(
            transform_dataset(&ds, &tables[..1]),
            Err(PitError::MissingTable(2))
        ));
        let mut wrong = tables.clone();
        wrong[1].attribute_index = 1;
        assert!(matches!(
            transform_dataset(&ds, &wrong),
            Err(PitError::UnexpectedTable(1))
        ));
    }

    #[test]
    fn uniform_data_is_nearly_fixed() {
        // exact grid on (0, 1]: the transform is close to the identity
        let n = 10_000;
        let values: Vec<f64> = (1..=n).map(|i| i as f64 / n as f64).collect();
        let q = 500;
        let t = compute_quantiles(0, &values, q).unwrap();
        for &x in &values {
            assert!((t.cdf(x) - x).abs() <= 2.0 / q as f64, "x={x}");
        }
    }

    proptest! {
        #[test]
        fn matches_oracle(values in prop::collection::vec(-50i32..50, 2..300), q in 2usize..400) {
            let values: Vec<f64> = values.into_iter().map(|v| v as f64 / 4.0).collect();
            let q = 2 + q % (values.len() - 1);
            let t = compute_quantiles(0, &values, q).unwrap();
            let expected = oracle(&values, q);
            prop_assert_eq!(t.anchors(), expected.as_slice());
        }

        #[test]
        fn cdf_is_monotone(values in prop::collection::vec(-1e3f64..1e3, 1..200),
                           q in 2usize..50, a in -2e3f64..2e3, b in -2e3f64..2e3) {
            let t = compute_quantiles(0, &values, q).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(t.cdf(lo) <= t.cdf(hi));
            prop_assert!((0.0..=1.0).contains(&t.cdf(lo)));
        }

        #[test]
        fn inverse_round_trips(values in prop::collection::vec(-1e3f64..1e3, 2..200),
                               q in 2usize..50, frac in 0.0f64..1.0) {
            let t = compute_quantiles(0, &values, q).unwrap();
            let a = t.anchors();
            let x = a[0].0 + frac * (a[a.len() - 1].0 - a[0].0);
            let u = t.cdf(x);
            let back = t.quantile(u).unwrap();
            prop_assert!((t.cdf(back) - u).abs() <= 1e-12);
        }
    }
}
