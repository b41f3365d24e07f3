//! Ruspini strong fuzzy partitions of [0, 1] made of triangular sets.

use serde::{Deserialize, Serialize};

use crate::pit::{PitError, QuantileTable};

#[derive(Debug, thiserror::Error)]
pub enum PartitionError {
    #[error("a fuzzy partition needs at least 2 sets, got {0}")]
    TooFewSets(usize),
    #[error("partition for attribute {partition} paired with table for attribute {table}")]
    AttributeMismatch { partition: usize, table: usize },
    #[error(transparent)]
    Pit(#[from] PitError),
}

/// Triangle with vertices `left <= core <= right` in [0, 1].
///
/// A set with `left == core` (or `core == right`) is a shoulder and holds
/// membership 1 on that flat end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangularFuzzySet {
    pub left: f64,
    pub core: f64,
    pub right: f64,
    pub label: usize,
}

impl TriangularFuzzySet {
    pub fn membership(&self, u: f64) -> f64 {
        if u < self.left || u > self.right {
            0.0
        } else if u < self.core {
            (u - self.left) / (self.core - self.left)
        } else if u > self.core {
            (self.right - u) / (self.right - self.core)
        } else {
            1.0
        }
    }
}

/// At most two adjacent nonzero memberships of a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Activation {
    /// Index of the lower set of the active pair.
    pub lower: usize,
    pub lower_degree: f64,
    /// Degree of set `lower + 1`, zero when `lower` is the last set.
    pub upper_degree: f64,
}

impl Activation {
    /// `(set index, degree)` for each nonzero membership.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, f64)> {
        [
            (self.lower, self.lower_degree),
            (self.lower + 1, self.upper_degree),
        ]
        .into_iter()
        .filter(|&(_, d)| d > 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuzzyPartition {
    pub attribute_index: usize,
    sets: Vec<TriangularFuzzySet>,
}

impl FuzzyPartition {
    /// `num_sets` triangles with equally spaced cores `k / (num_sets - 1)`.
    pub fn uniform(attribute_index: usize, num_sets: usize) -> Result<Self, PartitionError> {
        if num_sets < 2 {
            return Err(PartitionError::TooFewSets(num_sets));
        }
        let step = (num_sets - 1) as f64;
        let cores: Vec<f64> = (0..num_sets).map(|k| k as f64 / step).collect();
        let sets = (0..num_sets)
            .map(|k| TriangularFuzzySet {
                left: if k == 0 { 0.0 } else { cores[k - 1] },
                core: cores[k],
                right: if k + 1 == num_sets { 1.0 } else { cores[k + 1] },
                label: k,
            })
            .collect();
        Ok(Self {
            attribute_index,
            sets,
        })
    }

    pub fn sets(&self) -> &[TriangularFuzzySet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Sparse memberships of `u`; `u` is clamped into [0, 1] first.
    pub fn activation(&self, u: f64) -> Activation {
        let u = u.clamp(0.0, 1.0);
        let last = self.sets.len() - 1;
        // first set whose core is >= u
        let hi = self.sets.partition_point(|s| s.core < u);
        if hi == 0 {
            return Activation {
                lower: 0,
                lower_degree: self.sets[0].membership(u),
                upper_degree: self.sets[1].membership(u),
            };
        }
        let lower = hi.min(last) - 1;
        Activation {
            lower,
            lower_degree: self.sets[lower].membership(u),
            upper_degree: self.sets[lower + 1].membership(u),
        }
    }

    /// Dense membership vector of `u` (clamped into [0, 1]).
    pub fn memberships(&self, u: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.sets.len()];
        let act = self.activation(u);
        out[act.lower] = act.lower_degree;
        out[act.lower + 1] = act.upper_degree;
        out
    }

    /// Set vertices mapped into attribute units through the quantile function.
    pub fn map_to_original(&self, table: &QuantileTable) -> Result<Vec<[f64; 3]>, PartitionError> {
        self.check_table(table)?;
        self.sets
            .iter()
            .map(|s| {
                Ok([
                    table.quantile(s.left)?,
                    table.quantile(s.core)?,
                    table.quantile(s.right)?,
                ])
            })
            .collect()
    }

    /// Exact original-space membership functions of every set.
    pub fn original_space(
        &self,
        table: &QuantileTable,
    ) -> Result<Vec<OriginalSpaceMembership>, PartitionError> {
        self.check_table(table)?;
        self.sets
            .iter()
            .map(|s| OriginalSpaceMembership::new(s, table))
            .collect()
    }

    fn check_table(&self, table: &QuantileTable) -> Result<(), PartitionError> {
        if table.attribute_index != self.attribute_index {
            return Err(PartitionError::AttributeMismatch {
                partition: self.attribute_index,
                table: table.attribute_index,
            });
        }
        Ok(())
    }
}

/// Membership of one set expressed over raw attribute values.
///
/// `x -> membership(cdf(x))` is linear between consecutive quantile anchors
/// and between the mapped vertices, so it is stored exactly as breakpoints
/// over the union of both. Only valid inside the anchor range; outside it
/// the constant end values apply.
#[derive(Clone, Debug, PartialEq)]
pub struct OriginalSpaceMembership {
    breakpoints: Vec<(f64, f64)>,
}

impl OriginalSpaceMembership {
    fn new(set: &TriangularFuzzySet, table: &QuantileTable) -> Result<Self, PartitionError> {
        let mut xs: Vec<f64> = table.anchors().iter().map(|&(v, _)| v).collect();
        for u in [set.left, set.core, set.right] {
            xs.push(table.quantile(u)?);
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let breakpoints = xs
            .into_iter()
            .map(|x| (x, set.membership(table.cdf(x))))
            .collect();
        Ok(Self { breakpoints })
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn eval(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        if x <= b[0].0 {
            return b[0].1;
        }
        if x >= b[b.len() - 1].0 {
            return b[b.len() - 1].1;
        }
        let hi = b.partition_point(|&(bx, _)| bx < x);
        let (x1, m1) = b[hi];
        if x1 == x {
            return m1;
        }
        let (x0, m0) = b[hi - 1];
        m0 + (x - x0) / (x1 - x0) * (m1 - m0)
    }
}
