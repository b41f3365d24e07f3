//! Top-down tree growth driven by fuzzy information gain.

use crate::dataset::{Column, Dataset};
use crate::parallel::ordered_chunk_sum;
use crate::partition::FuzzyPartition;

use super::{
    class_weights, fuzzy_info_gain, matching_degree, FmdtError, Hyperparameters, NodeStats,
    TreeNode,
};

/// How one attribute sends an example to the children of a split.
enum Branching<'a> {
    Fuzzy {
        values: &'a [f64],
        partition: &'a FuzzyPartition,
    },
    Crisp {
        values: &'a [u32],
        categories: usize,
    },
}

impl Branching<'_> {
    fn arity(&self) -> usize {
        match self {
            Branching::Fuzzy { partition, .. } => partition.len(),
            Branching::Crisp { categories, .. } => *categories,
        }
    }

    /// Calls `emit(child, membership)` for every child `row` belongs to.
    #[inline]
    fn for_each_child(&self, row: usize, mut emit: impl FnMut(usize, f64)) {
        match self {
            Branching::Fuzzy { values, partition } => {
                for (child, degree) in partition.activation(values[row]).nonzero() {
                    emit(child, degree);
                }
            }
            Branching::Crisp { values, .. } => emit(values[row] as usize, 1.0),
        }
    }
}

/// A weighted example inside a node: row index and matching degree.
type WeightedRow = (u32, f64);

struct Grower<'a> {
    labels: &'a [usize],
    branchings: Vec<Branching<'a>>,
    num_classes: usize,
    n_total: f64,
    hp: &'a Hyperparameters,
}

struct Candidate {
    attribute: usize,
    offset: usize,
}

/// Grows a tree on an already transformed dataset.
///
/// `partitions` holds one partition per continuous attribute; continuous
/// values are expected in [0, 1].
pub fn grow_tree(
    transformed: &Dataset,
    partitions: &[FuzzyPartition],
    hp: &Hyperparameters,
) -> Result<TreeNode, FmdtError> {
    hp.validate()?;
    if transformed.num_attributes() == 0 {
        return Err(FmdtError::NoAttributes);
    }
    let mut branchings = Vec::with_capacity(transformed.num_attributes());
    for attr in transformed.schema() {
        branchings.push(match transformed.column(attr.index) {
            Column::Continuous(values) => {
                let partition = partitions
                    .iter()
                    .find(|p| p.attribute_index == attr.index)
                    .ok_or_else(|| {
                        FmdtError::SchemaMismatch(format!(
                            "no fuzzy partition for continuous attribute '{}'",
                            attr.name
                        ))
                    })?;
                Branching::Fuzzy { values, partition }
            }
            Column::Categorical(values) => Branching::Crisp {
                values,
                categories: attr.kind.category_count().unwrap_or(0),
            },
        });
    }

    let grower = Grower {
        labels: transformed.labels(),
        branchings,
        num_classes: transformed.num_classes(),
        n_total: transformed.num_rows() as f64,
        hp,
    };
    let rows: Vec<WeightedRow> = (0..transformed.num_rows() as u32)
        .map(|r| (r, 1.0))
        .collect();
    let stats = grower.class_totals(&rows);
    let mut used = vec![false; transformed.num_attributes()];
    let uniform = vec![1.0 / grower.num_classes as f64; grower.num_classes];
    grower.grow(rows, stats, 0, &mut used, &uniform)
}

impl Grower<'_> {
    fn class_totals(&self, rows: &[WeightedRow]) -> Vec<f64> {
        ordered_chunk_sum(rows, self.num_classes, |chunk, acc| {
            for &(r, w) in chunk {
                acc[self.labels[r as usize]] += w;
            }
        })
    }

    fn leaf(&self, stats: &[f64], fallback: &[f64], depth: usize) -> TreeNode {
        let stats = NodeStats(stats.to_vec());
        TreeNode::Leaf {
            class_weights: class_weights(&stats, fallback),
            cardinality: stats.total(),
            depth,
        }
    }

    fn grow(
        &self,
        rows: Vec<WeightedRow>,
        stats: Vec<f64>,
        depth: usize,
        used: &mut Vec<bool>,
        fallback: &[f64],
    ) -> Result<TreeNode, FmdtError> {
        let node_stats = NodeStats(stats);
        let total = node_stats.total();
        let max_class = node_stats.0.iter().cloned().fold(0.0, f64::max);
        let stop = depth >= self.hp.max_depth
            || max_class / total >= 1.0 - self.hp.gamma
            || total < self.hp.phi * self.n_total
            || used.iter().all(|&u| u);
        if stop {
            return Ok(self.leaf(&node_stats.0, fallback, depth));
        }

        let m = self.num_classes;
        let mut candidates = Vec::new();
        let mut width = 0;
        for (attribute, b) in self.branchings.iter().enumerate() {
            if !used[attribute] {
                candidates.push(Candidate {
                    attribute,
                    offset: width,
                });
                width += b.arity() * m;
            }
        }

        // child class cardinalities for every candidate, in one pass
        let tnorm = self.hp.tnorm;
        let acc = ordered_chunk_sum(&rows, width, |chunk, acc| {
            for &(r, w) in chunk {
                let (row, class) = (r as usize, self.labels[r as usize]);
                for c in &candidates {
                    self.branchings[c.attribute].for_each_child(row, |child, mu| {
                        acc[c.offset + child * m + class] += matching_degree(tnorm, mu, w);
                    });
                }
            }
        });

        let mut best: Option<(&Candidate, f64)> = None;
        for c in &candidates {
            let arity = self.branchings[c.attribute].arity();
            let children: Vec<NodeStats> = acc[c.offset..c.offset + arity * m]
                .chunks(m)
                .map(|s| NodeStats(s.to_vec()))
                .collect();
            let gain = fuzzy_info_gain(&node_stats, &children)?;
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((c, gain));
            }
        }
        let (chosen, gain) = best.expect("at least one unused attribute");
        if gain <= 0.0 {
            return Ok(self.leaf(&node_stats.0, fallback, depth));
        }

        let branching = &self.branchings[chosen.attribute];
        let arity = branching.arity();
        let mut child_rows: Vec<Vec<WeightedRow>> = vec![Vec::new(); arity];
        for &(r, w) in &rows {
            branching.for_each_child(r as usize, |child, mu| {
                let md = matching_degree(tnorm, mu, w);
                if md > 0.0 {
                    child_rows[child].push((r, md));
                }
            });
        }
        drop(rows);

        let proportions = node_stats
            .proportions()
            .expect("split nodes have positive cardinality");
        let min_child = self.hp.lambda * self.n_total;
        used[chosen.attribute] = true;
        let mut children = Vec::with_capacity(arity);
        for (j, rows_j) in child_rows.into_iter().enumerate() {
            let start = chosen.offset + j * m;
            let child_stats = acc[start..start + m].to_vec();
            let child_total: f64 = child_stats.iter().sum();
            children.push(if child_total < min_child {
                self.leaf(&child_stats, &proportions, depth + 1)
            } else {
                self.grow(rows_j, child_stats, depth + 1, used, &proportions)?
            });
        }
        used[chosen.attribute] = false;

        Ok(TreeNode::Internal {
            attribute_index: chosen.attribute,
            cardinality: total,
            gain,
            children,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{AttributeKind, AttributeSchema};

    fn continuous_ds(columns: Vec<Vec<f64>>, labels: Vec<usize>, classes: usize) -> Dataset {
        let schema = (0..columns.len())
            .map(|i| AttributeSchema {
                name: format!("x{i}"),
                index: i,
                kind: AttributeKind::Continuous,
            })
            .collect();
        Dataset::new(
            schema,
            (0..classes).map(|c| format!("c{c}")).collect(),
            columns.into_iter().map(Column::Continuous).collect(),
            labels,
        )
        .unwrap()
    }

    fn partitions(f: usize, t: usize) -> Vec<FuzzyPartition> {
        (0..f)
            .map(|a| FuzzyPartition::uniform(a, t).unwrap())
            .collect()
    }

    fn loose() -> Hyperparameters {
        Hyperparameters {
            phi: 1e-6,
            lambda: 1e-6,
            ..Default::default()
        }
    }

    #[test]
    fn single_class_is_a_root_leaf() {
        let ds = continuous_ds(vec![vec![0.1, 0.5, 0.9]], vec![1, 1, 1], 2);
        let tree = grow_tree(&ds, &partitions(1, 3), &Hyperparameters::default()).unwrap();
        assert_eq!(
            tree,
            TreeNode::Leaf {
                class_weights: vec![0.0, 1.0],
                cardinality: 3.0,
                depth: 0
            }
        );
    }

    #[test]
    fn depth_zero_gives_priors() {
        let ds = continuous_ds(vec![vec![0.0, 0.2, 0.4, 1.0]], vec![0, 1, 1, 1], 2);
        let hp = Hyperparameters {
            max_depth: 0,
            ..loose()
        };
        let tree = grow_tree(&ds, &partitions(1, 2), &hp).unwrap();
        assert_eq!(
            tree,
            TreeNode::Leaf {
                class_weights: vec![0.25, 0.75],
                cardinality: 4.0,
                depth: 0
            }
        );
    }

    #[test]
    fn crisp_xor_is_learned_exactly() {
        // XOR on the corners of the unit square; uneven corner counts give
        // the first split a positive gain
        let corners = [
            ((0.0, 0.0), 3),
            ((0.0, 1.0), 1),
            ((1.0, 0.0), 2),
            ((1.0, 1.0), 2),
        ];
        let (mut a, mut b, mut y) = (Vec::new(), Vec::new(), Vec::new());
        for ((x0, x1), count) in corners {
            for _ in 0..count {
                a.push(x0);
                b.push(x1);
                y.push(usize::from(x0 != x1));
            }
        }
        let ds = continuous_ds(vec![a, b], y, 2);
        let tree = grow_tree(&ds, &partitions(2, 2), &loose()).unwrap();
        assert_eq!(tree.depth(), 2);
        let TreeNode::Internal {
            attribute_index, ..
        } = &tree
        else {
            panic!()
        };
        assert_eq!(*attribute_index, 0);
        let leaves = tree.leaves();
        assert_eq!(leaves.len(), 4);
        let cards: Vec<f64> = leaves.iter().map(|l| l.cardinality()).collect();
        assert_eq!(cards, vec![3.0, 1.0, 2.0, 2.0]);
        for leaf in leaves {
            let TreeNode::Leaf { class_weights, .. } = leaf else {
                unreachable!()
            };
            assert!(class_weights.contains(&1.0));
        }
    }

    #[test]
    fn categorical_split_has_one_child_per_category() {
        let schema = vec![AttributeSchema {
            name: "c".into(),
            index: 0,
            kind: AttributeKind::Categorical(vec!["r".into(), "g".into(), "b".into()]),
        }];
        let ds = Dataset::new(
            schema,
            vec!["n".into(), "p".into()],
            vec![Column::Categorical(vec![0, 0, 1, 1])],
            vec![0, 0, 1, 1],
        )
        .unwrap();
        let tree = grow_tree(&ds, &[], &loose()).unwrap();
        let TreeNode::Internal { children, gain, .. } = &tree else {
            panic!("{tree:?}")
        };
        assert_eq!(children.len(), 3);
        assert_eq!(*gain, 1.0);
        // the unseen category inherits the parent's proportions
        assert_eq!(
            children[2],
            TreeNode::Leaf {
                class_weights: vec![0.5, 0.5],
                cardinality: 0.0,
                depth: 1
            }
        );
    }

    #[test]
    fn lambda_prunes_light_children() {
        // one row sits near the upper core; its child weighs 0.9 < lambda * N
        let mut x = vec![0.0; 9];
        x.push(0.95);
        let y = vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 1];
        let ds = continuous_ds(vec![x, vec![0.5; 10]], y, 2);
        let hp = Hyperparameters {
            lambda: 0.096,
            gamma: 1e-9,
            ..loose()
        };
        let tree = grow_tree(&ds, &partitions(2, 2), &hp).unwrap();
        let TreeNode::Internal {
            attribute_index,
            children,
            ..
        } = &tree
        else {
            panic!()
        };
        assert_eq!(*attribute_index, 0);
        assert!(children.iter().all(TreeNode::is_leaf));
        let TreeNode::Leaf {
            class_weights,
            cardinality,
            ..
        } = &children[1]
        else {
            panic!()
        };
        assert!((cardinality - 0.95).abs() < 1e-12);
        assert!((class_weights[1] - 0.95 / 0.95).abs() < 1e-12);
    }

    #[test]
    fn missing_partition_is_an_error() {
        let ds = continuous_ds(vec![vec![0.1, 0.9]], vec![0, 1], 2);
        assert!(matches!(
            grow_tree(&ds, &[], &loose()),
            Err(FmdtError::SchemaMismatch(_))
        ));
    }
}
