//! Test-only reference implementations.
#![allow(dead_code)]

use fmdt_core::dataset::Column;
use fmdt_core::{Dataset, FmdtModel, FuzzyPartition, Hyperparameters, TreeNode};

/// Naive nearest-rank quantiles: full sort, direct indexing, collapse ties.
pub fn nearest_rank_anchors(values: &[f64], q: usize) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let q = q.min(n);
    let mut anchors: Vec<(f64, f64)> = Vec::new();
    for i in 1..q {
        let rank = ((i * n) as f64 / q as f64).ceil() as usize;
        let v = sorted[rank - 1];
        let level = i as f64 / q as f64;
        if anchors.last().is_some_and(|a| a.0 == v) {
            anchors.last_mut().unwrap().1 = level;
        } else {
            anchors.push((v, level));
        }
    }
    anchors
}

/// Kolmogorov-Smirnov distance to U(0, 1) from the sorted sample.
pub fn ks_uniform_sorted(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &u)| {
            let above = (i + 1) as f64 / n - u;
            let below = u - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Same statistic by brute force: the empirical CDF is evaluated by
/// counting at every sample point (both one-sided limits). O(n^2).
pub fn ks_uniform_brute(sample: &[f64]) -> f64 {
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for &u in sample {
        let at_or_below = sample.iter().filter(|&&v| v <= u).count() as f64 / n;
        let below = sample.iter().filter(|&&v| v < u).count() as f64 / n;
        d = d.max((at_or_below - u).abs()).max((u - below).abs());
    }
    d
}

/// Reference tree, grown with dense matching-degree vectors over all rows.
#[derive(Debug)]
pub enum RefNode {
    Split {
        attribute: usize,
        gain: f64,
        cardinality: f64,
        children: Vec<RefNode>,
    },
    Leaf {
        weights: Vec<f64>,
        cardinality: f64,
    },
}

pub struct Reference<'a> {
    pub data: &'a Dataset,
    pub partitions: &'a [FuzzyPartition],
    pub hp: &'a Hyperparameters,
}

fn entropy(stats: &[f64]) -> f64 {
    let mut total = 0.0;
    for &s in stats {
        total += s;
    }
    let mut h = 0.0;
    for &s in stats {
        if s > 0.0 {
            let p = s / total;
            h += -p * p.log2();
        }
    }
    h
}

impl Reference<'_> {
    fn membership(&self, attribute: usize, child: usize, row: usize) -> f64 {
        match self.data.column(attribute) {
            Column::Continuous(v) => {
                let p = self
                    .partitions
                    .iter()
                    .find(|p| p.attribute_index == attribute)
                    .unwrap();
                p.sets()[child].membership(v[row].clamp(0.0, 1.0))
            }
            Column::Categorical(v) => {
                if v[row] as usize == child {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn arity(&self, attribute: usize) -> usize {
        self.data.schema()[attribute]
            .kind
            .category_count()
            .unwrap_or(self.hp.fuzzy_sets)
    }

    fn stats(&self, md: &[f64]) -> Vec<f64> {
        let mut s = vec![0.0; self.data.num_classes()];
        for (row, &label) in self.data.labels().iter().enumerate() {
            s[label] += md[row];
        }
        s
    }

    fn leaf(stats: &[f64], fallback: &[f64]) -> RefNode {
        let mut total = 0.0;
        for &s in stats {
            total += s;
        }
        let weights = if total > 0.0 {
            stats.iter().map(|s| s / total).collect()
        } else {
            fallback.to_vec()
        };
        RefNode::Leaf {
            weights,
            cardinality: total,
        }
    }

    pub fn build(&self) -> RefNode {
        let n = self.data.num_rows();
        let md = vec![1.0; n];
        let m = self.data.num_classes();
        let used = vec![false; self.data.num_attributes()];
        self.grow(&md, self.stats(&md), 0, &used, &vec![1.0 / m as f64; m])
    }

    fn grow(
        &self,
        md: &[f64],
        stats: Vec<f64>,
        depth: usize,
        used: &[bool],
        fallback: &[f64],
    ) -> RefNode {
        let n = self.data.num_rows() as f64;
        let mut total = 0.0;
        let mut max = 0.0f64;
        for &s in &stats {
            total += s;
            max = max.max(s);
        }
        if depth >= self.hp.max_depth
            || max / total >= 1.0 - self.hp.gamma
            || total < self.hp.phi * n
            || used.iter().all(|&u| u)
        {
            return Self::leaf(&stats, fallback);
        }

        let parent_entropy = entropy(&stats);
        let mut best: Option<(usize, f64, Vec<Vec<f64>>)> = None;
        for (attribute, _) in used.iter().enumerate().filter(|(_, &u)| !u) {
            let mut children_md = Vec::new();
            for child in 0..self.arity(attribute) {
                let child_md: Vec<f64> = (0..md.len())
                    .map(|row| self.membership(attribute, child, row) * md[row])
                    .collect();
                children_md.push(child_md);
            }
            let mut weighted = 0.0;
            for cmd in &children_md {
                let cs = self.stats(cmd);
                let mut ct = 0.0;
                for &s in &cs {
                    ct += s;
                }
                if ct > 0.0 {
                    weighted += ct / total * entropy(&cs);
                }
            }
            let gain = parent_entropy - weighted;
            if best.as_ref().is_none_or(|b| gain > b.1) {
                best = Some((attribute, gain, children_md));
            }
        }
        let (attribute, gain, children_md) = best.unwrap();
        if gain <= 0.0 {
            return Self::leaf(&stats, fallback);
        }

        let proportions: Vec<f64> = stats.iter().map(|s| s / total).collect();
        let mut child_used = used.to_vec();
        child_used[attribute] = true;
        let children = children_md
            .iter()
            .map(|cmd| {
                let cs = self.stats(cmd);
                let mut ct = 0.0;
                for &s in &cs {
                    ct += s;
                }
                if ct < self.hp.lambda * n {
                    Self::leaf(&cs, &proportions)
                } else {
                    self.grow(cmd, cs, depth + 1, &child_used, &proportions)
                }
            })
            .collect();
        RefNode::Split {
            attribute,
            gain,
            cardinality: total,
            children,
        }
    }
}

/// Compares a fitted tree with the reference; returns the first difference.
pub fn compare_trees(actual: &TreeNode, expected: &RefNode, gain_tol: f64) -> Result<(), String> {
    match (actual, expected) {
        (
            TreeNode::Internal {
                attribute_index,
                gain,
                cardinality,
                children,
            },
            RefNode::Split {
                attribute,
                gain: g,
                cardinality: c,
                children: rc,
            },
        ) => {
            if attribute_index != attribute {
                return Err(format!(
                    "split attribute {attribute_index} vs reference {attribute}"
                ));
            }
            if (gain - g).abs() > gain_tol {
                return Err(format!("gain {gain} vs reference {g}"));
            }
            if cardinality != c {
                return Err(format!("cardinality {cardinality} vs reference {c}"));
            }
            if children.len() != rc.len() {
                return Err("child count differs".into());
            }
            for (a, e) in children.iter().zip(rc) {
                compare_trees(a, e, gain_tol)?;
            }
            Ok(())
        }
        (
            TreeNode::Leaf {
                class_weights,
                cardinality,
                ..
            },
            RefNode::Leaf {
                weights,
                cardinality: c,
            },
        ) => {
            if class_weights != weights {
                return Err(format!(
                    "leaf weights {class_weights:?} vs reference {weights:?}"
                ));
            }
            if cardinality != c {
                return Err(format!("leaf cardinality {cardinality} vs reference {c}"));
            }
            Ok(())
        }
        (a, e) => Err(format!("node kind differs: {a:?} vs {e:?}")),
    }
}

/// Depth bound, path uniqueness, cardinality conservation and the leaf
/// count bound for continuous-only data.
pub fn check_structure(model: &FmdtModel) -> Result<(), String> {
    let hp = model.hyperparameters();
    let mut problem: Option<String> = None;
    model.root().walk(&mut |node, depth, path| {
        if problem.is_some() {
            return;
        }
        if depth > hp.max_depth {
            problem = Some(format!("node at depth {depth} > {}", hp.max_depth));
            return;
        }
        if let TreeNode::Internal {
            attribute_index,
            cardinality,
            children,
            gain,
        } = node
        {
            if path.contains(attribute_index) {
                problem = Some(format!("attribute {attribute_index} repeats on a path"));
            } else if *gain <= 0.0 {
                problem = Some(format!("split with non-positive gain {gain}"));
            } else {
                let sum: f64 = children.iter().map(TreeNode::cardinality).sum();
                let rel = (sum - cardinality).abs() / cardinality;
                if rel > 1e-6 {
                    problem = Some(format!("children sum {sum} vs parent {cardinality}"));
                }
            }
        }
    });
    if let Some(p) = problem {
        return Err(p);
    }
    let continuous_only = model.schema().iter().all(|a| a.kind.is_continuous());
    let leaves = model.complexity().leaf_count;
    if continuous_only {
        let bound = (hp.fuzzy_sets as u128).pow(hp.max_depth as u32);
        if leaves as u128 > bound {
            return Err(format!("{leaves} leaves > T^max_depth = {bound}"));
        }
    }
    Ok(())
}
