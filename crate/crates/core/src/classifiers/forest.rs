//! Probability random forest: CART trees with Gini splits on bootstrap resamples.
//!
//! Each tree is grown on a multiset of training rows. Rows are first put in
//! a canonical, content-keyed order, and both the bootstrap draw and the
//! per-split feature sampling consume a per-tree stream in that order, so
//! permuting the training rows leaves the fitted forest unchanged.
//!
//! A node becomes a leaf when its in-bag weight is at most `min_leaf`, when
//! it is pure, or when no candidate split lowers the weighted Gini impurity.
//! Leaves store the in-bag share of label-1 rows; the forest prediction is
//! the mean of the leaf shares over trees.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::classifiers::{canonical_order, check_inputs, default_epsilon, ClassifierSpec, ProbEstimate};
use crate::error::Result;
use crate::matrix::{LabeledDataset, SampleMatrix};
use crate::rng::RngStream;

const FOREST_STREAM: u64 = 0x666f_7265_7374;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
struct Tree {
    nodes: Vec<Node>,
    /// Bootstrap multiplicity of every training row (original indexing).
    inbag: Vec<u32>,
}

impl Tree {
    fn predict(&self, x: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => at = if x[feature] <= threshold { left } else { right },
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomForest {
    trees: Vec<Tree>,
    dim: usize,
}

/// Scratch entry for one in-bag row at a node.
#[derive(Clone, Copy)]
struct Entry {
    row: usize,
    weight: u32,
}

struct Grower<'a> {
    x: &'a SampleMatrix,
    y: &'a [u8],
    mtry: usize,
    min_leaf: usize,
}

impl Grower<'_> {
    fn grow(&self, mut entries: Vec<Entry>, rng: &mut impl Rng) -> Vec<Node> {
        let mut nodes = Vec::new();
        // (slot, entries); left children are popped first
        let mut stack = vec![(0usize, std::mem::take(&mut entries))];
        nodes.push(Node::Leaf { value: 0.0 });
        let mut column: Vec<(f64, u32, u32)> = Vec::new();
        while let Some((slot, entries)) = stack.pop() {
            let (total, ones) = entries.iter().fold((0u64, 0u64), |(t, o), e| {
                (
                    t + u64::from(e.weight),
                    o + u64::from(e.weight) * u64::from(self.y[e.row]),
                )
            });
            let value = ones as f64 / total as f64;
            if total as usize <= self.min_leaf || ones == 0 || ones == total {
                nodes[slot] = Node::Leaf { value };
                continue;
            }
            match self.best_split(&entries, total, ones, rng, &mut column) {
                Some((feature, threshold)) => {
                    let (l, r): (Vec<Entry>, Vec<Entry>) = entries
                        .into_iter()
                        .partition(|e| self.x.get(e.row, feature) <= threshold);
                    let left = nodes.len();
                    nodes.push(Node::Leaf { value: 0.0 });
                    let right = nodes.len();
                    nodes.push(Node::Leaf { value: 0.0 });
                    nodes[slot] = Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    };
                    stack.push((right, r));
                    stack.push((left, l));
                }
                None => nodes[slot] = Node::Leaf { value },
            }
        }
        nodes
    }

    /// Best Gini split over `mtry` sampled features, if any improves on the parent.
    fn best_split(
        &self,
        entries: &[Entry],
        total: u64,
        ones: u64,
        rng: &mut impl Rng,
        column: &mut Vec<(f64, u32, u32)>,
    ) -> Option<(usize, f64)> {
        // Maximizing Σ_child (w₁² + w₀²)/w is minimizing weighted Gini impurity.
        let purity = |w: u64, w1: u64| {
            let w0 = w - w1;
            ((w1 * w1 + w0 * w0) as f64) / w as f64
        };
        let parent = purity(total, ones);
        let mut best: Option<(f64, usize, f64)> = None;
        let features = index::sample(rng, self.x.cols(), self.mtry);
        for feature in features.iter() {
            column.clear();
            column.extend(
                entries
                    .iter()
                    .map(|e| (self.x.get(e.row, feature), e.weight, u32::from(self.y[e.row]))),
            );
            column.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let (mut left_w, mut left_ones) = (0u64, 0u64);
            for k in 0..column.len() - 1 {
                let (v, w, y) = column[k];
                left_w += u64::from(w);
                left_ones += u64::from(w) * u64::from(y);
                let next = column[k + 1].0;
                if next <= v {
                    continue;
                }
                let score = purity(left_w, left_ones) + purity(total - left_w, ones - left_ones);
                if best.is_none_or(|(s, _, _)| score > s) {
                    let mut threshold = 0.5 * (v + next);
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some((score, feature, threshold));
                }
            }
        }
        best.filter(|&(score, _, _)| score > parent * (1.0 + 1e-12))
            .map(|(_, f, t)| (f, t))
    }
}

impl RandomForest {
    pub fn fit(spec: &ClassifierSpec, train: &LabeledDataset) -> Result<Self> {
        spec.validate()?;
        let x = train.features();
        let rows = train.len();
        let grower = Grower {
            x,
            y: train.labels(),
            mtry: spec.forest_mtry.resolve(x.cols())?,
            min_leaf: spec.forest_min_leaf,
        };
        let order = canonical_order(train);
        let root = RngStream::new(spec.seed, FOREST_STREAM);
        let trees = (0..spec.forest_trees)
            .into_par_iter()
            .map(|t| {
                let mut rng = root.substream(t as u64).rng();
                let mut inbag = vec![0u32; rows];
                if spec.forest_bootstrap {
                    for _ in 0..rows {
                        inbag[order[rng.random_range(0..rows)]] += 1;
                    }
                } else {
                    inbag.iter_mut().for_each(|c| *c = 1);
                }
                let entries = order
                    .iter()
                    .filter(|&&i| inbag[i] > 0)
                    .map(|&i| Entry {
                        row: i,
                        weight: inbag[i],
                    })
                    .collect();
                let nodes = grower.grow(entries, &mut rng);
                Tree { nodes, inbag }
            })
            .collect();
        Ok(RandomForest { trees, dim: x.cols() })
    }

    pub fn num_trees(&self) -> usize {
        self.trees.len()
    }

    /// Mean leaf share over trees, unclipped.
    pub fn predict_raw(&self, eval: &SampleMatrix) -> Vec<f64> {
        assert_eq!(eval.cols(), self.dim);
        eval.iter_rows()
            .map(|x| self.trees.iter().map(|t| t.predict(x)).sum::<f64>() / self.trees.len() as f64)
            .collect()
    }

    /// Out-of-bag estimate for each training row: the mean over trees whose
    /// bootstrap left that row out, or `None` when every tree used it.
    pub fn oob_proba(&self, train: &SampleMatrix) -> Vec<Option<f64>> {
        train
            .iter_rows()
            .enumerate()
            .map(|(i, x)| {
                let (sum, count) = self
                    .trees
                    .iter()
                    .filter(|t| t.inbag[i] == 0)
                    .fold((0.0, 0usize), |(s, c), t| (s + t.predict(x), c + 1));
                (count > 0).then(|| sum / count as f64)
            })
            .collect()
    }
}

pub fn forest_fit_predict(spec: &ClassifierSpec, train: &LabeledDataset, eval: &SampleMatrix) -> Result<ProbEstimate> {
    check_inputs(train, eval)?;
    let forest = RandomForest::fit(spec, train)?;
    Ok(ProbEstimate::clipped(
        forest.predict_raw(eval),
        default_epsilon(train.len()),
    ))
}
