//! Randomized binary classification trees over a feature matrix.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::intervals::FeatureMatrix;

/// Splits whose gain does not exceed this are treated as no split.
const MIN_GAIN: f64 = 1e-12;

/// Base-2 Shannon entropy of a label vector.
pub fn entropy(labels: &[usize]) -> f64 {
    let c = labels.iter().copied().max().map_or(0, |k| k + 1);
    let mut counts = vec![0usize; c];
    for &k in labels {
        counts[k] += 1;
    }
    entropy_of_counts(&counts, labels.len())
}

pub(crate) fn entropy_of_counts(counts: &[usize], total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum()
}

/// Entropy of `parent` minus the size-weighted entropies of the two sides.
pub fn information_gain(parent: &[usize], left: &[usize], right: &[usize]) -> Result<f64> {
    if left.is_empty() || right.is_empty() {
        return Err(Error::DegenerateSplit);
    }
    if left.len() + right.len() != parent.len() {
        return Err(Error::LengthMismatch {
            left: left.len() + right.len(),
            right: parent.len(),
        });
    }
    let n = parent.len() as f64;
    Ok(entropy(parent)
        - (left.len() as f64 / n) * entropy(left)
        - (right.len() as f64 / n) * entropy(right))
}

fn gain_of_counts(parent: &[usize], left: &[usize], n: usize, n_left: usize, scratch: &mut [usize]) -> f64 {
    for ((r, &p), &l) in scratch.iter_mut().zip(parent).zip(left) {
        *r = p - l;
    }
    let h = entropy_of_counts(parent, n);
    let nf = n as f64;
    h - (n_left as f64 / nf) * entropy_of_counts(left, n_left)
        - ((n - n_left) as f64 / nf) * entropy_of_counts(scratch, n - n_left)
}

/// How split candidates are generated at each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitMode {
    /// `k` random features, one uniform random cut-point each.
    #[default]
    ExtraTrees,
    /// One random feature with one uniform random cut-point.
    ExtraTreesSingle,
    /// `k` random features, best threshold of each.
    RandomForest,
    /// Every feature, best threshold of each.
    RandomForestAll,
}

impl SplitMode {
    pub fn code(self) -> &'static str {
        match self {
            SplitMode::ExtraTrees => "et",
            SplitMode::ExtraTreesSingle => "et1",
            SplitMode::RandomForest => "rf",
            SplitMode::RandomForestAll => "rf-all",
        }
    }
}

impl fmt::Display for SplitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "et" => Ok(SplitMode::ExtraTrees),
            "et1" => Ok(SplitMode::ExtraTreesSingle),
            "rf" => Ok(SplitMode::RandomForest),
            "rf-all" | "rf_all" => Ok(SplitMode::RandomForestAll),
            _ => Err(Error::InvalidConfig(format!("unknown split mode {s:?}"))),
        }
    }
}

/// Number of candidate features examined per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CandidateRule {
    /// `ceil(sqrt(|pool|))`.
    #[default]
    Sqrt,
    Fixed(usize),
}

impl CandidateRule {
    pub fn resolve(self, n_features: usize) -> usize {
        let k = match self {
            CandidateRule::Sqrt => (n_features as f64).sqrt().ceil() as usize,
            CandidateRule::Fixed(k) => k,
        };
        k.clamp(1, n_features.max(1))
    }
}

impl fmt::Display for CandidateRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CandidateRule::Sqrt => f.write_str("sqrt"),
            CandidateRule::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for CandidateRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "sqrt" {
            return Ok(CandidateRule::Sqrt);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(CandidateRule::Fixed(k)),
            _ => Err(Error::InvalidConfig(format!("invalid candidate rule {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TreeNode {
    Split {
        feature: usize,
        cut: f64,
        left: usize,
        right: usize,
        gain: f64,
        count: usize,
    },
    Leaf {
        label: usize,
        count: usize,
    },
}

impl TreeNode {
    pub fn count(&self) -> usize {
        match *self {
            TreeNode::Split { count, .. } | TreeNode::Leaf { count, .. } => count,
        }
    }
}

/// Tree stored as a pre-order node arena; node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    n_train: usize,
}

impl Tree {
    pub fn from_nodes(nodes: Vec<TreeNode>, n_train: usize) -> Result<Self> {
        if nodes.is_empty() || n_train == 0 {
            return Err(Error::CorruptModel("empty tree".into()));
        }
        for (i, node) in nodes.iter().enumerate() {
            if let TreeNode::Split { left, right, .. } = *node {
                if left <= i || right <= i || left >= nodes.len() || right >= nodes.len() {
                    return Err(Error::CorruptModel(format!("bad child link at node {i}")));
                }
            }
        }
        Ok(Tree { nodes, n_train })
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    /// Fraction of training series reaching `node`.
    pub fn reach_fraction(&self, node: usize) -> f64 {
        self.nodes[node].count() as f64 / self.n_train as f64
    }

    /// Routes one series, reading feature values through `value`.
    pub fn predict_with(&self, value: impl Fn(usize) -> f64) -> usize {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { label, .. } => return label,
                TreeNode::Split {
                    feature,
                    cut,
                    left,
                    right,
                    ..
                } => at = if value(feature) <= cut { left } else { right },
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], at: usize) -> usize {
            match nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}

/// Parameters of one tree growth.
#[derive(Debug, Clone, Copy)]
pub struct TreeParams {
    pub split_mode: SplitMode,
    pub candidates: CandidateRule,
    pub n_classes: usize,
}

struct Grower<'a, R: ?Sized> {
    matrix: &'a FeatureMatrix,
    labels: &'a [usize],
    params: TreeParams,
    k: usize,
    rng: &'a mut R,
    // persists across nodes; each node runs a fresh partial Fisher-Yates
    perm: Vec<usize>,
    nodes: Vec<TreeNode>,
    pairs: Vec<(f64, usize)>,
}

#[derive(Debug, Clone, Copy)]
struct BestSplit {
    feature: usize,
    cut: f64,
    gain: f64,
}

/// Grows one tree on the series `samples` of `matrix`.
///
/// A node becomes a leaf, labeled with its majority class (ties to the
/// smallest index), when it is pure, holds fewer than two series, or no
/// candidate split has positive gain.
pub fn create_random_tree<R: Rng + ?Sized>(
    matrix: &FeatureMatrix,
    labels: &[usize],
    samples: &[usize],
    params: TreeParams,
    rng: &mut R,
) -> Result<Tree> {
    if samples.is_empty() {
        return Err(Error::InvalidConfig("cannot grow a tree on zero samples".into()));
    }
    if matrix.n_features() == 0 {
        return Err(Error::NoCandidateFeatures);
    }
    let k = match params.split_mode {
        SplitMode::ExtraTreesSingle => 1,
        SplitMode::RandomForestAll => matrix.n_features(),
        _ => params.candidates.resolve(matrix.n_features()),
    };
    let mut grower = Grower {
        matrix,
        labels,
        params,
        k,
        rng,
        perm: (0..matrix.n_features()).collect(),
        nodes: Vec::new(),
        pairs: Vec::with_capacity(samples.len()),
    };
    let mut samples = samples.to_vec();
    grower.grow(&mut samples);
    Ok(Tree {
        nodes: grower.nodes,
        n_train: samples.len(),
    })
}

impl<R: Rng + ?Sized> Grower<'_, R> {
    fn grow(&mut self, samples: &mut [usize]) -> usize {
        let c = self.params.n_classes;
        let mut counts = vec![0usize; c];
        for &i in samples.iter() {
            counts[self.labels[i]] += 1;
        }
        let id = self.nodes.len();
        let majority = counts
            .iter()
            .enumerate()
            .fold(0, |best, (k, &n)| if n > counts[best] { k } else { best });
        let leaf = TreeNode::Leaf {
            label: majority,
            count: samples.len(),
        };
        let pure = counts.iter().filter(|&&n| n > 0).count() <= 1;
        if pure || samples.len() < 2 {
            self.nodes.push(leaf);
            return id;
        }
        let Some(best) = self.best_split(samples, &counts) else {
            self.nodes.push(leaf);
            return id;
        };

        let column = self.matrix.column(best.feature);
        let mut split = 0;
        for j in 0..samples.len() {
            if column[samples[j]] <= best.cut {
                samples.swap(split, j);
                split += 1;
            }
        }
        debug_assert!(split > 0 && split < samples.len());

        self.nodes.push(leaf);
        let (lhs, rhs) = samples.split_at_mut(split);
        let left = self.grow(lhs);
        let right = self.grow(rhs);
        self.nodes[id] = TreeNode::Split {
            feature: best.feature,
            cut: best.cut,
            left,
            right,
            gain: best.gain,
            count: lhs.len() + rhs.len(),
        };
        id
    }

    fn best_split(&mut self, samples: &[usize], counts: &[usize]) -> Option<BestSplit> {
        let n_features = self.perm.len();
        let mut best: Option<BestSplit> = None;
        let mut left_counts = vec![0usize; counts.len()];
        let mut scratch = vec![0usize; counts.len()];
        let mut visited = 0;

        for i in 0..n_features {
            if visited == self.k {
                break;
            }
            let feature = if self.params.split_mode == SplitMode::RandomForestAll {
                i
            } else {
                let j = self.rng.random_range(i..n_features);
                self.perm.swap(i, j);
                self.perm[i]
            };
            let column = self.matrix.column(feature);
            let (lo, hi) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| {
                (lo.min(column[s]), hi.max(column[s]))
            });
            if lo >= hi {
                continue;
            }
            visited += 1;

            let candidate = match self.params.split_mode {
                SplitMode::ExtraTrees | SplitMode::ExtraTreesSingle => {
                    let mut cut = self.rng.random_range(lo..hi);
                    if cut >= hi {
                        cut = lo;
                    }
                    left_counts.fill(0);
                    let mut n_left = 0;
                    for &s in samples {
                        if column[s] <= cut {
                            left_counts[self.labels[s]] += 1;
                            n_left += 1;
                        }
                    }
                    let gain = gain_of_counts(counts, &left_counts, samples.len(), n_left, &mut scratch);
                    BestSplit { feature, cut, gain }
                }
                SplitMode::RandomForest | SplitMode::RandomForestAll => {
                    self.best_threshold(feature, samples, counts, &mut left_counts, &mut scratch)
                }
            };
            if candidate.gain > MIN_GAIN && best.is_none_or(|b| candidate.gain > b.gain) {
                best = Some(candidate);
            }
        }
        best
    }

    fn best_threshold(
        &mut self,
        feature: usize,
        samples: &[usize],
        counts: &[usize],
        left_counts: &mut [usize],
        scratch: &mut [usize],
    ) -> BestSplit {
        let column = self.matrix.column(feature);
        self.pairs.clear();
        self.pairs.extend(samples.iter().map(|&s| (column[s], self.labels[s])));
        self.pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        left_counts.fill(0);
        let n = samples.len();
        let mut best = BestSplit {
            feature,
            cut: f64::NAN,
            gain: f64::NEG_INFINITY,
        };
        for j in 0..n - 1 {
            left_counts[self.pairs[j].1] += 1;
            let (a, b) = (self.pairs[j].0, self.pairs[j + 1].0);
            if a == b {
                continue;
            }
            let gain = gain_of_counts(counts, left_counts, n, j + 1, scratch);
            if gain > best.gain {
                let mid = a + (b - a) / 2.0;
                best.cut = if mid < b { mid } else { a };
                best.gain = gain;
            }
        }
        best
    }
}
