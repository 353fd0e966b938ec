//! Training and prediction for the full ensemble.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use crate::aggregate::Aggregation;
use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::intervals::{
    build_feature_pool, evaluate_features, evaluate_pool, ExtractionConfig, FeaturePool,
    IndexedRepresentations, PartitionMode, Target,
};
use crate::representations::{build_representation_set, Representation, RepresentationSet};
use crate::seed::{derived_rng, Stream};
use crate::tree::{create_random_tree, CandidateRule, SplitMode, Tree, TreeNode, TreeParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainConfig {
    pub trees: usize,
    /// Number of independent interval extraction runs merged into the pool.
    pub runs: usize,
    pub seed: u64,
    pub representations: Vec<Representation>,
    pub aggregations: Vec<Aggregation>,
    pub split_mode: SplitMode,
    pub partition_mode: PartitionMode,
    pub candidates: CandidateRule,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            trees: 500,
            runs: 50,
            seed: 0,
            representations: Representation::ALL.to_vec(),
            aggregations: Aggregation::ALL.to_vec(),
            split_mode: SplitMode::ExtraTrees,
            partition_mode: PartitionMode::Random,
            candidates: CandidateRule::Sqrt,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trees == 0 {
            return Err(Error::InvalidConfig("tree count must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("run count must be at least 1".into()));
        }
        if self.representations.is_empty() {
            return Err(Error::InvalidConfig("no representations enabled".into()));
        }
        if self.aggregations.is_empty() {
            return Err(Error::InvalidConfig("no aggregations enabled".into()));
        }
        Ok(())
    }

    pub fn extraction(&self) -> ExtractionConfig {
        ExtractionConfig {
            representations: self.representations.clone(),
            aggregations: self.aggregations.clone(),
            partition: self.partition_mode,
        }
    }
}

/// A fitted ensemble together with everything needed to featurize new
/// series.
#[derive(Debug, Clone, PartialEq)]
pub struct Forest {
    pub(crate) trees: Vec<Tree>,
    pub(crate) pool: FeaturePool,
    pub(crate) config: TrainConfig,
    pub(crate) label_names: Vec<String>,
    pub(crate) lag: usize,
    pub(crate) series_len: usize,
}

/// Per-series majority labels and vote fractions (`n × c`).
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub labels: Vec<usize>,
    pub votes: Array2<f64>,
}

impl Forest {
    pub(crate) fn from_parts(
        trees: Vec<Tree>,
        pool: FeaturePool,
        config: TrainConfig,
        label_names: Vec<String>,
        lag: usize,
        series_len: usize,
    ) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::CorruptModel("model has no trees".into()));
        }
        let c = label_names.len();
        for tree in &trees {
            for node in tree.nodes() {
                match *node {
                    TreeNode::Split { feature, .. } if feature >= pool.len() => {
                        return Err(Error::CorruptModel(format!("feature index {feature} out of range")))
                    }
                    TreeNode::Leaf { label, .. } if label >= c => {
                        return Err(Error::CorruptModel(format!("leaf label {label} out of range")))
                    }
                    _ => {}
                }
            }
        }
        Ok(Forest {
            trees,
            pool,
            config,
            label_names,
            lag,
            series_len,
        })
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn pool(&self) -> &FeaturePool {
        &self.pool
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    pub fn lag(&self) -> usize {
        self.lag
    }

    pub fn series_len(&self) -> usize {
        self.series_len
    }

    /// Sorted pool indices used by at least one split.
    pub fn used_features(&self) -> Vec<usize> {
        let mut used = vec![false; self.pool.len()];
        for tree in &self.trees {
            for node in tree.nodes() {
                if let TreeNode::Split { feature, .. } = *node {
                    used[feature] = true;
                }
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(j, _)| j).collect()
    }

    /// Classifies each row of `values` (`n × m`).
    pub fn predict(&self, values: ArrayView2<'_, f64>) -> Result<Prediction> {
        let m = values.ncols();
        if m != self.series_len {
            return Err(Error::SeriesLengthMismatch {
                expected: self.series_len,
                found: m,
            });
        }
        let n = values.nrows();
        let c = self.n_classes();
        if n == 0 {
            return Ok(Prediction {
                labels: Vec::new(),
                votes: Array2::zeros((0, c)),
            });
        }
        let reps = RepresentationSet::from_values(values, self.lag)?;
        let index = IndexedRepresentations::new(&reps);

        let used = self.used_features();
        let mut column_of = vec![usize::MAX; self.pool.len()];
        for (col, &j) in used.iter().enumerate() {
            column_of[j] = col;
        }
        let features: Vec<_> = used.iter().map(|&j| *self.pool.get(j)).collect();
        let matrix = evaluate_features(&index, &features)?;

        let r = self.trees.len() as f64;
        let rows: Vec<(usize, Vec<f64>)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut votes = vec![0usize; c];
                for tree in &self.trees {
                    votes[tree.predict_with(|f| matrix.value(i, column_of[f]))] += 1;
                }
                let label = majority(&votes);
                (label, votes.iter().map(|&v| v as f64 / r).collect())
            })
            .collect();

        let mut votes = Array2::zeros((n, c));
        let mut labels = Vec::with_capacity(n);
        for (i, (label, fractions)) in rows.into_iter().enumerate() {
            labels.push(label);
            for (k, f) in fractions.into_iter().enumerate() {
                votes[[i, k]] = f;
            }
        }
        Ok(Prediction { labels, votes })
    }

    /// Predicted label tokens for every series of `ds`.
    pub fn predict_tokens(&self, ds: &LabeledDataset) -> Result<Vec<String>> {
        let pred = self.predict(ds.values().view())?;
        Ok(pred
            .labels
            .iter()
            .map(|&k| self.label_names[k].clone())
            .collect())
    }
}

/// Index of the largest count, first index on ties.
pub fn majority(votes: &[usize]) -> usize {
    votes
        .iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v > votes[best] { k } else { best })
}

/// Intermediate products of training, exposed for inspection and tests.
#[derive(Debug, Clone)]
pub struct FitArtifacts {
    pub forest: Forest,
    pub representations: RepresentationSet,
}

/// Fits a forest on `train`.
pub fn fit(train: &LabeledDataset, config: &TrainConfig) -> Result<Forest> {
    fit_with_artifacts(train, config).map(|a| a.forest)
}

pub fn fit_with_artifacts(train: &LabeledDataset, config: &TrainConfig) -> Result<FitArtifacts> {
    config.validate()?;
    if train.n_classes() < 2 {
        return Err(Error::UndefinedScore);
    }
    let reps = build_representation_set(train)?;
    let index = IndexedRepresentations::new(&reps);
    let counts = train.class_counts();
    let target = Target {
        labels: train.labels(),
        counts: &counts,
    };
    let pool = build_feature_pool(&index, target, config.runs, &config.extraction(), config.seed)?;
    let matrix = evaluate_pool(&index, &pool)?;

    let params = TreeParams {
        split_mode: config.split_mode,
        candidates: config.candidates,
        n_classes: train.n_classes(),
    };
    let samples: Vec<usize> = (0..train.n_series()).collect();
    let trees = (0..config.trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = derived_rng(config.seed, Stream::Tree, t as u64);
            create_random_tree(&matrix, train.labels(), &samples, params, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;

    let forest = Forest::from_parts(
        trees,
        pool,
        config.clone(),
        train.label_names().to_vec(),
        reps.lag(),
        train.series_len(),
    )?;
    Ok(FitArtifacts {
        forest,
        representations: reps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramps(n: usize, m: usize) -> LabeledDataset {
        let values = Array2::from_shape_fn((n, m), |(i, j)| {
            let t = j as f64 / (m - 1) as f64;
            let jitter = 0.05 * (((i * 31 + j * 17) % 11) as f64 - 5.0) / 5.0;
            if i % 2 == 0 { t + jitter } else { 1.0 - t + jitter }
        });
        let tokens: Vec<String> = (0..n).map(|i| (i % 2).to_string()).collect();
        LabeledDataset::from_tokens("ramps", values, &tokens).unwrap()
    }

    fn small() -> TrainConfig {
        TrainConfig {
            trees: 20,
            runs: 3,
            seed: 4,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn majority_ties_go_low() {
        assert_eq!(majority(&[2, 1]), 0);
        assert_eq!(majority(&[1, 2]), 1);
        assert_eq!(majority(&[2, 2, 1]), 0);
    }

    #[test]
    fn votes_are_tree_fractions() {
        use crate::intervals::IntervalFeature;
        let leaf = |label| Tree::from_nodes(vec![TreeNode::Leaf { label, count: 4 }], 4).unwrap();
        let pool = FeaturePool::new(
            vec![IntervalFeature::new(Representation::Original, Aggregation::Mean, 0, 3)],
            vec![0],
        )
        .unwrap();
        let forest = Forest::from_parts(
            vec![leaf(0), leaf(0), leaf(1)],
            pool,
            TrainConfig::default(),
            vec!["A".into(), "B".into()],
            2,
            8,
        )
        .unwrap();
        let values = Array2::from_shape_fn((2, 8), |(i, j)| (i * j) as f64);
        let pred = forest.predict(values.view()).unwrap();
        assert_eq!(pred.labels, vec![0, 0]);
        assert!((pred.votes[[0, 0]] - 2.0 / 3.0).abs() < 1e-15);
        assert!((pred.votes[[0, 1]] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn separable_ramps() {
        let ds = ramps(40, 32);
        let forest = fit(&ds, &small()).unwrap();
        let pred = forest.predict(ds.values().view()).unwrap();
        assert_eq!(pred.labels, ds.labels());
        for row in pred.votes.rows() {
            assert!((row.sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_fit() {
        let ds = ramps(20, 24);
        let config = TrainConfig { trees: 1, runs: 1, seed: 11, ..TrainConfig::default() };
        assert_eq!(fit(&ds, &config).unwrap(), fit(&ds, &config).unwrap());
    }

    #[test]
    fn rejects_single_class_and_bad_config() {
        let values = Array2::from_shape_fn((4, 8), |(i, j)| (i + j) as f64);
        let ds = LabeledDataset::from_tokens("one", values, &["a"; 4]).unwrap();
        assert!(fit(&ds, &small()).is_err());
        let ds = ramps(10, 16);
        assert!(matches!(fit(&ds, &TrainConfig { trees: 0, ..small() }), Err(Error::InvalidConfig(_))));
        assert!(matches!(fit(&ds, &TrainConfig { runs: 0, ..small() }), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn length_mismatch_on_predict() {
        let ds = ramps(10, 16);
        let forest = fit(&ds, &small()).unwrap();
        let other = Array2::zeros((2, 15));
        assert!(matches!(
            forest.predict(other.view()),
            Err(Error::SeriesLengthMismatch { expected: 16, found: 15 })
        ));
    }

    #[test]
    fn used_features_are_referenced() {
        let ds = ramps(20, 24);
        let forest = fit(&ds, &small()).unwrap();
        let used = forest.used_features();
        assert!(!used.is_empty());
        assert!(used.windows(2).all(|w| w[0] < w[1]));
        assert!(used.iter().all(|&j| j < forest.pool().len()));
    }
}
