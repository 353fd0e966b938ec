//! Feature importances and discriminatory-interval heatmaps of a fitted
//! forest.

use crate::aggregate::Aggregation;
use crate::forest::Forest;
use crate::representations::Representation;
use crate::tree::TreeNode;

/// Mean decrease in impurity of every pool feature: reach-weighted
/// information gain summed over the nodes splitting on it, averaged over
/// trees.
pub fn mdi(model: &Forest) -> Vec<f64> {
    let mut out = vec![0.0; model.pool().len()];
    for tree in model.trees() {
        for (id, node) in tree.nodes().iter().enumerate() {
            if let TreeNode::Split { feature, gain, .. } = *node {
                out[feature] += tree.reach_fraction(id) * gain;
            }
        }
    }
    let r = model.trees().len() as f64;
    for v in &mut out {
        *v /= r;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    Representation,
    Aggregation,
}

/// Mean MDI per representation (4 entries) or per aggregation (9 entries),
/// normalized to sum to 1. `filter_repr` restricts the features considered.
/// Returns all zeros when no feature has positive importance.
pub fn group_importance(model: &Forest, group_by: GroupBy, filter_repr: Option<Representation>) -> Vec<f64> {
    group_importance_from(model, &mdi(model), group_by, filter_repr)
}

fn group_importance_from(
    model: &Forest,
    mdi: &[f64],
    group_by: GroupBy,
    filter_repr: Option<Representation>,
) -> Vec<f64> {
    let groups = match group_by {
        GroupBy::Representation => Representation::ALL.len(),
        GroupBy::Aggregation => Aggregation::ALL.len(),
    };
    let mut sums = vec![0.0; groups];
    let mut members = vec![0usize; groups];
    for (feat, &v) in model.pool().features().iter().zip(mdi) {
        if filter_repr.is_some_and(|r| r != feat.repr) {
            continue;
        }
        let g = match group_by {
            GroupBy::Representation => feat.repr.index(),
            GroupBy::Aggregation => feat.agg.index(),
        };
        sums[g] += v;
        members[g] += 1;
    }
    let mut means: Vec<f64> = sums
        .iter()
        .zip(&members)
        .map(|(&s, &k)| if k > 0 { s / k as f64 } else { 0.0 })
        .collect();
    let total: f64 = means.iter().sum();
    if total > 0.0 {
        for v in &mut means {
            *v /= total;
        }
    }
    means
}

/// Importances of one model in every grouping.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceReport {
    pub per_feature_mdi: Vec<f64>,
    pub repr_importance: Vec<f64>,
    pub agg_importance: Vec<f64>,
    /// Pool indices used by at least one split.
    pub used_features: Vec<usize>,
}

impl ImportanceReport {
    pub fn new(model: &Forest) -> Self {
        Self::with_filter(model, None)
    }

    /// Aggregation importances restricted to `filter_repr` features.
    pub fn with_filter(model: &Forest, filter_repr: Option<Representation>) -> Self {
        let per_feature_mdi = mdi(model);
        ImportanceReport {
            repr_importance: group_importance_from(model, &per_feature_mdi, GroupBy::Representation, None),
            agg_importance: group_importance_from(model, &per_feature_mdi, GroupBy::Aggregation, filter_repr),
            used_features: model.used_features(),
            per_feature_mdi,
        }
    }

    /// True when the forest made no split at all.
    pub fn is_degenerate(&self) -> bool {
        self.used_features.is_empty()
    }
}

/// How often each position of a representation lies inside a split
/// feature's interval, scaled so the maximum is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub repr: Representation,
    pub weights: Vec<f64>,
}

/// Counts, per position of `repr`, the split nodes (over all trees) whose
/// feature is on `repr` (and uses `filter_agg`, when given) and covers that
/// position, then divides by the largest count.
pub fn interval_heatmap(model: &Forest, repr: Representation, filter_agg: Option<Aggregation>) -> Heatmap {
    let counts = heatmap_counts(model, repr, filter_agg);
    let max = counts.iter().copied().max().unwrap_or(0);
    let weights = counts
        .iter()
        .map(|&c| if max > 0 { c as f64 / max as f64 } else { 0.0 })
        .collect();
    Heatmap { repr, weights }
}

/// Raw per-position node counts behind [`interval_heatmap`].
pub fn heatmap_counts(model: &Forest, repr: Representation, filter_agg: Option<Aggregation>) -> Vec<u64> {
    let width = representation_width(model, repr);
    // difference array over positions
    let mut diff = vec![0i64; width + 1];
    for tree in model.trees() {
        for node in tree.nodes() {
            if let TreeNode::Split { feature, .. } = *node {
                let f = model.pool().get(feature);
                if f.repr == repr && filter_agg.is_none_or(|a| a == f.agg) {
                    diff[f.start] += 1;
                    diff[f.end + 1] -= 1;
                }
            }
        }
    }
    let mut acc = 0i64;
    diff[..width]
        .iter()
        .map(|d| {
            acc += d;
            acc as u64
        })
        .collect()
}

/// Width of `repr` for series of the model's training length.
pub fn representation_width(model: &Forest, repr: Representation) -> usize {
    let m = model.series_len();
    match repr {
        Representation::Original => m,
        Representation::Periodogram => m / 2,
        Representation::Derivative => m - 1,
        Representation::Autoregressive => model.lag(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::TrainConfig;
    use crate::intervals::{FeaturePool, IntervalFeature};
    use crate::tree::Tree;
    use approx::assert_abs_diff_eq;

    fn stump(feature: usize, gain: f64) -> Tree {
        Tree::from_nodes(
            vec![
                TreeNode::Split { feature, cut: 0.0, left: 1, right: 2, gain, count: 4 },
                TreeNode::Leaf { label: 0, count: 2 },
                TreeNode::Leaf { label: 1, count: 2 },
            ],
            4,
        )
        .unwrap()
    }

    fn leaf() -> Tree {
        Tree::from_nodes(vec![TreeNode::Leaf { label: 0, count: 4 }], 4).unwrap()
    }

    fn forest(trees: Vec<Tree>, features: Vec<IntervalFeature>) -> Forest {
        let prov = vec![0; features.len()];
        Forest::from_parts(
            trees,
            FeaturePool::new(features, prov).unwrap(),
            TrainConfig::default(),
            vec!["a".into(), "b".into()],
            2,
            8,
        )
        .unwrap()
    }

    fn feat(repr: Representation, agg: Aggregation, s: usize, e: usize) -> IntervalFeature {
        IntervalFeature::new(repr, agg, s, e)
    }

    #[test]
    fn mdi_single_stump() {
        let f = forest(
            vec![stump(1, 0.7)],
            vec![feat(Representation::Original, Aggregation::Mean, 0, 3), feat(Representation::Periodogram, Aggregation::Max, 0, 1)],
        );
        assert_eq!(mdi(&f), vec![0.0, 0.7]);
    }

    #[test]
    fn mdi_averages_over_trees() {
        let f = forest(vec![stump(0, 0.6), leaf()], vec![feat(Representation::Original, Aggregation::Mean, 0, 3)]);
        assert_abs_diff_eq!(mdi(&f)[0], 0.3);
    }

    #[test]
    fn group_importance_on_one_representation() {
        let f = forest(
            vec![stump(1, 1.0), stump(1, 0.5)],
            vec![feat(Representation::Original, Aggregation::Mean, 0, 3), feat(Representation::Periodogram, Aggregation::Slope, 0, 1)],
        );
        assert_eq!(group_importance(&f, GroupBy::Representation, None), vec![0.0, 1.0, 0.0, 0.0]);
        let agg = group_importance(&f, GroupBy::Aggregation, None);
        assert_eq!(agg[Aggregation::Slope.index()], 1.0);
        assert_eq!(group_importance(&f, GroupBy::Aggregation, Some(Representation::Original)), vec![0.0; 9]);
    }

    #[test]
    fn degenerate_forest_has_zero_importance() {
        let f = forest(vec![leaf(), leaf()], vec![feat(Representation::Original, Aggregation::Mean, 0, 3)]);
        let report = ImportanceReport::new(&f);
        assert!(report.is_degenerate());
        assert_eq!(report.repr_importance, vec![0.0; 4]);
        assert_eq!(report.agg_importance, vec![0.0; 9]);
    }

    #[test]
    fn heatmap_single_interval() {
        let f = forest(vec![stump(0, 1.0)], vec![feat(Representation::Original, Aggregation::Mean, 2, 4)]);
        let h = interval_heatmap(&f, Representation::Original, None);
        assert_eq!(h.weights, vec![0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn heatmap_overlapping_intervals() {
        let f = forest(
            vec![stump(0, 1.0), stump(1, 1.0)],
            vec![feat(Representation::Original, Aggregation::Mean, 0, 3), feat(Representation::Original, Aggregation::Std, 2, 5)],
        );
        assert_eq!(heatmap_counts(&f, Representation::Original, None), vec![1, 1, 2, 2, 1, 1, 0, 0]);
        let h = interval_heatmap(&f, Representation::Original, None);
        assert_eq!(h.weights, vec![0.5, 0.5, 1.0, 1.0, 0.5, 0.5, 0.0, 0.0]);
        let only_std = interval_heatmap(&f, Representation::Original, Some(Aggregation::Std));
        assert_eq!(only_std.weights, vec![0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn heatmap_empty_representation() {
        let f = forest(vec![stump(0, 1.0)], vec![feat(Representation::Original, Aggregation::Mean, 0, 3)]);
        let h = interval_heatmap(&f, Representation::Derivative, None);
        assert_eq!(h.weights, vec![0.0; 7]);
        assert_eq!(interval_heatmap(&f, Representation::Autoregressive, None).weights.len(), 2);
    }
}
