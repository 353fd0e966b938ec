//! Interval features and the supervised randomized search that selects the
//! candidate pool.

use std::collections::HashSet;
use std::fmt;

use ndarray::Array2;
use rand::Rng;
use rayon::prelude::*;

use crate::aggregate::{aggregate, Aggregation};
use crate::error::{Error, Result};
use crate::representations::{Representation, RepresentationSet};
use crate::seed::{derived_rng, Stream};
use crate::segment_index::RowIndex;

/// One summary statistic over a fixed index range of one representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalFeature {
    pub repr: Representation,
    pub agg: Aggregation,
    pub start: usize,
    /// Inclusive.
    pub end: usize,
}

impl IntervalFeature {
    pub fn new(repr: Representation, agg: Aggregation, start: usize, end: usize) -> Self {
        IntervalFeature {
            repr,
            agg,
            start,
            end,
        }
    }

    pub fn width(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn contains(&self, t: usize) -> bool {
        (self.start..=self.end).contains(&t)
    }

    fn check_bounds(&self, width: usize) -> Result<()> {
        if self.start > self.end || self.end >= width {
            return Err(Error::InvalidInterval {
                start: self.start,
                end: self.end,
                width,
            });
        }
        Ok(())
    }
}

impl fmt::Display for IntervalFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}[{}..={}]", self.repr, self.agg, self.start, self.end)
    }
}

/// Deduplicated candidate features, in first-seen order, with the index of
/// the extraction run that first produced each one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeaturePool {
    features: Vec<IntervalFeature>,
    provenance: Vec<usize>,
}

impl FeaturePool {
    pub fn new(features: Vec<IntervalFeature>, provenance: Vec<usize>) -> Result<Self> {
        if features.len() != provenance.len() {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: provenance.len(),
            });
        }
        if features.is_empty() {
            return Err(Error::NoCandidateFeatures);
        }
        let mut seen = HashSet::with_capacity(features.len());
        if let Some(dup) = features.iter().find(|f| !seen.insert(**f)) {
            return Err(Error::InvalidConfig(format!("duplicate pool feature {dup}")));
        }
        Ok(FeaturePool {
            features,
            provenance,
        })
    }

    /// Merges per-run feature lists, keeping the first occurrence of each.
    pub fn from_runs(runs: impl IntoIterator<Item = Vec<IntervalFeature>>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut features = Vec::new();
        let mut provenance = Vec::new();
        for (run, list) in runs.into_iter().enumerate() {
            for feat in list {
                if seen.insert(feat) {
                    features.push(feat);
                    provenance.push(run);
                }
            }
        }
        if features.is_empty() {
            return Err(Error::NoCandidateFeatures);
        }
        Ok(FeaturePool {
            features,
            provenance,
        })
    }

    pub fn features(&self) -> &[IntervalFeature] {
        &self.features
    }

    pub fn provenance(&self) -> &[usize] {
        &self.provenance
    }

    pub fn get(&self, j: usize) -> &IntervalFeature {
        &self.features[j]
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Feature values stored feature-major: every feature column is one
/// contiguous slice of length `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    values: Array2<f64>,
}

impl FeatureMatrix {
    /// Builds from a `features × n` array.
    pub fn from_feature_major(values: Array2<f64>) -> Self {
        let values = if values.is_standard_layout() {
            values
        } else {
            values.as_standard_layout().to_owned()
        };
        FeatureMatrix { values }
    }

    pub fn from_columns(columns: Vec<Vec<f64>>, n: usize) -> Self {
        let flat: Vec<f64> = columns.iter().flatten().copied().collect();
        FeatureMatrix {
            values: Array2::from_shape_vec((columns.len(), n), flat).expect("columns of length n"),
        }
    }

    pub fn column(&self, j: usize) -> &[f64] {
        self.values.row(j).to_slice().expect("standard layout")
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [f64] {
        self.values.row_mut(j).into_slice().expect("standard layout")
    }

    pub fn value(&self, series: usize, feature: usize) -> f64 {
        self.values[[feature, series]]
    }

    pub fn n_features(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_series(&self) -> usize {
        self.values.ncols()
    }
}

/// How sub-series are cut during the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionMode {
    /// Uniform random cut point.
    #[default]
    Random,
    /// Always cut at the middle, `ceil(len / 2)`.
    Fixed,
}

impl PartitionMode {
    pub fn code(self) -> &'static str {
        match self {
            PartitionMode::Random => "random",
            PartitionMode::Fixed => "fixed",
        }
    }
}

impl std::str::FromStr for PartitionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(PartitionMode::Random),
            "fixed" => Ok(PartitionMode::Fixed),
            _ => Err(Error::InvalidConfig(format!("unknown partition mode {s:?}"))),
        }
    }
}

/// Which representations and aggregations the search explores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionConfig {
    pub representations: Vec<Representation>,
    pub aggregations: Vec<Aggregation>,
    pub partition: PartitionMode,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            representations: Representation::ALL.to_vec(),
            aggregations: Aggregation::ALL.to_vec(),
            partition: PartitionMode::Random,
        }
    }
}

/// Representation set with a [`RowIndex`] per row, so any interval feature
/// column is computed in `O(n log w)`.
#[derive(Debug, Clone)]
pub struct IndexedRepresentations {
    rows: [Vec<RowIndex>; 4],
    n: usize,
}

impl IndexedRepresentations {
    pub fn new(reps: &RepresentationSet) -> Self {
        let rows = std::array::from_fn(|k| {
            let repr = Representation::ALL[k];
            let matrix = reps.get(repr);
            let means = reps.row_means(repr);
            (0..reps.n_series())
                .into_par_iter()
                .map(|i| RowIndex::new(&matrix.row(i).to_vec(), means[i]))
                .collect()
        });
        IndexedRepresentations {
            rows,
            n: reps.n_series(),
        }
    }

    pub fn n_series(&self) -> usize {
        self.n
    }

    pub fn width(&self, repr: Representation) -> usize {
        self.rows[repr.index()].first().map_or(0, RowIndex::width)
    }

    /// Value of `feat` on every series.
    pub fn column(&self, feat: &IntervalFeature) -> Result<Vec<f64>> {
        feat.check_bounds(self.width(feat.repr))?;
        let mut out = vec![0.0; self.n];
        self.fill_column(feat, &mut out);
        Ok(out)
    }

    fn fill_column(&self, feat: &IntervalFeature, out: &mut [f64]) {
        for (dst, row) in out.iter_mut().zip(&self.rows[feat.repr.index()]) {
            *dst = row.aggregate(feat.agg, feat.start, feat.end);
        }
    }
}

/// Value of `feat` on every series, computed directly from the segments.
pub fn feature_column(reps: &RepresentationSet, feat: &IntervalFeature) -> Result<Vec<f64>> {
    feat.check_bounds(reps.width(feat.repr))?;
    let matrix = reps.get(feat.repr);
    let means = reps.row_means(feat.repr);
    Ok(matrix
        .rows()
        .into_iter()
        .zip(means)
        .map(|(row, &mu)| {
            let row = row.as_slice().expect("standard layout");
            aggregate(feat.agg, &row[feat.start..=feat.end], mu)
        })
        .collect())
}

/// Ratio of between-class to within-class scatter of `f`, using population
/// variances. A zero within-class scatter with nonzero between-class scatter
/// scores `f64::INFINITY`; a feature with neither scores 0.
pub fn fisher_score(f: &[f64], y: &[usize], counts: &[usize]) -> Result<f64> {
    if f.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: f.len(),
            right: y.len(),
        });
    }
    if f.len() < 2 || counts.iter().filter(|&&c| c > 0).count() < 2 {
        return Err(Error::UndefinedScore);
    }
    let c = counts.len();
    let mut sums = vec![0.0; c];
    for (&v, &k) in f.iter().zip(y) {
        sums[k] += v;
    }
    let overall = sums.iter().sum::<f64>() / f.len() as f64;
    let means: Vec<f64> = sums
        .iter()
        .zip(counts)
        .map(|(&s, &n)| if n > 0 { s / n as f64 } else { 0.0 })
        .collect();
    let mut within = 0.0;
    for (&v, &k) in f.iter().zip(y) {
        within += (v - means[k]).powi(2);
    }
    let between: f64 = means
        .iter()
        .zip(counts)
        .map(|(&mu, &n)| n as f64 * (mu - overall).powi(2))
        .sum();
    Ok(if within > 0.0 {
        between / within
    } else if between > 0.0 {
        f64::INFINITY
    } else {
        0.0
    })
}

/// Uniform cut point in `[1, len-1]`: the left part is `[0, u)`, the right
/// part `[u, len)`.
pub fn random_cut_point<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<usize> {
    if len < 2 {
        return Err(Error::SegmentTooShort(len));
    }
    Ok(rng.random_range(1..len))
}

/// Cut point under `mode`; the fixed mode always returns `ceil(len / 2)`.
pub fn cut_point<R: Rng + ?Sized>(len: usize, mode: PartitionMode, rng: &mut R) -> Result<usize> {
    match mode {
        PartitionMode::Random => random_cut_point(len, rng),
        PartitionMode::Fixed if len < 2 => Err(Error::SegmentTooShort(len)),
        PartitionMode::Fixed => Ok(len.div_ceil(2)),
    }
}

/// Label vector with its class histogram, shared by every score in a search.
#[derive(Debug, Clone, Copy)]
pub struct Target<'a> {
    pub labels: &'a [usize],
    pub counts: &'a [usize],
}

/// Repeatedly cuts `[lo, hi]` in two, keeps the side whose feature has the
/// higher Fisher score (ties go left), appends it to `out`, and continues
/// inside it until the segment is a single point.
#[allow(clippy::too_many_arguments)]
pub fn supervised_interval_search<R: Rng + ?Sized>(
    index: &IndexedRepresentations,
    repr: Representation,
    agg: Aggregation,
    target: Target<'_>,
    lo: usize,
    hi: usize,
    mode: PartitionMode,
    rng: &mut R,
    out: &mut Vec<IntervalFeature>,
) -> Result<()> {
    let width = index.width(repr);
    if lo > hi || hi >= width {
        return Err(Error::InvalidInterval {
            start: lo,
            end: hi,
            width,
        });
    }
    let n = index.n_series();
    let mut left_col = vec![0.0; n];
    let mut right_col = vec![0.0; n];
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo + 1 >= 2 {
        let u = cut_point(hi - lo + 1, mode, rng)?;
        let left = IntervalFeature::new(repr, agg, lo, lo + u - 1);
        let right = IntervalFeature::new(repr, agg, lo + u, hi);
        index.fill_column(&left, &mut left_col);
        index.fill_column(&right, &mut right_col);
        let score_left = fisher_score(&left_col, target.labels, target.counts)?;
        let score_right = fisher_score(&right_col, target.labels, target.counts)?;
        let keep = if score_left >= score_right { left } else { right };
        out.push(keep);
        lo = keep.start;
        hi = keep.end;
    }
    Ok(())
}

/// One extraction run: for every enabled representation and aggregation,
/// cut the full width once and search both halves.
pub fn get_interval_features<R: Rng + ?Sized>(
    index: &IndexedRepresentations,
    target: Target<'_>,
    config: &ExtractionConfig,
    rng: &mut R,
) -> Result<Vec<IntervalFeature>> {
    let mut out = Vec::new();
    for &repr in &config.representations {
        let width = index.width(repr);
        if width < 2 {
            continue;
        }
        for &agg in &config.aggregations {
            let u = cut_point(width, config.partition, rng)?;
            supervised_interval_search(index, repr, agg, target, 0, u - 1, config.partition, rng, &mut out)?;
            supervised_interval_search(index, repr, agg, target, u, width - 1, config.partition, rng, &mut out)?;
        }
    }
    Ok(out)
}

/// Union of `runs` independent extraction runs. Run `k` draws from the
/// generator derived from `(seed, k)`.
pub fn build_feature_pool(
    index: &IndexedRepresentations,
    target: Target<'_>,
    runs: usize,
    config: &ExtractionConfig,
    seed: u64,
) -> Result<FeaturePool> {
    if runs == 0 {
        return Err(Error::InvalidConfig("run count must be at least 1".into()));
    }
    let lists = (0..runs)
        .into_par_iter()
        .map(|k| {
            let mut rng = derived_rng(seed, Stream::ExtractionRun, k as u64);
            get_interval_features(index, target, config, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    FeaturePool::from_runs(lists)
}

/// Evaluates every pool feature on every series.
pub fn evaluate_pool(index: &IndexedRepresentations, pool: &FeaturePool) -> Result<FeatureMatrix> {
    evaluate_features(index, pool.features())
}

pub(crate) fn evaluate_features(
    index: &IndexedRepresentations,
    features: &[IntervalFeature],
) -> Result<FeatureMatrix> {
    for feat in features {
        feat.check_bounds(index.width(feat.repr))?;
    }
    let n = index.n_series();
    let mut values = Array2::zeros((features.len(), n));
    values
        .outer_iter_mut()
        .into_par_iter()
        .zip(features)
        .for_each(|(mut row, feat)| {
            index.fill_column(feat, row.as_slice_mut().expect("standard layout"));
        });
    Ok(FeatureMatrix { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representations::schwert_lag;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_reps(n: usize, m: usize) -> RepresentationSet {
        let values = Array2::from_shape_fn((n, m), |(i, j)| {
            let class = (i % 2) as f64;
            (j as f64 * (0.3 + class)).sin() + 0.1 * ((i * 7 + j * 3) % 5) as f64
        });
        RepresentationSet::from_values(values.view(), schwert_lag(m)).unwrap()
    }

    fn labels(n: usize) -> (Vec<usize>, Vec<usize>) {
        let y: Vec<usize> = (0..n).map(|i| i % 2).collect();
        let counts = crate::dataset::class_counts(&y, 2);
        (y, counts)
    }

    #[test]
    fn fisher_examples() {
        let y = [0, 0, 1, 1];
        let counts = [2, 2];
        assert_eq!(fisher_score(&[0.0, 1.0, 4.0, 5.0], &y, &counts).unwrap(), 16.0);
        assert_eq!(fisher_score(&[3.0; 4], &y, &counts).unwrap(), 0.0);
        assert_eq!(fisher_score(&[0.0, 0.0, 1.0, 1.0], &y, &counts).unwrap(), f64::INFINITY);
    }

    #[test]
    fn fisher_single_class_is_undefined() {
        let err = fisher_score(&[1.0, 2.0], &[0, 0], &[2]).unwrap_err();
        assert!(err.to_string().contains("undefined score"));
        assert!(fisher_score(&[1.0, 2.0], &[0, 0], &[2, 0]).is_err());
    }

    #[test]
    fn cut_point_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            assert_eq!(random_cut_point(2, &mut rng).unwrap(), 1);
        }
        assert!(matches!(random_cut_point(1, &mut rng), Err(Error::SegmentTooShort(1))));
        let a = random_cut_point(10, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = random_cut_point(10, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        assert_eq!(cut_point(7, PartitionMode::Fixed, &mut rng).unwrap(), 4);
        assert_eq!(cut_point(2, PartitionMode::Fixed, &mut rng).unwrap(), 1);
    }

    #[test]
    fn cut_point_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut hist = [0usize; 5];
        let draws = 100_000;
        for _ in 0..draws {
            hist[random_cut_point(5, &mut rng).unwrap()] += 1;
        }
        assert_eq!(hist[0], 0);
        for &h in &hist[1..] {
            let frac = h as f64 / draws as f64;
            assert!((frac - 0.25).abs() < 0.02, "{hist:?}");
        }
    }

    #[test]
    fn search_base_cases() {
        let reps = toy_reps(8, 16);
        let index = IndexedRepresentations::new(&reps);
        let (y, counts) = labels(8);
        let target = Target { labels: &y, counts: &counts };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut out = Vec::new();
        supervised_interval_search(&index, Representation::Original, Aggregation::Mean, target, 3, 3, PartitionMode::Random, &mut rng, &mut out).unwrap();
        assert!(out.is_empty());
        supervised_interval_search(&index, Representation::Original, Aggregation::Mean, target, 3, 4, PartitionMode::Random, &mut rng, &mut out).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].width(), 1);
        assert!(out[0].start == 3 || out[0].start == 4);
    }

    #[test]
    fn search_terminates_and_nests_for_every_seed() {
        let reps = toy_reps(10, 12);
        let index = IndexedRepresentations::new(&reps);
        let (y, counts) = labels(10);
        let target = Target { labels: &y, counts: &counts };
        for seed in 0..500 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::new();
            supervised_interval_search(&index, Representation::Original, Aggregation::Slope, target, 2, 9, PartitionMode::Random, &mut rng, &mut out).unwrap();
            assert!(!out.is_empty() && out.len() <= 7, "{}", out.len());
            let (mut lo, mut hi) = (2, 9);
            for f in &out {
                assert!(f.start >= lo && f.end <= hi && f.width() < hi - lo + 1);
                lo = f.start;
                hi = f.end;
            }
        }
    }

    #[test]
    fn extraction_is_deterministic_and_in_bounds() {
        let reps = toy_reps(12, 24);
        let index = IndexedRepresentations::new(&reps);
        let (y, counts) = labels(12);
        let target = Target { labels: &y, counts: &counts };
        let config = ExtractionConfig::default();
        let a = get_interval_features(&index, target, &config, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = get_interval_features(&index, target, &config, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.len() >= 36, "{}", a.len());
        let max: usize = Representation::ALL.iter().map(|&r| 9 * (reps.width(r).saturating_sub(1))).sum();
        assert!(a.len() <= max);
        for f in &a {
            assert!(f.start <= f.end && f.end < reps.width(f.repr));
        }
    }

    #[test]
    fn single_class_surfaces_undefined_score() {
        let reps = toy_reps(6, 16);
        let index = IndexedRepresentations::new(&reps);
        let y = vec![0; 6];
        let counts = vec![6];
        let target = Target { labels: &y, counts: &counts };
        let err = get_interval_features(&index, target, &ExtractionConfig::default(), &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::UndefinedScore));
    }

    #[test]
    fn pool_union_is_monotone_and_deduplicated() {
        let reps = toy_reps(12, 32);
        let index = IndexedRepresentations::new(&reps);
        let (y, counts) = labels(12);
        let target = Target { labels: &y, counts: &counts };
        let config = ExtractionConfig::default();
        let one = build_feature_pool(&index, target, 1, &config, 3).unwrap();
        let two = build_feature_pool(&index, target, 2, &config, 3).unwrap();
        assert_eq!(&two.features()[..one.len()], one.features());
        let unique: HashSet<_> = two.features().iter().collect();
        assert_eq!(unique.len(), two.len());
        assert!(matches!(
            build_feature_pool(&index, target, 0, &config, 3),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn from_runs_keeps_first_occurrence() {
        let f = IntervalFeature::new(Representation::Original, Aggregation::Mean, 0, 2);
        let g = IntervalFeature::new(Representation::Derivative, Aggregation::Max, 1, 1);
        let pool = FeaturePool::from_runs([vec![f], vec![g, f]]).unwrap();
        assert_eq!(pool.features(), &[f, g]);
        assert_eq!(pool.provenance(), &[0, 1]);
        assert!(matches!(FeaturePool::from_runs([vec![], vec![]]), Err(Error::NoCandidateFeatures)));
        assert!(FeaturePool::new(vec![f, f], vec![0, 0]).is_err());
    }

    #[test]
    fn feature_columns() {
        let reps = toy_reps(5, 20);
        let index = IndexedRepresentations::new(&reps);
        let full_mean = IntervalFeature::new(Representation::Original, Aggregation::Mean, 0, 19);
        let col = feature_column(&reps, &full_mean).unwrap();
        for (got, want) in col.iter().zip(reps.row_means(Representation::Original)) {
            assert!((got - want).abs() < 1e-12);
        }
        let point_std = IntervalFeature::new(Representation::Original, Aggregation::Std, 4, 4);
        assert_eq!(feature_column(&reps, &point_std).unwrap(), vec![0.0; 5]);
        assert_eq!(index.column(&point_std).unwrap(), vec![0.0; 5]);
        let full_max = IntervalFeature::new(Representation::Original, Aggregation::Max, 0, 19);
        let max = feature_column(&reps, &full_max).unwrap();
        for (i, v) in max.iter().enumerate() {
            let row_max = reps.get(Representation::Original).row(i).iter().copied().fold(f64::MIN, f64::max);
            assert_eq!(*v, row_max);
        }
        let bad = IntervalFeature::new(Representation::Periodogram, Aggregation::Mean, 3, 10);
        assert!(matches!(feature_column(&reps, &bad), Err(Error::InvalidInterval { .. })));
        assert!(matches!(index.column(&bad), Err(Error::InvalidInterval { .. })));
    }

    #[test]
    fn indexed_and_direct_columns_agree() {
        let reps = toy_reps(6, 40);
        let index = IndexedRepresentations::new(&reps);
        for repr in Representation::ALL {
            let w = reps.width(repr);
            for agg in Aggregation::ALL {
                for (s, e) in [(0, w - 1), (1, w / 2), (w / 3, w / 3)] {
                    let feat = IntervalFeature::new(repr, agg, s, e);
                    let direct = feature_column(&reps, &feat).unwrap();
                    let fast = index.column(&feat).unwrap();
                    for (a, b) in direct.iter().zip(&fast) {
                        assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()), "{feat}: {a} vs {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn evaluate_pool_shapes() {
        let reps = toy_reps(7, 16);
        let index = IndexedRepresentations::new(&reps);
        let f = IntervalFeature::new(Representation::Original, Aggregation::Mean, 0, 15);
        let pool = FeaturePool::new(vec![f], vec![0]).unwrap();
        let matrix = evaluate_pool(&index, &pool).unwrap();
        assert_eq!((matrix.n_features(), matrix.n_series()), (1, 7));
        assert_eq!(matrix, evaluate_pool(&index, &pool).unwrap());
    }
}
