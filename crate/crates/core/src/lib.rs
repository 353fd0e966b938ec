//! Interval-feature forest classifier for univariate time series.
//!
//! Each series is viewed through four representations (the raw values, the
//! periodogram, the first difference and autoregressive coefficients). A
//! supervised randomized search collects discriminative interval features
//! (one of nine summary statistics over an index range of one
//! representation), and an ensemble of randomized trees is trained on them.
//! Fitted forests report per-feature importances and heatmaps of the
//! intervals the trees rely on.
//!
//! ```no_run
//! use rstsf::{fit, load_ucr_tsv, TrainConfig};
//!
//! let train = load_ucr_tsv("Chinatown_TRAIN.tsv")?;
//! let test = load_ucr_tsv("Chinatown_TEST.tsv")?;
//! let model = fit(&train, &TrainConfig::default())?;
//! println!("{:.2}%", rstsf::evaluate(&model, &test)?);
//! # Ok::<(), rstsf::Error>(())
//! ```
//!
//! The `examples/` directory has one runnable program per capability.

pub mod aggregate;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod forest;
pub mod harness;
pub mod interpret;
pub mod intervals;
pub mod metrics;
pub mod model_io;
pub mod representations;
mod segment_index;
pub mod seed;
pub mod tree;

pub use aggregate::{aggregate, Aggregation};
pub use dataset::{load_ucr_tsv, parse_ucr, LabeledDataset};
pub use error::{Error, ErrorKind, Result};
pub use forest::{fit, fit_with_artifacts, Forest, Prediction, TrainConfig};
pub use harness::{bench, evaluate, DatasetSplit};
pub use interpret::{group_importance, interval_heatmap, mdi, GroupBy, Heatmap, ImportanceReport};
pub use intervals::{
    build_feature_pool, fisher_score, supervised_interval_search, ExtractionConfig, FeaturePool,
    IndexedRepresentations, IntervalFeature, PartitionMode, Target,
};
pub use metrics::{accuracy, average_rank, weighted_average_accuracy, AccuracyMatrix};
pub use model_io::{load_model, save_model};
pub use representations::{burg_ar, derivative, periodogram, schwert_lag, Representation, RepresentationSet};
pub use tree::{entropy, information_gain, CandidateRule, SplitMode, Tree, TreeNode};
