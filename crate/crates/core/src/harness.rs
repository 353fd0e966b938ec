//! Evaluation, benchmarking, ablation sweeps and CSV output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::aggregate::Aggregation;
use crate::dataset::{load_ucr_tsv, LabeledDataset};
use crate::error::{Error, Result};
use crate::forest::{fit, Forest, Prediction, TrainConfig};
use crate::interpret::{mdi, Heatmap};
use crate::intervals::PartitionMode;
use crate::metrics::AccuracyMatrix;
use crate::representations::Representation;
use crate::tree::SplitMode;

/// Train and test split of one dataset.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub name: String,
    pub train: LabeledDataset,
    pub test: LabeledDataset,
}

impl DatasetSplit {
    pub fn load(train: impl AsRef<Path>, test: impl AsRef<Path>) -> Result<Self> {
        let train = load_ucr_tsv(train)?;
        let test = load_ucr_tsv(test)?;
        Ok(DatasetSplit {
            name: train.name().to_string(),
            train,
            test,
        })
    }
}

/// Locates `<Name>_TRAIN.tsv` and `<Name>_TEST.tsv` either directly in `dir`
/// or in `dir/<Name>/`, as laid out by the UCR archive.
pub fn find_ucr_dataset(dir: impl AsRef<Path>, name: &str) -> Option<(PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    [dir.to_path_buf(), dir.join(name)].into_iter().find_map(|d| {
        let train = d.join(format!("{name}_TRAIN.tsv"));
        let test = d.join(format!("{name}_TEST.tsv"));
        (train.is_file() && test.is_file()).then_some((train, test))
    })
}

/// Accuracy in percent of `model` on `test`, matching classes by label token.
/// Test series whose label the model never saw count as errors.
pub fn evaluate(model: &Forest, test: &LabeledDataset) -> Result<f64> {
    let pred = model.predict(test.values().view())?;
    Ok(accuracy_of(model, &pred, test))
}

fn accuracy_of(model: &Forest, pred: &Prediction, test: &LabeledDataset) -> f64 {
    let names = model.label_names();
    let hits = pred
        .labels
        .iter()
        .zip(test.label_tokens())
        .filter(|(&k, truth)| names[k] == *truth)
        .count();
    100.0 * hits as f64 / test.n_series() as f64
}

/// One fit and evaluation with wall-clock timings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunResult {
    pub accuracy: f64,
    pub pool_size: usize,
    pub fit_seconds: f64,
    pub predict_seconds: f64,
}

pub fn fit_and_evaluate(split: &DatasetSplit, config: &TrainConfig) -> Result<RunResult> {
    let t0 = Instant::now();
    let model = fit(&split.train, config)?;
    let fit_seconds = t0.elapsed().as_secs_f64();
    let t1 = Instant::now();
    let pred = model.predict(split.test.values().view())?;
    let predict_seconds = t1.elapsed().as_secs_f64();
    Ok(RunResult {
        accuracy: accuracy_of(&model, &pred, &split.test),
        pool_size: model.pool().len(),
        fit_seconds,
        predict_seconds,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub runs: Vec<RunResult>,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl BenchReport {
    pub fn accuracies(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.accuracy).collect()
    }

    /// Mean and population standard deviation of the accuracies.
    pub fn accuracy_mean_std(&self) -> (f64, f64) {
        mean_std(self.runs.iter().map(|r| r.accuracy))
    }

    pub fn fit_seconds_mean(&self) -> f64 {
        mean_std(self.runs.iter().map(|r| r.fit_seconds)).0
    }

    pub fn predict_seconds_mean(&self) -> f64 {
        mean_std(self.runs.iter().map(|r| r.predict_seconds)).0
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("run,accuracy,pool_size,fit_seconds,predict_seconds\n");
        for (k, r) in self.runs.iter().enumerate() {
            writeln!(
                out,
                "{k},{},{},{:.6},{:.6}",
                r.accuracy, r.pool_size, r.fit_seconds, r.predict_seconds
            )
            .unwrap();
        }
        let (mean, std) = self.accuracy_mean_std();
        writeln!(
            out,
            "# accuracy mean {mean:.4} std {std:.4}; fit {:.4} s, predict {:.4} s (mean wall)",
            self.fit_seconds_mean(),
            self.predict_seconds_mean()
        )
        .unwrap();
        out
    }
}

/// `repeats` fits with seeds `config.seed, config.seed + 1, ...`.
pub fn bench(split: &DatasetSplit, config: &TrainConfig, repeats: usize) -> Result<BenchReport> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("bench needs at least one run".into()));
    }
    let runs = (0..repeats as u64)
        .map(|k| {
            let config = TrainConfig {
                seed: config.seed.wrapping_add(k),
                ..config.clone()
            };
            fit_and_evaluate(split, &config)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BenchReport { runs })
}

/// One configuration axis of an ablation grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    SplitMode(Vec<SplitMode>),
    PartitionMode(Vec<PartitionMode>),
    Representations(Vec<Vec<Representation>>),
    Aggregations(Vec<Vec<Aggregation>>),
    Runs(Vec<usize>),
    Trees(Vec<usize>),
}

fn parse_csv<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<Vec<T>> {
    s.split(',').map(|t| t.trim().parse()).collect()
}

fn parse_count(s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::InvalidConfig(format!("invalid count {s:?}")))
}

impl Axis {
    /// Parses `name=v1/v2/...`, e.g. `split-mode=et/et1`,
    /// `reprs=ori/ori,per,der,reg` or `dsets=10/50/150`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (name, values) = spec
            .split_once('=')
            .ok_or_else(|| Error::InvalidConfig(format!("axis {spec:?} is not name=values")))?;
        let values: Vec<&str> = values.split('/').collect();
        Ok(match name {
            "split-mode" => Axis::SplitMode(values.iter().map(|v| v.parse()).collect::<Result<_>>()?),
            "partition-mode" => Axis::PartitionMode(values.iter().map(|v| v.parse()).collect::<Result<_>>()?),
            "reprs" => Axis::Representations(values.iter().map(|v| parse_csv(v)).collect::<Result<_>>()?),
            "aggs" => Axis::Aggregations(values.iter().map(|v| parse_csv(v)).collect::<Result<_>>()?),
            "dsets" => Axis::Runs(values.iter().map(|v| parse_count(v)).collect::<Result<_>>()?),
            "trees" => Axis::Trees(values.iter().map(|v| parse_count(v)).collect::<Result<_>>()?),
            _ => return Err(Error::InvalidConfig(format!("unknown ablation axis {name:?}"))),
        })
    }

    fn len(&self) -> usize {
        match self {
            Axis::SplitMode(v) => v.len(),
            Axis::PartitionMode(v) => v.len(),
            Axis::Representations(v) => v.len(),
            Axis::Aggregations(v) => v.len(),
            Axis::Runs(v) => v.len(),
            Axis::Trees(v) => v.len(),
        }
    }

    /// Applies value `k` and returns its label.
    fn apply(&self, k: usize, c: &mut TrainConfig) -> String {
        let codes = |items: &[String]| items.join("+");
        match self {
            Axis::SplitMode(v) => {
                c.split_mode = v[k];
                format!("split={}", v[k])
            }
            Axis::PartitionMode(v) => {
                c.partition_mode = v[k];
                format!("partition={}", v[k].code())
            }
            Axis::Representations(v) => {
                c.representations = v[k].clone();
                let names: Vec<String> = v[k].iter().map(|r| r.to_string()).collect();
                format!("reprs={}", codes(&names))
            }
            Axis::Aggregations(v) => {
                c.aggregations = v[k].clone();
                let names: Vec<String> = v[k].iter().map(|a| a.to_string()).collect();
                format!("aggs={}", codes(&names))
            }
            Axis::Runs(v) => {
                c.runs = v[k];
                format!("dsets={}", v[k])
            }
            Axis::Trees(v) => {
                c.trees = v[k];
                format!("trees={}", v[k])
            }
        }
    }
}

/// Named configurations forming the cartesian product of the axes over a
/// base configuration.
pub fn expand_grid(base: &TrainConfig, axes: &[Axis]) -> Vec<(String, TrainConfig)> {
    let mut variants = vec![(String::new(), base.clone())];
    for axis in axes {
        let mut next = Vec::with_capacity(variants.len() * axis.len());
        for (name, config) in &variants {
            for k in 0..axis.len() {
                let mut c = config.clone();
                let label = axis.apply(k, &mut c);
                let name = if name.is_empty() { label } else { format!("{name};{label}") };
                next.push((name, c));
            }
        }
        variants = next;
    }
    if variants.len() == 1 && variants[0].0.is_empty() {
        variants[0].0 = "base".into();
    }
    variants
}

/// Mean accuracy over `seeds` consecutive seeds of every configuration on
/// every dataset.
pub fn ablate(splits: &[DatasetSplit], variants: &[(String, TrainConfig)], seeds: usize) -> Result<AccuracyMatrix> {
    if splits.is_empty() || variants.is_empty() || seeds == 0 {
        return Err(Error::InvalidConfig("ablation needs datasets, variants and seeds".into()));
    }
    let mut rows = Vec::with_capacity(splits.len());
    for split in splits {
        let row = variants
            .iter()
            .map(|(_, config)| bench(split, config, seeds).map(|r| r.accuracy_mean_std().0))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    AccuracyMatrix::new(
        rows,
        splits.iter().map(|s| s.name.clone()).collect(),
        variants.iter().map(|(n, _)| n.clone()).collect(),
    )
}

/// `index,label,frac_0,...,frac_{c-1}` with label tokens.
pub fn prediction_csv(model: &Forest, pred: &Prediction) -> String {
    let mut out = String::from("index,label");
    for k in 0..model.n_classes() {
        write!(out, ",frac_{k}").unwrap();
    }
    out.push('\n');
    for (i, &label) in pred.labels.iter().enumerate() {
        write!(out, "{i},{}", model.label_names()[label]).unwrap();
        for v in pred.votes.row(i) {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// `repr,agg,start,end,mdi` for every pool feature.
pub fn importance_csv(model: &Forest) -> String {
    let mut out = String::from("repr,agg,start,end,mdi\n");
    for (f, v) in model.pool().features().iter().zip(mdi(model)) {
        writeln!(out, "{},{},{},{},{v}", f.repr, f.agg, f.start, f.end).unwrap();
    }
    out
}

/// `group,importance` for representation or aggregation importances.
pub fn group_importance_csv(names: &[&str], values: &[f64]) -> String {
    let mut out = String::from("group,importance\n");
    for (n, v) in names.iter().zip(values) {
        writeln!(out, "{n},{v}").unwrap();
    }
    out
}

/// `index,weight`.
pub fn heatmap_csv(heatmap: &Heatmap) -> String {
    let mut out = String::from("index,weight\n");
    for (i, w) in heatmap.weights.iter().enumerate() {
        writeln!(out, "{i},{w}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_parsing() {
        assert_eq!(
            Axis::parse("split-mode=et/et1").unwrap(),
            Axis::SplitMode(vec![SplitMode::ExtraTrees, SplitMode::ExtraTreesSingle])
        );
        assert_eq!(
            Axis::parse("reprs=ori/ori,per").unwrap(),
            Axis::Representations(vec![
                vec![Representation::Original],
                vec![Representation::Original, Representation::Periodogram]
            ])
        );
        assert_eq!(Axis::parse("dsets=10/50").unwrap(), Axis::Runs(vec![10, 50]));
        assert!(Axis::parse("split-mode=zz").is_err());
        assert!(Axis::parse("colour=red").is_err());
        assert!(Axis::parse("dsets").is_err());
    }

    #[test]
    fn grid_is_cartesian() {
        let axes = [
            Axis::parse("split-mode=et/et1").unwrap(),
            Axis::parse("partition-mode=random/fixed").unwrap(),
        ];
        let grid = expand_grid(&TrainConfig::default(), &axes);
        let names: Vec<&str> = grid.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(
            names,
            [
                "split=et;partition=random",
                "split=et;partition=fixed",
                "split=et1;partition=random",
                "split=et1;partition=fixed"
            ]
        );
        assert_eq!(grid[3].1.split_mode, SplitMode::ExtraTreesSingle);
        assert_eq!(grid[3].1.partition_mode, PartitionMode::Fixed);
        assert_eq!(expand_grid(&TrainConfig::default(), &[])[0].0, "base");
    }

    #[test]
    fn mean_std_population() {
        let (m, s) = mean_std([1.0, 3.0].into_iter());
        assert_eq!((m, s), (2.0, 1.0));
    }
}
