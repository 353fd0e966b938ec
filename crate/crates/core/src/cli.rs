//! Command-line front end. Exit codes: 0 success, 1 usage, 2 data, 3 model.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::aggregate::Aggregation;
use crate::dataset::load_ucr_tsv;
use crate::error::{Error, ErrorKind, Result};
use crate::forest::{fit, TrainConfig};
use crate::harness::{
    ablate, bench, evaluate, expand_grid, find_ucr_dataset, group_importance_csv, heatmap_csv,
    importance_csv, prediction_csv, Axis, DatasetSplit,
};
use crate::interpret::{group_importance, interval_heatmap, GroupBy};
use crate::model_io::{load_model, save_model};
use crate::representations::Representation;

#[derive(Parser, Debug)]
#[command(name = "rstsf", version, about = "Interval-feature forest classifier for univariate time series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct TrainArgs {
    /// Number of trees.
    #[arg(long, default_value_t = 500)]
    trees: usize,
    /// Number of interval extraction runs merged into the feature pool.
    #[arg(long, default_value_t = 50)]
    dsets: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated subset of ori,per,der,reg.
    #[arg(long, default_value = "ori,per,der,reg")]
    reprs: String,
    /// Comma-separated subset of mean,std,slope,median,iqr,min,max,cmc,cam.
    #[arg(long, default_value = "mean,std,slope,median,iqr,min,max,cmc,cam")]
    aggs: String,
    /// et, et1, rf or rf-all.
    #[arg(long, default_value = "et")]
    split_mode: String,
    /// random or fixed.
    #[arg(long, default_value = "random")]
    partition_mode: String,
    /// Candidate features per node: sqrt or a count.
    #[arg(long, default_value = "sqrt")]
    candidates: String,
}

impl TrainArgs {
    fn config(&self) -> Result<TrainConfig> {
        let list = |s: &str| s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect::<Vec<_>>();
        let config = TrainConfig {
            trees: self.trees,
            runs: self.dsets,
            seed: self.seed,
            representations: list(&self.reprs).iter().map(|t| t.parse()).collect::<Result<_>>()?,
            aggregations: list(&self.aggs).iter().map(|t| t.parse()).collect::<Result<_>>()?,
            split_mode: self.split_mode.parse()?,
            partition_mode: self.partition_mode.parse()?,
            candidates: self.candidates.parse()?,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a model and write it to a file.
    Fit {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        train_args: TrainArgs,
    },
    /// Write per-series predictions and vote fractions as CSV.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print test accuracy in percent.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
    },
    /// Write feature importances as CSV.
    Importance {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// feature (per pool feature), repr or agg.
        #[arg(long, default_value = "feature")]
        by: String,
        /// Restrict aggregation importances to one representation.
        #[arg(long)]
        repr: Option<String>,
    },
    /// Write a discriminatory-interval heatmap as CSV.
    Heatmap {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "ori")]
        repr: String,
        /// Only count splits on this aggregation.
        #[arg(long)]
        agg: Option<String>,
    },
    /// Repeated fit and evaluate with consecutive seeds.
    Bench {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        train_args: TrainArgs,
    },
    /// Accuracy matrix over a grid of configurations and datasets.
    Ablate {
        /// Training files, paired in order with --test.
        #[arg(long)]
        train: Vec<PathBuf>,
        #[arg(long)]
        test: Vec<PathBuf>,
        /// UCR archive directory, used with --datasets.
        #[arg(long)]
        ucr_dir: Option<PathBuf>,
        /// Comma-separated dataset names under --ucr-dir.
        #[arg(long)]
        datasets: Option<String>,
        /// Grid axis, e.g. split-mode=et/et1 or reprs=ori/ori,per (repeatable).
        #[arg(long = "axis")]
        axes: Vec<String>,
        /// Seeds averaged per cell.
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        train_args: TrainArgs,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Fit { train, out, train_args } => {
            let config = train_args.config()?;
            let ds = load_ucr_tsv(&train)?;
            let t0 = Instant::now();
            let model = fit(&ds, &config)?;
            let secs = t0.elapsed().as_secs_f64();
            save_model(&model, &out)?;
            println!(
                "fitted {} trees on {} series; pool size {}; train seconds {secs:.3}",
                model.trees().len(),
                ds.n_series(),
                model.pool().len()
            );
        }
        Command::Predict { model, test, out } => {
            let model = load_model(&model)?;
            let ds = load_ucr_tsv(&test)?;
            let pred = model.predict(ds.values().view())?;
            emit(out.as_deref(), &prediction_csv(&model, &pred))?;
        }
        Command::Evaluate { model, test } => {
            let model = load_model(&model)?;
            let ds = load_ucr_tsv(&test)?;
            println!("{}", evaluate(&model, &ds)?);
        }
        Command::Importance { model, out, by, repr } => {
            let model = load_model(&model)?;
            let filter: Option<Representation> = repr.as_deref().map(str::parse).transpose()?;
            let text = match by.as_str() {
                "feature" => importance_csv(&model),
                "repr" => {
                    let names: Vec<&str> = Representation::ALL.iter().map(|r| r.code()).collect();
                    group_importance_csv(&names, &group_importance(&model, GroupBy::Representation, None))
                }
                "agg" => {
                    let names: Vec<&str> = Aggregation::ALL.iter().map(|a| a.code()).collect();
                    group_importance_csv(&names, &group_importance(&model, GroupBy::Aggregation, filter))
                }
                other => return Err(Error::InvalidConfig(format!("unknown grouping {other:?}"))),
            };
            emit(out.as_deref(), &text)?;
        }
        Command::Heatmap { model, out, repr, agg } => {
            let model = load_model(&model)?;
            let repr: Representation = repr.parse()?;
            let agg: Option<Aggregation> = agg.as_deref().map(str::parse).transpose()?;
            emit(out.as_deref(), &heatmap_csv(&interval_heatmap(&model, repr, agg)))?;
        }
        Command::Bench { train, test, runs, out, train_args } => {
            let config = train_args.config()?;
            let split = DatasetSplit::load(&train, &test)?;
            let report = bench(&split, &config, runs)?;
            emit(out.as_deref(), &report.to_text())?;
        }
        Command::Ablate {
            train,
            test,
            ucr_dir,
            datasets,
            axes,
            runs,
            out,
            train_args,
        } => {
            let base = train_args.config()?;
            if train.len() != test.len() {
                return Err(Error::InvalidConfig("--train and --test must be given the same number of times".into()));
            }
            let mut splits = train
                .iter()
                .zip(&test)
                .map(|(a, b)| DatasetSplit::load(a, b))
                .collect::<Result<Vec<_>>>()?;
            if let Some(names) = datasets {
                let dir = ucr_dir.ok_or_else(|| Error::InvalidConfig("--datasets needs --ucr-dir".into()))?;
                for name in names.split(',').map(str::trim).filter(|n| !n.is_empty()) {
                    let (a, b) = find_ucr_dataset(&dir, name).ok_or_else(|| {
                        Error::io(dir.join(name), std::io::Error::from(std::io::ErrorKind::NotFound))
                    })?;
                    splits.push(DatasetSplit::load(a, b)?);
                }
            }
            let axes = axes.iter().map(|a| Axis::parse(a)).collect::<Result<Vec<_>>>()?;
            let grid = expand_grid(&base, &axes);
            let matrix = ablate(&splits, &grid, runs)?;
            emit(out.as_deref(), &matrix.to_csv())?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind as K;
            if matches!(e.kind(), K::DisplayHelp | K::DisplayVersion | K::DisplayHelpOnMissingArgumentOrSubcommand) {
                print!("{e}");
                return if e.kind() == K::DisplayHelpOnMissingArgumentOrSubcommand { 1 } else { 0 };
            }
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid arguments"));
            return 1;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Data => 2,
                ErrorKind::Model => 3,
            }
        }
    }
}
