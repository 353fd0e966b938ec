//! Accuracy matrix over configuration variants, with average ranks and
//! difficulty-weighted accuracy.
//!
//! ```sh
//! cargo run --release --example ablation -- [UCR_DIR NAME...]
//! ```

use rstsf::harness::{ablate, expand_grid, find_ucr_dataset, Axis, DatasetSplit};
use rstsf::metrics::{average_rank, weighted_average_accuracy};
use rstsf::TrainConfig;

fn main() -> rstsf::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut splits = Vec::new();
    if let [dir, names @ ..] = &args[..] {
        for name in names {
            match find_ucr_dataset(dir, name) {
                Some((train, test)) => splits.push(DatasetSplit::load(train, test)?),
                None => eprintln!("skipping {name}: not found under {dir}"),
            }
        }
    }
    if splits.is_empty() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
        splits.push(DatasetSplit::load(
            format!("{dir}/Chinatown_TRAIN.tsv"),
            format!("{dir}/Chinatown_TEST.tsv"),
        )?);
    }

    let axes = [
        Axis::parse("split-mode=et/et1/rf")?,
        Axis::parse("partition-mode=random/fixed")?,
    ];
    let base = TrainConfig {
        trees: 200,
        ..TrainConfig::default()
    };
    let grid = expand_grid(&base, &axes);
    let matrix = ablate(&splits, &grid, 3)?;
    print!("{}", matrix.to_csv());

    let ranks = average_rank(&matrix);
    let best = (0..ranks.len()).min_by(|&a, &b| ranks[a].total_cmp(&ranks[b])).unwrap();
    println!("best average rank: {} ({:.2})", matrix.classifiers()[best], ranks[best]);
    if let Ok(waa) = weighted_average_accuracy(&matrix) {
        println!("weighted accuracy range: {:.2} .. {:.2}", waa.iter().cloned().fold(f64::INFINITY, f64::min), waa.iter().cloned().fold(0.0, f64::max));
    }
    Ok(())
}
