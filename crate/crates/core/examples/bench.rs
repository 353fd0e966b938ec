//! Accuracy spread and wall time over repeated seeds.
//!
//! ```sh
//! cargo run --release --example bench -- [RUNS] [TRAIN.tsv TEST.tsv]
//! ```

use rstsf::harness::{bench, DatasetSplit};
use rstsf::TrainConfig;

fn main() -> rstsf::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let runs = args.first().and_then(|a| a.parse().ok()).unwrap_or(10);
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let split = match &args[..] {
        [_, train, test] => DatasetSplit::load(train, test)?,
        _ => DatasetSplit::load(format!("{dir}/Chinatown_TRAIN.tsv"), format!("{dir}/Chinatown_TEST.tsv"))?,
    };
    println!("{} x {runs} runs", split.name);
    let report = bench(&split, &TrainConfig::default(), runs)?;
    print!("{}", report.to_text());
    Ok(())
}
