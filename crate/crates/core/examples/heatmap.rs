//! Where in each representation the forest finds its discriminating
//! intervals.
//!
//! ```sh
//! cargo run --release --example heatmap
//! ```

use rstsf::harness::heatmap_csv;
use rstsf::{fit, interval_heatmap, load_ucr_tsv, Aggregation, Representation, TrainConfig};

const SHADES: [char; 5] = [' ', '.', ':', '*', '#'];

fn shade(weights: &[f64]) -> String {
    weights
        .iter()
        .map(|w| SHADES[((w * 4.0).round() as usize).min(4)])
        .collect()
}

fn main() -> rstsf::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/Chinatown_TRAIN.tsv");
    let train = load_ucr_tsv(path)?;
    let model = fit(&train, &TrainConfig::default())?;

    for repr in Representation::ALL {
        let h = interval_heatmap(&model, repr, None);
        println!("{:<4} |{}|", repr.code(), shade(&h.weights));
    }
    let max_only = interval_heatmap(&model, Representation::Original, Some(Aggregation::Max));
    println!("ori/max |{}|", shade(&max_only.weights));

    // Chinatown series cover 24 hours of pedestrian counts
    let h = interval_heatmap(&model, Representation::Original, None);
    let peak = h.weights.iter().position(|&w| w == 1.0).unwrap_or(0);
    println!("most used hour: {peak}:00");
    print!("{}", heatmap_csv(&h));
    Ok(())
}
