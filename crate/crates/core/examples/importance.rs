//! Mean-decrease-in-impurity importances of a fitted forest.
//!
//! ```sh
//! cargo run --release --example importance
//! ```

use rstsf::harness::importance_csv;
use rstsf::{fit, load_ucr_tsv, Aggregation, ImportanceReport, Representation, TrainConfig};

fn bar(v: f64) -> String {
    "#".repeat((v * 60.0).round() as usize)
}

fn main() -> rstsf::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/Chinatown_TRAIN.tsv");
    let train = load_ucr_tsv(path)?;
    let model = fit(&train, &TrainConfig::default())?;
    let report = ImportanceReport::new(&model);

    println!("representation importance");
    for (r, v) in Representation::ALL.iter().zip(&report.repr_importance) {
        println!("  {:<4} {v:.3} {}", r.code(), bar(*v));
    }
    println!("aggregation importance");
    for (a, v) in Aggregation::ALL.iter().zip(&report.agg_importance) {
        println!("  {:<6} {v:.3} {}", a.code(), bar(*v));
    }

    let mut order: Vec<usize> = report.used_features.clone();
    order.sort_by(|&a, &b| report.per_feature_mdi[b].total_cmp(&report.per_feature_mdi[a]));
    println!(
        "{} of {} pool features appear in a split; top ten:",
        report.used_features.len(),
        model.pool().len()
    );
    for &j in order.iter().take(10) {
        println!("  {:<22} {:.4}", model.pool().get(j).to_string(), report.per_feature_mdi[j]);
    }

    let csv = importance_csv(&model);
    println!("importance CSV has {} rows, e.g.\n{}", csv.lines().count() - 1, csv.lines().take(3).collect::<Vec<_>>().join("\n"));
    Ok(())
}
