//! Supervised interval search and the merged candidate pool.
//!
//! ```sh
//! cargo run --example interval_search
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rstsf::intervals::{evaluate_pool, Target};
use rstsf::representations::build_representation_set;
use rstsf::{
    build_feature_pool, fisher_score, load_ucr_tsv, supervised_interval_search, Aggregation,
    ExtractionConfig, IndexedRepresentations, PartitionMode, Representation,
};

fn main() -> rstsf::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/Chinatown_TRAIN.tsv");
    let train = load_ucr_tsv(path)?;
    let reps = build_representation_set(&train)?;
    let index = IndexedRepresentations::new(&reps);
    let counts = train.class_counts();
    let target = Target {
        labels: train.labels(),
        counts: &counts,
    };

    // one search: each step keeps the better-scoring half
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut path_taken = Vec::new();
    let hi = reps.width(Representation::Original) - 1;
    supervised_interval_search(
        &index,
        Representation::Original,
        Aggregation::Mean,
        target,
        0,
        hi,
        PartitionMode::Random,
        &mut rng,
        &mut path_taken,
    )?;
    println!("search over original/mean:");
    for f in &path_taken {
        let score = fisher_score(&index.column(f)?, train.labels(), &counts)?;
        println!("  {f:<20} fisher {score:.3}");
    }

    for runs in [1, 10, 50] {
        let pool = build_feature_pool(&index, target, runs, &ExtractionConfig::default(), 0)?;
        println!("{runs:>3} runs -> {} distinct features", pool.len());
    }

    let pool = build_feature_pool(&index, target, 50, &ExtractionConfig::default(), 0)?;
    let matrix = evaluate_pool(&index, &pool)?;
    let mut scored: Vec<(f64, usize)> = (0..pool.len())
        .map(|j| (fisher_score(matrix.column(j), train.labels(), &counts).unwrap(), j))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    println!("highest Fisher scores in the pool:");
    for (score, j) in scored.iter().take(8) {
        println!("  {:<20} {score:.3}", pool.get(*j).to_string());
    }
    Ok(())
}
