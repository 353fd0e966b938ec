//! Saving a model to its text format and loading it back.
//!
//! ```sh
//! cargo run --example model_persistence
//! ```

use rstsf::{fit, load_model, load_ucr_tsv, model_io, save_model, TrainConfig};

fn main() -> rstsf::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let train = load_ucr_tsv(format!("{dir}/Chinatown_TRAIN.tsv"))?;
    let test = load_ucr_tsv(format!("{dir}/Chinatown_TEST.tsv"))?;
    let config = TrainConfig {
        trees: 100,
        runs: 20,
        seed: 42,
        ..TrainConfig::default()
    };
    let model = fit(&train, &config)?;

    let path = std::env::temp_dir().join("chinatown.rstsf");
    save_model(&model, &path)?;
    let text = std::fs::read_to_string(&path).unwrap();
    println!("wrote {} ({} bytes, {} lines)", path.display(), text.len(), text.lines().count());
    for line in text.lines().take(8) {
        println!("  {line}");
    }

    let loaded = load_model(&path)?;
    assert_eq!(model_io::to_string(&loaded), text);
    let same = model.predict_tokens(&test)? == loaded.predict_tokens(&test)?;
    println!("reloaded model predicts identically: {same}");

    let broken = text.replacen("rstsf-model 1", "rstsf-model 2", 1);
    match model_io::from_str(&broken) {
        Err(e) => println!("bumped version rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
