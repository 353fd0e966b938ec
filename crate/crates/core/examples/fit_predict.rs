//! Fit a forest on the bundled Chinatown split and report test accuracy.
//!
//! ```sh
//! cargo run --release --example fit_predict -- [TRAIN.tsv TEST.tsv]
//! ```

use std::time::Instant;

use rstsf::{evaluate, fit, load_ucr_tsv, TrainConfig};

fn main() -> rstsf::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let (train, test) = match args.as_slice() {
        [a, b] => (a.clone(), b.clone()),
        _ => (format!("{data}/Chinatown_TRAIN.tsv"), format!("{data}/Chinatown_TEST.tsv")),
    };
    let train = load_ucr_tsv(train)?;
    let test = load_ucr_tsv(test)?;
    println!(
        "{}: {} train / {} test series of length {}, {} classes",
        train.name(),
        train.n_series(),
        test.n_series(),
        train.series_len(),
        train.n_classes()
    );

    let t0 = Instant::now();
    let model = fit(&train, &TrainConfig::default())?;
    println!(
        "fitted {} trees over {} candidate features in {:.2} s",
        model.trees().len(),
        model.pool().len(),
        t0.elapsed().as_secs_f64()
    );

    let pred = model.predict(test.values().view())?;
    for i in 0..5.min(test.n_series()) {
        let votes = pred.votes.row(i);
        println!(
            "series {i}: predicted {} (votes {:.3?}), true {}",
            model.label_names()[pred.labels[i]],
            votes.as_slice().unwrap(),
            test.label_tokens().nth(i).unwrap()
        );
    }
    println!("test accuracy {:.2}%", evaluate(&model, &test)?);
    Ok(())
}
