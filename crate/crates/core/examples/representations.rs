//! The four views of a series used for feature extraction.
//!
//! ```sh
//! cargo run --example representations
//! ```

use rstsf::{burg_ar, derivative, load_ucr_tsv, periodogram, schwert_lag};

fn show(name: &str, values: &[f64]) {
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.2}")).collect();
    println!("{name:>13} ({:>2}): {}", values.len(), shown.join(" "));
}

fn main() -> rstsf::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/Chinatown_TRAIN.tsv");
    let train = load_ucr_tsv(path)?;
    let series = train.series(0).to_vec();
    let m = series.len();
    let lag = schwert_lag(m);

    println!("series 0 of {} (label {})", train.name(), train.label_tokens().next().unwrap());
    show("original", &series);
    show("periodogram", &periodogram(&series));
    show("derivative", &derivative(&series));
    let ar = burg_ar(&series, lag)?;
    show(&format!("AR({lag})"), &ar.coefficients);

    // a pure cosine puts all its energy into one frequency bin
    let cosine: Vec<f64> = (0..8).map(|t| (std::f64::consts::TAU * t as f64 / 8.0).cos()).collect();
    show("cosine |DFT|", &periodogram(&cosine));
    Ok(())
}
