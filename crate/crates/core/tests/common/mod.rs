#![allow(dead_code)]

use std::path::PathBuf;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rstsf::harness::{find_ucr_dataset, DatasetSplit};
use rstsf::LabeledDataset;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

/// Looks for `name` under `$RSTSF_UCR_DIR` first, then in the bundled data.
pub fn load_split(name: &str) -> Option<DatasetSplit> {
    let mut dirs = Vec::new();
    if let Some(dir) = std::env::var_os("RSTSF_UCR_DIR") {
        dirs.push(PathBuf::from(dir));
    }
    dirs.push(data_dir());
    dirs.iter()
        .find_map(|d| find_ucr_dataset(d, name))
        .map(|(train, test)| DatasetSplit::load(train, test).expect("readable dataset"))
}

pub fn chinatown() -> DatasetSplit {
    load_split("Chinatown").expect("bundled Chinatown split")
}

/// Two-class synthetic problem: noisy series where class 1 carries a bump
/// at a class-specific position.
pub fn bumps(n: usize, m: usize, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = Vec::with_capacity(n);
    let values = Array2::from_shape_fn((n, m), |(i, j)| {
        let class = i % 2;
        if j == 0 {
            labels.push(class.to_string());
        }
        let centre = if class == 0 { 0.3 } else { 0.7 } * m as f64;
        let width = m as f64 / 10.0;
        let bump = (-((j as f64 - centre) / width).powi(2)).exp();
        bump + 0.3 * rng.random_range(-1.0..1.0)
    });
    LabeledDataset::from_tokens("bumps", values, &labels).unwrap()
}

/// Standard normal draws by the Box-Muller transform.
pub fn normals(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let u: f64 = 1.0 - rng.random::<f64>();
            let v: f64 = rng.random();
            (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
        })
        .collect()
}

/// Simulates `x_t = Σ beta_k x_{t-k} + e_t` after a burn-in.
pub fn simulate_ar(beta: &[f64], m: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burn = 500;
    let noise = normals(&mut rng, m + burn);
    let mut x = vec![0.0; m + burn];
    for t in 0..m + burn {
        let mut v = noise[t];
        for (k, b) in beta.iter().enumerate() {
            if t > k {
                v += b * x[t - k - 1];
            }
        }
        x[t] = v;
    }
    x.split_off(burn)
}
