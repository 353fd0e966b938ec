//! The four series representations interval features are drawn from:
//! the raw series, its DFT magnitude spectrum, its first difference, and its
//! autoregressive coefficients.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::dataset::{LabeledDataset, MIN_SERIES_LEN};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Representation {
    Original,
    Periodogram,
    Derivative,
    Autoregressive,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::Original,
        Representation::Periodogram,
        Representation::Derivative,
        Representation::Autoregressive,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            Representation::Original => "ori",
            Representation::Periodogram => "per",
            Representation::Derivative => "der",
            Representation::Autoregressive => "reg",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Representation::ALL
            .into_iter()
            .find(|r| r.code() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown representation {s:?}")))
    }
}

/// Magnitudes of the unnormalized DFT at frequency indices `1..=m/2`.
pub fn periodogram(series: &[f64]) -> Vec<f64> {
    let fft = FftPlanner::new().plan_fft_forward(series.len());
    periodogram_with(&fft, series)
}

fn periodogram_with(fft: &Arc<dyn Fft<f64>>, series: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = series.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft.process(&mut buf);
    buf[1..=series.len() / 2].iter().map(|c| c.norm()).collect()
}

/// First differences `x[t+1] - x[t]`.
pub fn derivative(series: &[f64]) -> Vec<f64> {
    series.windows(2).map(|w| w[1] - w[0]).collect()
}

/// Autoregressive lag order `12 (m/100)^(1/4)`, rounded half away from zero
/// and clamped to `[1, m-2]`.
pub fn schwert_lag(m: usize) -> usize {
    let raw = (12.0 * (m as f64 / 100.0).powf(0.25)).round() as usize;
    raw.clamp(1, m.saturating_sub(2).max(1))
}

/// Autoregressive coefficients estimated with Burg's method.
#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    /// `β_1..β_l` with `x_t ≈ b + Σ β_k x_{t-k}`.
    pub coefficients: Vec<f64>,
    /// Set when the series has zero variance and no model could be fitted.
    pub degenerate: bool,
}

/// Fits an order-`lag` AR model to the mean-centered series by Burg's
/// forward/backward reflection recursion.
pub fn burg_ar(series: &[f64], lag: usize) -> Result<ArFit> {
    let m = series.len();
    if lag == 0 || lag + 2 > m {
        return Err(Error::InvalidConfig(format!(
            "AR lag {lag} outside [1, {}]",
            m.saturating_sub(2)
        )));
    }
    if series.iter().all(|&x| x == series[0]) {
        return Ok(ArFit {
            coefficients: vec![0.0; lag],
            degenerate: true,
        });
    }
    let mean = series.iter().sum::<f64>() / m as f64;
    let mut fwd: Vec<f64> = series.iter().map(|x| x - mean).collect();
    let mut bwd = fwd.clone();

    // Prediction-error filter a[0] = 1, x_t + Σ a_k x_{t-k} = e_t.
    let mut a = vec![0.0; lag + 1];
    a[0] = 1.0;
    let mut prev = a.clone();
    for k in 0..lag {
        let mut num = 0.0;
        let mut den = 0.0;
        for t in (k + 1)..m {
            num += fwd[t] * bwd[t - 1];
            den += fwd[t] * fwd[t] + bwd[t - 1] * bwd[t - 1];
        }
        if den <= 0.0 {
            break;
        }
        let refl = -2.0 * num / den;

        prev[..=k + 1].copy_from_slice(&a[..=k + 1]);
        for i in 1..=k + 1 {
            a[i] = prev[i] + refl * prev[k + 1 - i];
        }

        for t in ((k + 1)..m).rev() {
            let f = fwd[t];
            let b = bwd[t - 1];
            fwd[t] = f + refl * b;
            bwd[t] = b + refl * f;
        }
    }
    Ok(ArFit {
        coefficients: a[1..].iter().map(|c| -c).collect(),
        degenerate: false,
    })
}

// periodogram, derivative and AR coefficients of one series
type DerivedRow = (Vec<f64>, Vec<f64>, Vec<f64>);

/// All four representations of a set of series plus per-row means of each.
#[derive(Debug, Clone)]
pub struct RepresentationSet {
    matrices: [Array2<f64>; 4],
    means: [Vec<f64>; 4],
    lag: usize,
}

impl RepresentationSet {
    /// Transforms every row of `values` using AR order `lag`.
    pub fn from_values(values: ArrayView2<'_, f64>, lag: usize) -> Result<Self> {
        let (n, m) = values.dim();
        if m < MIN_SERIES_LEN {
            return Err(Error::SeriesTooShort(m));
        }
        if lag == 0 || lag + 2 > m {
            return Err(Error::InvalidConfig(format!("AR lag {lag} invalid for length {m}")));
        }
        let fft = FftPlanner::new().plan_fft_forward(m);
        let rows: Vec<DerivedRow> = values
            .axis_iter(Axis(0))
            .into_par_iter()
            .map(|row| {
                let row = row.to_vec();
                let ar = burg_ar(&row, lag)?;
                Ok((periodogram_with(&fft, &row), derivative(&row), ar.coefficients))
            })
            .collect::<Result<_>>()?;

        let stack = |width: usize, pick: &dyn Fn(&DerivedRow) -> &[f64]| {
            let mut out = Array2::zeros((n, width));
            for (mut dst, src) in out.rows_mut().into_iter().zip(&rows) {
                dst.assign(&ArrayView1::from(pick(src)));
            }
            out
        };
        let matrices = [
            values.to_owned(),
            stack(m / 2, &|r| &r.0),
            stack(m - 1, &|r| &r.1),
            stack(lag, &|r| &r.2),
        ];
        let means = std::array::from_fn(|k| {
            matrices[k]
                .rows()
                .into_iter()
                .map(|r| r.sum() / r.len() as f64)
                .collect()
        });
        Ok(RepresentationSet {
            matrices,
            means,
            lag,
        })
    }

    pub fn get(&self, repr: Representation) -> &Array2<f64> {
        &self.matrices[repr.index()]
    }

    /// Mean of each full row of `repr`.
    pub fn row_means(&self, repr: Representation) -> &[f64] {
        &self.means[repr.index()]
    }

    pub fn width(&self, repr: Representation) -> usize {
        self.matrices[repr.index()].ncols()
    }

    pub fn n_series(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn lag(&self) -> usize {
        self.lag
    }
}

/// Computes the representation set of a dataset with the lag given by
/// [`schwert_lag`].
pub fn build_representation_set(ds: &LabeledDataset) -> Result<RepresentationSet> {
    RepresentationSet::from_values(ds.values().view(), schwert_lag(ds.series_len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn dft_magnitudes(x: &[f64]) -> Vec<f64> {
        let m = x.len();
        (1..=m / 2)
            .map(|j| {
                let (mut re, mut im) = (0.0, 0.0);
                for (t, &v) in x.iter().enumerate() {
                    let angle = -2.0 * PI * (j * t) as f64 / m as f64;
                    re += v * angle.cos();
                    im += v * angle.sin();
                }
                re.hypot(im)
            })
            .collect()
    }

    #[test]
    fn periodogram_of_constant_is_zero() {
        let p = periodogram(&[5.0; 8]);
        assert_eq!(p.len(), 4);
        for v in p {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn periodogram_of_cosine() {
        let x: Vec<f64> = (0..8).map(|t| (2.0 * PI * t as f64 / 8.0).cos()).collect();
        let oracle = dft_magnitudes(&x);
        let p = periodogram(&x);
        for (got, want) in p.iter().zip([4.0, 0.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        for (got, want) in p.iter().zip(&oracle) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn periodogram_odd_length() {
        assert_eq!(periodogram(&[1.0, 2.0, 0.0, -1.0, 3.0, 2.0, 1.0]).len(), 3);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(derivative(&[1.0, 3.0, 6.0, 10.0]), vec![2.0, 3.0, 4.0]);
        assert_eq!(derivative(&[4.0; 5]), vec![0.0; 4]);
        assert_eq!(derivative(&[2.0, 1.0]), vec![-1.0]);
    }

    #[test]
    fn schwert_lag_examples() {
        assert_eq!(schwert_lag(100), 12);
        assert_eq!(schwert_lag(1600), 24);
        assert_eq!(schwert_lag(4), 2);
        assert_eq!(schwert_lag(3), 1);
        // 12 * 0.24^0.25 = 8.40...
        assert_eq!(schwert_lag(24), 8);
    }

    #[test]
    fn burg_on_geometric_decay() {
        // Burg's symmetric estimate on x_t = ρ^t is not ρ. The uncentered
        // first reflection coefficient is 2ρ/(1+ρ²) = 0.8; on the centered
        // series the reference value is 0.79195449004...
        let x: Vec<f64> = (0..64).map(|t| 0.5f64.powi(t)).collect();
        let fit = burg_ar(&x, 1).unwrap();
        assert!(!fit.degenerate);
        assert_abs_diff_eq!(fit.coefficients[0], 0.7919544900446972, epsilon = 1e-9);
    }

    #[test]
    fn burg_constant_is_degenerate() {
        for lag in 1..5 {
            let fit = burg_ar(&[3.0; 8], lag).unwrap();
            assert!(fit.degenerate);
            assert_eq!(fit.coefficients, vec![0.0; lag]);
        }
    }

    #[test]
    fn burg_rejects_bad_lag() {
        assert!(burg_ar(&[1.0, 2.0, 3.0], 2).is_err());
        assert!(burg_ar(&[1.0, 2.0, 3.0], 0).is_err());
    }

    #[test]
    fn representation_shapes() {
        let values = Array2::from_shape_fn((2, 24), |(i, j)| ((i + 1) * j) as f64 % 7.0);
        let reps = RepresentationSet::from_values(values.view(), schwert_lag(24)).unwrap();
        assert_eq!(reps.get(Representation::Original).dim(), (2, 24));
        assert_eq!(reps.get(Representation::Periodogram).dim(), (2, 12));
        assert_eq!(reps.get(Representation::Derivative).dim(), (2, 23));
        assert_eq!(reps.get(Representation::Autoregressive).dim(), (2, 8));
        assert_eq!(reps.lag(), 8);
    }

    #[test]
    fn constant_rows() {
        let values = Array2::from_elem((3, 10), 2.5);
        let reps = RepresentationSet::from_values(values.view(), schwert_lag(10)).unwrap();
        assert!(reps.get(Representation::Periodogram).iter().all(|v| v.abs() < 1e-12));
        assert!(reps.get(Representation::Derivative).iter().all(|&v| v == 0.0));
        assert!(reps.get(Representation::Autoregressive).iter().all(|&v| v == 0.0));
        assert_eq!(reps.row_means(Representation::Original), &[2.5, 2.5, 2.5]);
    }

    #[test]
    fn single_row() {
        let values = Array2::from_shape_fn((1, 16), |(_, j)| (j as f64).sin());
        let reps = RepresentationSet::from_values(values.view(), schwert_lag(16)).unwrap();
        assert_eq!(reps.n_series(), 1);
        for r in Representation::ALL {
            assert_eq!(reps.get(r).nrows(), 1);
        }
    }
}
