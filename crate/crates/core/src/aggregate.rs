//! Summary statistics applied to a sub-series to produce one interval
//! feature value.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Aggregation {
    Mean,
    Std,
    Slope,
    Median,
    Iqr,
    Min,
    Max,
    /// Count of mean crossings against the whole-row mean.
    Cmc,
    /// Count of values above the segment mean.
    Cam,
}

impl Aggregation {
    pub const ALL: [Aggregation; 9] = [
        Aggregation::Mean,
        Aggregation::Std,
        Aggregation::Slope,
        Aggregation::Median,
        Aggregation::Iqr,
        Aggregation::Min,
        Aggregation::Max,
        Aggregation::Cmc,
        Aggregation::Cam,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            Aggregation::Mean => "mean",
            Aggregation::Std => "std",
            Aggregation::Slope => "slope",
            Aggregation::Median => "median",
            Aggregation::Iqr => "iqr",
            Aggregation::Min => "min",
            Aggregation::Max => "max",
            Aggregation::Cmc => "cmc",
            Aggregation::Cam => "cam",
        }
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Aggregation::ALL
            .into_iter()
            .find(|a| a.code() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown aggregation {s:?}")))
    }
}

/// Applies `agg` to `segment`. `series_mean` is the mean of the entire
/// representation row the segment was cut from; only `Cmc` reads it.
///
/// Panics on an empty segment.
pub fn aggregate(agg: Aggregation, segment: &[f64], series_mean: f64) -> f64 {
    assert!(!segment.is_empty(), "aggregate over an empty segment");
    let w = segment.len();
    match agg {
        Aggregation::Mean => mean(segment),
        Aggregation::Std => {
            let mu = mean(segment);
            (segment.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / w as f64).sqrt()
        }
        Aggregation::Slope => slope(segment),
        Aggregation::Median => quantile(&sorted(segment), 0.5),
        Aggregation::Iqr => {
            let s = sorted(segment);
            quantile(&s, 0.75) - quantile(&s, 0.25)
        }
        Aggregation::Min => segment.iter().copied().fold(f64::INFINITY, f64::min),
        Aggregation::Max => segment.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Aggregation::Cmc => segment
            .windows(2)
            .filter(|p| (p[0] - series_mean) * (p[1] - series_mean) < 0.0)
            .count() as f64,
        Aggregation::Cam => {
            let mu = mean(segment);
            segment.iter().filter(|&&x| x > mu).count() as f64
        }
    }
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn slope(x: &[f64]) -> f64 {
    let w = x.len();
    if w < 2 {
        return 0.0;
    }
    let t_mean = (w - 1) as f64 / 2.0;
    let x_mean = mean(x);
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, &v) in x.iter().enumerate() {
        let dt = t as f64 - t_mean;
        num += dt * (v - x_mean);
        den += dt * dt;
    }
    num / den
}

fn sorted(x: &[f64]) -> Vec<f64> {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Linear-interpolation quantile on fractional order-statistic index
/// `h = (w-1) p` over already sorted values.
pub(crate) fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}
