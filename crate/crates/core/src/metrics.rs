//! Accuracy and multi-dataset comparison metrics.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Percentage of positions where `pred` equals `truth`.
pub fn accuracy<T: PartialEq>(pred: &[T], truth: &[T]) -> Result<f64> {
    if pred.len() != truth.len() || pred.is_empty() {
        return Err(Error::LengthMismatch {
            left: pred.len(),
            right: truth.len(),
        });
    }
    let hits = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(100.0 * hits as f64 / pred.len() as f64)
}

/// Accuracies in percent, one row per dataset and one column per classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyMatrix {
    values: Vec<Vec<f64>>,
    datasets: Vec<String>,
    classifiers: Vec<String>,
}

impl AccuracyMatrix {
    pub fn new(values: Vec<Vec<f64>>, datasets: Vec<String>, classifiers: Vec<String>) -> Result<Self> {
        if values.len() != datasets.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: datasets.len(),
            });
        }
        for row in &values {
            if row.len() != classifiers.len() {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: classifiers.len(),
                });
            }
            if let Some(v) = row.iter().find(|v| !(0.0..=100.0).contains(*v)) {
                return Err(Error::InvalidConfig(format!("accuracy {v} outside [0, 100]")));
            }
        }
        Ok(AccuracyMatrix {
            values,
            datasets,
            classifiers,
        })
    }

    /// Matrix with generated row and column names.
    pub fn from_rows(values: Vec<Vec<f64>>) -> Result<Self> {
        let n_c = values.first().map_or(0, Vec::len);
        let datasets = (0..values.len()).map(|i| format!("d{i}")).collect();
        let classifiers = (0..n_c).map(|j| format!("c{j}")).collect();
        Self::new(values, datasets, classifiers)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn datasets(&self) -> &[String] {
        &self.datasets
    }

    pub fn classifiers(&self) -> &[String] {
        &self.classifiers
    }

    pub fn n_datasets(&self) -> usize {
        self.values.len()
    }

    pub fn n_classifiers(&self) -> usize {
        self.classifiers.len()
    }

    /// Per-classifier mean over datasets.
    pub fn column_means(&self) -> Vec<f64> {
        let n = self.n_datasets() as f64;
        (0..self.n_classifiers())
            .map(|j| self.values.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect()
    }

    /// CSV with a `dataset` header column, one row per dataset, then
    /// `avg_rank` and `waa` rows when those metrics are defined.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dataset");
        for c in &self.classifiers {
            write!(out, ",{c}").unwrap();
        }
        out.push('\n');
        let mut row = |name: &str, vals: &[f64]| {
            out.push_str(name);
            for v in vals {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        };
        for (name, vals) in self.datasets.iter().zip(&self.values) {
            row(name, vals);
        }
        if self.n_classifiers() >= 1 && self.n_datasets() >= 1 {
            row("avg_rank", &average_rank(self));
            match weighted_average_accuracy(self) {
                Ok(waa) => row("waa", &waa),
                Err(_) => row("waa", &vec![f64::NAN; self.n_classifiers()]),
            }
        }
        out
    }
}

/// Fractional ranks (1 = best) of one row, ties sharing their mean rank.
pub fn fractional_ranks(row: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].total_cmp(&row[a]));
    let mut ranks = vec![0.0; row.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && row[order[j + 1]] == row[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Mean rank of each classifier over datasets, ranking by descending
/// accuracy with fractional ranks for ties.
pub fn average_rank(z: &AccuracyMatrix) -> Vec<f64> {
    let mut sums = vec![0.0; z.n_classifiers()];
    for row in z.rows() {
        for (s, r) in sums.iter_mut().zip(fractional_ranks(row)) {
            *s += r;
        }
    }
    let n = z.n_datasets() as f64;
    sums.into_iter().map(|s| s / n).collect()
}

/// Dataset weights `N_d (1 - M_i) / (N_d - Σ M_k)` with `M_i` the best
/// accuracy (as a fraction) on dataset `i`.
pub fn dataset_weights(z: &AccuracyMatrix) -> Result<Vec<f64>> {
    let best: Vec<f64> = z
        .rows()
        .iter()
        .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max) / 100.0)
        .collect();
    let n_d = z.n_datasets() as f64;
    let den = n_d - best.iter().sum::<f64>();
    if den <= 0.0 {
        return Err(Error::WeightsUndefined);
    }
    Ok(best.iter().map(|m| n_d * (1.0 - m) / den).collect())
}

/// Difficulty-weighted mean accuracy per classifier.
pub fn weighted_average_accuracy(z: &AccuracyMatrix) -> Result<Vec<f64>> {
    let w = dataset_weights(z)?;
    let n_d = z.n_datasets() as f64;
    Ok((0..z.n_classifiers())
        .map(|j| z.rows().iter().zip(&w).map(|(r, wi)| wi * r[j]).sum::<f64>() / n_d)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn accuracy_examples() {
        assert_eq!(accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 100.0);
        assert_eq!(accuracy(&[1, 1], &[2, 2]).unwrap(), 0.0);
        assert_eq!(accuracy(&[0, 1, 1, 0], &[0, 1, 1, 1]).unwrap(), 75.0);
        assert!(accuracy(&[0, 1], &[0]).is_err());
        assert!(accuracy::<u8>(&[], &[]).is_err());
    }

    #[test]
    fn rank_examples() {
        let z = AccuracyMatrix::from_rows(vec![vec![90.0, 80.0]]).unwrap();
        assert_eq!(average_rank(&z), vec![1.0, 2.0]);
        let z = AccuracyMatrix::from_rows(vec![vec![90.0, 90.0]]).unwrap();
        assert_eq!(average_rank(&z), vec![1.5, 1.5]);
        let z = AccuracyMatrix::from_rows(vec![vec![90.0, 80.0], vec![70.0, 85.0]]).unwrap();
        assert_eq!(average_rank(&z), vec![1.5, 1.5]);
        assert_eq!(fractional_ranks(&[50.0, 70.0, 50.0, 10.0]), vec![2.5, 1.0, 2.5, 4.0]);
    }

    #[test]
    fn waa_examples() {
        let z = AccuracyMatrix::from_rows(vec![vec![90.0, 80.0], vec![60.0, 40.0]]).unwrap();
        let w = dataset_weights(&z).unwrap();
        assert_abs_diff_eq!(w[0], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(w[1], 1.6, epsilon = 1e-12);
        let waa = weighted_average_accuracy(&z).unwrap();
        assert_abs_diff_eq!(waa[0], 66.0, epsilon = 1e-9);
        assert_abs_diff_eq!(waa[1], 48.0, epsilon = 1e-9);

        let solved = AccuracyMatrix::from_rows(vec![vec![100.0, 90.0], vec![100.0, 95.0]]).unwrap();
        let err = weighted_average_accuracy(&solved).unwrap_err();
        assert!(err.to_string().contains("weights undefined"));

        let eps = 1e-3;
        let single = AccuracyMatrix::from_rows(vec![vec![50.0], vec![100.0 - eps]]).unwrap();
        let w = dataset_weights(&single).unwrap();
        let waa = weighted_average_accuracy(&single).unwrap();
        assert_abs_diff_eq!(waa[0], (w[0] * 50.0 + w[1] * (100.0 - eps)) / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(AccuracyMatrix::from_rows(vec![vec![101.0, 3.0]]).is_err());
        assert!(AccuracyMatrix::from_rows(vec![vec![1.0, 3.0], vec![2.0]]).is_err());
    }

    #[test]
    fn csv_layout() {
        let z = AccuracyMatrix::new(
            vec![vec![90.0, 80.0], vec![60.0, 40.0]],
            vec!["A".into(), "B".into()],
            vec!["et".into(), "et1".into()],
        )
        .unwrap();
        let csv = z.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "dataset,et,et1");
        assert_eq!(lines[1], "A,90,80");
        assert_eq!(lines[3], "avg_rank,1,2");
        assert!(lines[4].starts_with("waa,66"));
    }
}
