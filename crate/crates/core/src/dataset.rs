//! UCR-format univariate datasets.
//!
//! One series per line: the first field is the class label token, the
//! remaining `m` fields are the values. Fields are separated by tabs, or by
//! commas when the first record contains no tab.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};

/// Minimum supported series length.
pub const MIN_SERIES_LEN: usize = 3;

/// `n` equal-length series with integer class labels in `[0, c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    values: Array2<f64>,
    labels: Vec<usize>,
    label_names: Vec<String>,
    name: String,
}

impl LabeledDataset {
    /// Builds a dataset from raw label tokens. Distinct tokens are sorted
    /// lexicographically and mapped to `0..c` in that order.
    pub fn from_tokens<S: AsRef<str>>(
        name: impl Into<String>,
        values: Array2<f64>,
        tokens: &[S],
    ) -> Result<Self> {
        if values.nrows() == 0 {
            return Err(Error::EmptyDataset);
        }
        if values.nrows() != tokens.len() {
            return Err(Error::LengthMismatch {
                left: values.nrows(),
                right: tokens.len(),
            });
        }
        let mut label_names: Vec<String> = tokens.iter().map(|t| t.as_ref().to_owned()).collect();
        label_names.sort();
        label_names.dedup();
        let labels = tokens
            .iter()
            .map(|t| {
                label_names
                    .binary_search_by(|probe| probe.as_str().cmp(t.as_ref()))
                    .expect("token present")
            })
            .collect();
        Self::new(name, values, labels, label_names)
    }

    /// Builds a dataset from already-encoded labels.
    pub fn new(
        name: impl Into<String>,
        values: Array2<f64>,
        labels: Vec<usize>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        let (n, m) = values.dim();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if m < MIN_SERIES_LEN {
            return Err(Error::SeriesTooShort(m));
        }
        if labels.len() != n {
            return Err(Error::LengthMismatch {
                left: n,
                right: labels.len(),
            });
        }
        if let Some(((row, col), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidValue {
                line: row + 1,
                column: col + 2,
                token: values[[row, col]].to_string(),
            });
        }
        let c = label_names.len();
        let mut seen = vec![false; c];
        for &label in &labels {
            if label >= c {
                return Err(Error::InvalidConfig(format!(
                    "label index {label} out of range for {c} classes"
                )));
            }
            seen[label] = true;
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidConfig(format!(
                "class {k} ({:?}) has no instances",
                label_names[k]
            )));
        }
        Ok(LabeledDataset {
            values,
            labels,
            label_names,
            name: name.into(),
        })
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn series(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_series(&self) -> usize {
        self.values.nrows()
    }

    pub fn series_len(&self) -> usize {
        self.values.ncols()
    }

    pub fn n_classes(&self) -> usize {
        self.label_names.len()
    }

    /// Label token of every series, in row order.
    pub fn label_tokens(&self) -> impl Iterator<Item = &str> + '_ {
        self.labels.iter().map(|&k| self.label_names[k].as_str())
    }

    pub fn class_counts(&self) -> Vec<usize> {
        class_counts(&self.labels, self.n_classes())
    }

    /// Renders the dataset back to tab-separated UCR format. Values use the
    /// shortest representation that parses back to the same `f64`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (row, token) in self.values.rows().into_iter().zip(self.label_tokens()) {
            out.push_str(token);
            for v in row {
                write!(out, "\t{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Number of instances per class, for labels in `[0, n_classes)`.
pub fn class_counts(labels: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &label in labels {
        counts[label] += 1;
    }
    counts
}

/// Loads a UCR `.tsv` (or comma-separated) file. The dataset name is the file
/// stem with any `_TRAIN` / `_TEST` suffix removed.
pub fn load_ucr_tsv(path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = stem
        .strip_suffix("_TRAIN")
        .or_else(|| stem.strip_suffix("_TEST"))
        .unwrap_or(&stem)
        .to_owned();
    parse_ucr(&name, &text)
}

/// Parses UCR-format text.
pub fn parse_ucr(name: &str, text: &str) -> Result<LabeledDataset> {
    let lines: Vec<(usize, &str)> = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();
    let Some(&(_, first)) = lines.first() else {
        return Err(Error::EmptyDataset);
    };
    let sep = if first.contains('\t') { '\t' } else { ',' };

    let mut tokens = Vec::with_capacity(lines.len());
    let mut flat = Vec::new();
    let mut m = None;
    for &(line_no, line) in &lines {
        let mut fields = line.split(sep);
        let label = fields.next().unwrap_or_default().trim();
        let before = flat.len();
        for (j, field) in fields.enumerate() {
            let field = field.trim();
            let value = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidValue {
                    line: line_no,
                    column: j + 2,
                    token: field.to_owned(),
                })?;
            flat.push(value);
        }
        let width = flat.len() - before;
        match m {
            None => m = Some(width),
            Some(expected) if expected != width => {
                return Err(Error::InconsistentLength {
                    line: line_no,
                    expected,
                    found: width,
                })
            }
            _ => {}
        }
        tokens.push(label.to_owned());
    }
    let m = m.unwrap_or(0);
    if m < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort(m));
    }
    let values = Array2::from_shape_vec((tokens.len(), m), flat).expect("shape checked per row");
    LabeledDataset::from_tokens(name, values, &tokens)
}
