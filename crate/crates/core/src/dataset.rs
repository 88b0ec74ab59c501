//! Dataset loading, validation, splitting and projection.
//!
//! Feature matrices are dense `f64` even for binary permission/API data:
//! the SVM evaluator and the synthetic generator then share one code path.
//! Labels are normalized to `{0, 1}` with 1 = malware (positive class).

use std::collections::BTreeSet;
use std::path::Path;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mask::FeatureMask;

/// Immutable sample matrix plus binary labels and column names.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Array2<f64>,
    labels: Vec<u8>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Validates and assembles a dataset.
    ///
    /// Requires matching dimensions, labels in `{0, 1}`, at least two
    /// samples and at least one sample of each class.
    pub fn new(features: Array2<f64>, labels: Vec<u8>, feature_names: Vec<String>) -> Result<Self> {
        if labels.len() != features.nrows() {
            return Err(Error::InvalidDataset(format!(
                "{} labels for {} rows",
                labels.len(),
                features.nrows()
            )));
        }
        if feature_names.len() != features.ncols() {
            return Err(Error::InvalidDataset(format!(
                "{} feature names for {} columns",
                feature_names.len(),
                features.ncols()
            )));
        }
        if features.ncols() == 0 {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        if features.nrows() < 2 {
            return Err(Error::InvalidDataset("fewer than two samples".into()));
        }
        if let Some((index, &value)) = labels.iter().enumerate().find(|(_, &l)| l > 1) {
            return Err(Error::LabelDomain { index, value });
        }
        let positives = labels.iter().filter(|&&l| l == 1).count();
        if positives == 0 || positives == labels.len() {
            return Err(Error::InvalidDataset(
                "dataset contains a single class".into(),
            ));
        }
        Ok(Self {
            features,
            labels,
            feature_names,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// `(negatives, positives)` class counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let positives = self.labels.iter().filter(|&&l| l == 1).count();
        (self.labels.len() - positives, positives)
    }
}

/// How to carve a dataset into a train and a held-out partition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Fraction of rows assigned to the train side, in (0, 1).
    pub train_fraction: f64,
    /// Preserve per-class proportions when true.
    pub stratified: bool,
    pub seed: u64,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidSplit(format!(
                "train_fraction {} not in (0, 1)",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            stratified: true,
            seed: 0,
        }
    }
}

/// Partitions row indices into `(train, test)`, both ascending.
///
/// Stratified mode shuffles each class separately and takes
/// `round(train_fraction * class_count)` rows per class. Identical
/// `(labels, spec)` inputs always produce the identical partition.
pub fn split_indices(labels: &[u8], spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();

    if spec.stratified {
        for class in [0u8, 1u8] {
            let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
            let n_class = rows.len();
            rows.shuffle(&mut rng);
            let take = (spec.train_fraction * n_class as f64).round() as usize;
            if take == 0 {
                return Err(Error::SplitEmptyClass {
                    class,
                    side: "train",
                });
            }
            if take >= n_class {
                return Err(Error::SplitEmptyClass {
                    class,
                    side: "test",
                });
            }
            train.extend_from_slice(&rows[..take]);
            test.extend_from_slice(&rows[take..]);
        }
    } else {
        let mut rows: Vec<usize> = (0..labels.len()).collect();
        rows.shuffle(&mut rng);
        let take = (spec.train_fraction * rows.len() as f64).round() as usize;
        let take = take.clamp(1, rows.len().saturating_sub(1));
        train.extend_from_slice(&rows[..take]);
        test.extend_from_slice(&rows[take..]);
        for (side, part) in [("train", &train), ("test", &test)] {
            for class in [0u8, 1u8] {
                if !part.iter().any(|&i| labels[i] == class) {
                    return Err(Error::SplitEmptyClass { class, side });
                }
            }
        }
    }

    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// New dataset holding the given rows, in the given order.
pub fn select_rows(d: &Dataset, rows: &[usize]) -> Result<Dataset> {
    if let Some(&bad) = rows.iter().find(|&&r| r >= d.n_samples()) {
        return Err(Error::InvalidDataset(format!(
            "row index {bad} out of range for {} samples",
            d.n_samples()
        )));
    }
    Dataset::new(
        d.features.select(Axis(0), rows),
        rows.iter().map(|&r| d.labels[r]).collect(),
        d.feature_names.clone(),
    )
}

/// Splits a dataset per `spec` into `(train, test)` datasets.
pub fn stratified_split(d: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train_idx, test_idx) = split_indices(d.labels(), spec)?;
    Ok((select_rows(d, &train_idx)?, select_rows(d, &test_idx)?))
}

/// Keeps only the columns selected by `mask`, preserving relative order.
pub fn project(d: &Dataset, mask: &FeatureMask) -> Result<Dataset> {
    if mask.len() != d.n_features() {
        return Err(Error::MaskLength {
            mask_len: mask.len(),
            n_features: d.n_features(),
        });
    }
    if mask.count_ones() == 0 {
        return Err(Error::EmptyMask);
    }
    let cols = mask.to_indices();
    Dataset::new(
        d.features.select(Axis(1), &cols),
        d.labels.clone(),
        cols.iter().map(|&c| d.feature_names[c].clone()).collect(),
    )
}

fn normalize_label(raw: &str, row: usize) -> Result<u8> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "0" | "b" | "benign" => Ok(0),
        "1" | "s" | "malware" => Ok(1),
        _ => Err(Error::BadLabel {
            row,
            value: raw.trim().to_string(),
        }),
    }
}

/// Loads a header-first CSV, pulling labels out of `label_column`.
///
/// `label_column` is matched against header names first; if no name
/// matches and it parses as an integer, it is used as a column index.
/// Accepted label encodings: `{0,1}`, `{B,S}`, `{benign,malware}`,
/// case-insensitive.
pub fn load_csv(path: &Path, label_column: &str) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let label_col = match headers.iter().position(|h| h == label_column) {
        Some(pos) => pos,
        None => label_column
            .parse::<usize>()
            .ok()
            .filter(|&i| i < headers.len())
            .ok_or_else(|| Error::MissingLabelColumn(label_column.to_string()))?,
    };

    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_col)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<u8> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        // 1-based data row numbers in errors; the header is row 0.
        let row = row_idx + 1;
        let record = record.map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        if record.len() != headers.len() {
            return Err(Error::RaggedRow {
                row,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let mut values = Vec::with_capacity(headers.len() - 1);
        for (col, cell) in record.iter().enumerate() {
            if col == label_col {
                labels.push(normalize_label(cell, row)?);
            } else {
                let parsed: f64 = cell.trim().parse().map_err(|_| Error::BadCell {
                    row,
                    column: col,
                    value: cell.to_string(),
                })?;
                if !parsed.is_finite() {
                    return Err(Error::BadCell {
                        row,
                        column: col,
                        value: cell.to_string(),
                    });
                }
                values.push(parsed);
            }
        }
        rows.push(values);
    }

    let n_samples = rows.len();
    let n_features = headers.len().saturating_sub(1);
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let features = Array2::from_shape_vec((n_samples, n_features), flat)
        .map_err(|e| Error::InvalidDataset(e.to_string()))?;
    Dataset::new(features, labels, feature_names)
}

/// Writes a dataset back to CSV with the label in a trailing column.
///
/// Values go through Rust's shortest round-trip float formatting, so
/// `load_csv(write_csv(d))` reproduces `d` bit-exactly.
pub fn write_csv(d: &Dataset, path: &Path, label_column: &str) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    let mut header: Vec<String> = d.feature_names.to_vec();
    header.push(label_column.to_string());
    let io_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    writer.write_record(&header).map_err(io_err)?;
    for (row, &label) in d.features.rows().into_iter().zip(d.labels.iter()) {
        let mut record: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        record.push(label.to_string());
        writer.write_record(&record).map_err(io_err)?;
    }
    writer.flush().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(())
}

/// Generates a binary dataset with a known informative feature set.
///
/// Latent class assignments are balanced, informative bits copy the
/// latent class and flip with probability `noise_rate`, the remaining
/// bits are uniform coin flips, and the final label is the majority
/// vote of the informative bits (ties count as positive). With
/// `noise_rate = 0` the informative columns all equal the label.
pub fn generate_synthetic(
    n_samples: usize,
    n_features: usize,
    informative: &[usize],
    noise_rate: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_samples < 4 {
        return Err(Error::InvalidDataset(format!(
            "n_samples {n_samples} below minimum of 4"
        )));
    }
    if n_features == 0 {
        return Err(Error::InvalidDataset("n_features is zero".into()));
    }
    if informative.is_empty() {
        return Err(Error::InvalidDataset(
            "informative feature set is empty".into(),
        ));
    }
    if !(0.0..0.5).contains(&noise_rate) {
        return Err(Error::InvalidDataset(format!(
            "noise_rate {noise_rate} not in [0, 0.5)"
        )));
    }
    let informative: BTreeSet<usize> = informative.iter().copied().collect();
    if let Some(&bad) = informative.iter().find(|&&i| i >= n_features) {
        return Err(Error::FeatureIndex {
            index: bad,
            n_features,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut latent: Vec<u8> = (0..n_samples).map(|i| (i % 2) as u8).collect();
    latent.shuffle(&mut rng);

    let mut features = Array2::<f64>::zeros((n_samples, n_features));
    let mut labels = Vec::with_capacity(n_samples);
    for (i, &class) in latent.iter().enumerate() {
        let mut informative_ones = 0usize;
        for j in 0..n_features {
            let bit = if informative.contains(&j) {
                let flip = rng.random::<f64>() < noise_rate;
                let b = class ^ u8::from(flip);
                informative_ones += usize::from(b == 1);
                b
            } else {
                u8::from(rng.random::<f64>() < 0.5)
            };
            features[(i, j)] = f64::from(bit);
        }
        labels.push(u8::from(2 * informative_ones >= informative.len()));
    }

    let feature_names = (0..n_features).map(|j| format!("f{j}")).collect();
    Dataset::new(features, labels, feature_names)
}
