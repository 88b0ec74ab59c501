//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by dataset handling, evaluators, the colony search and
/// the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("label column '{0}' not found in header")]
    MissingLabelColumn(String),

    #[error("row {row} has {found} columns, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("cell at row {row}, column {column} does not parse as a finite number: '{value}'")]
    BadCell {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("invalid label '{value}' in row {row}: expected 0/1, b/s or benign/malware")]
    BadLabel { row: usize, value: String },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid split spec: {0}")]
    InvalidSplit(String),

    #[error("split leaves class {class} empty in the {side} partition")]
    SplitEmptyClass { class: u8, side: &'static str },

    #[error("mask length {mask_len} does not match feature count {n_features}")]
    MaskLength { mask_len: usize, n_features: usize },

    #[error("mask selects no features")]
    EmptyMask,

    #[error("feature index {index} out of range for {n_features} features")]
    FeatureIndex { index: usize, n_features: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("label {value} at index {index} is outside {{0,1}}")]
    LabelDomain { index: usize, value: u8 },

    #[error("undefined metric {name}: denominator is zero")]
    UndefinedMetric { name: &'static str },

    #[error("training data contains a single class")]
    SingleClass,

    #[error("non-finite feature value at row {row}, column {column}")]
    NonFiniteFeature { row: usize, column: usize },

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),

    #[error("invalid colony config: {0}")]
    InvalidColonyConfig(String),

    #[error("invalid experiment config: {}", .0.join("; "))]
    InvalidExperimentConfig(Vec<String>),

    #[error("sweep failed at size {size}: {source}")]
    SweepSize {
        size: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
