//! Wrapper feature selection for binary classification driven by a
//! discrete artificial bee colony search.
//!
//! The pipeline: load a labeled feature matrix ([`dataset`]), score
//! candidate subsets by training a classifier on the selected columns
//! ([`classifier`]), search the subset space with a bee colony over
//! bitmasks ([`abc`]), and report confusion-matrix metrics ([`metrics`]).
//! [`harness`] ties the stages into reproducible single-run and
//! size-sweep experiments with machine-readable outputs; the
//! `abc-select` binary exposes them on the command line.

pub mod abc;
pub mod classifier;
pub mod dataset;
pub mod error;
pub mod harness;
pub mod mask;
pub mod metrics;

pub use error::{Error, Result};
pub use mask::FeatureMask;
