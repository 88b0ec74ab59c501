//! Python bindings: datasets, subset evaluation, colony search and
//! classification metrics. Feature masks cross the boundary as sorted
//! lists of selected column indices.

use std::collections::HashMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use abc_select::abc::{run_with_evaluator, ColonyConfig};
use abc_select::classifier::{EvaluatorKind, FitnessProtocol, SubsetEvaluator, SvmHyperparams};
use abc_select::dataset::{self, SplitSpec};
use abc_select::mask::FeatureMask;
use abc_select::metrics;

fn to_py(e: abc_select::Error) -> PyErr {
    match e {
        abc_select::Error::Io { .. } | abc_select::Error::Csv { .. } => {
            PyIOError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_evaluator(name: &str) -> PyResult<EvaluatorKind> {
    match name {
        "svm" => Ok(EvaluatorKind::Svm),
        "centroid" => Ok(EvaluatorKind::Centroid),
        _ => Err(PyValueError::new_err(format!(
            "unknown fitness '{name}', expected 'svm' or 'centroid'"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn build_protocol(
    fitness: &str,
    train_frac: f64,
    split_seed: u64,
    svm_c: f64,
    svm_epochs: usize,
    svm_seed: u64,
) -> PyResult<FitnessProtocol> {
    Ok(FitnessProtocol {
        split: SplitSpec {
            train_fraction: train_frac,
            stratified: true,
            seed: split_seed,
        },
        evaluator: parse_evaluator(fitness)?,
        svm: SvmHyperparams {
            regularization_strength: svm_c,
            epochs: svm_epochs,
            learning_rate_scale: 1.0,
            seed: svm_seed,
        },
    })
}

/// Labeled feature matrix with named columns.
#[pyclass]
struct Dataset {
    inner: dataset::Dataset,
}

#[pymethods]
impl Dataset {
    /// Load a header-first CSV; the label column holds 0/1, B/S or
    /// benign/malware values.
    #[staticmethod]
    #[pyo3(signature = (path, label_col="class"))]
    fn load_csv(path: PathBuf, label_col: &str) -> PyResult<Self> {
        Ok(Self {
            inner: dataset::load_csv(&path, label_col).map_err(to_py)?,
        })
    }

    /// Generate a synthetic binary dataset whose label is the majority
    /// vote of the informative columns.
    #[staticmethod]
    #[pyo3(signature = (n_samples, n_features, informative, noise_rate=0.0, seed=0))]
    fn synthetic(
        n_samples: usize,
        n_features: usize,
        informative: Vec<usize>,
        noise_rate: f64,
        seed: u64,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: dataset::generate_synthetic(
                n_samples,
                n_features,
                &informative,
                noise_rate,
                seed,
            )
            .map_err(to_py)?,
        })
    }

    #[getter]
    fn n_samples(&self) -> usize {
        self.inner.n_samples()
    }

    #[getter]
    fn n_features(&self) -> usize {
        self.inner.n_features()
    }

    #[getter]
    fn feature_names(&self) -> Vec<String> {
        self.inner.feature_names().to_vec()
    }

    fn labels(&self) -> Vec<u8> {
        self.inner.labels().to_vec()
    }

    /// New dataset keeping only the given columns.
    fn project(&self, indices: Vec<usize>) -> PyResult<Self> {
        let mask = FeatureMask::from_indices(self.inner.n_features(), &indices).map_err(to_py)?;
        Ok(Self {
            inner: dataset::project(&self.inner, &mask).map_err(to_py)?,
        })
    }

    fn write_csv(&self, path: PathBuf, label_col: &str) -> PyResult<()> {
        dataset::write_csv(&self.inner, &path, label_col).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset({} samples x {} features, {} positive)",
            self.inner.n_samples(),
            self.inner.n_features(),
            self.inner.class_counts().1
        )
    }
}

/// Outcome of a colony search.
#[pyclass]
struct SearchResult {
    #[pyo3(get)]
    best_indices: Vec<usize>,
    #[pyo3(get)]
    best_fitness: f64,
    #[pyo3(get)]
    history: Vec<f64>,
    #[pyo3(get)]
    evaluations: u64,
    #[pyo3(get)]
    scout_events: u64,
}

#[pymethods]
impl SearchResult {
    fn __repr__(&self) -> String {
        format!(
            "SearchResult({} features, fitness {:.4}, {} evaluations)",
            self.best_indices.len(),
            self.best_fitness,
            self.evaluations
        )
    }
}

/// Score one feature subset: stratified split, project, train, validate.
#[pyfunction]
#[pyo3(signature = (
    data, indices, fitness="svm", train_frac=0.7, split_seed=0,
    svm_c=1e-4, svm_epochs=30, svm_seed=0,
))]
#[allow(clippy::too_many_arguments)]
fn evaluate_subset(
    data: &Dataset,
    indices: Vec<usize>,
    fitness: &str,
    train_frac: f64,
    split_seed: u64,
    svm_c: f64,
    svm_epochs: usize,
    svm_seed: u64,
) -> PyResult<f64> {
    let protocol = build_protocol(fitness, train_frac, split_seed, svm_c, svm_epochs, svm_seed)?;
    let mask = FeatureMask::from_indices(data.inner.n_features(), &indices).map_err(to_py)?;
    abc_select::classifier::evaluate_subset(&mask, &data.inner, &protocol).map_err(to_py)
}

/// Colony search for the best-scoring subset with a cardinality inside
/// `[lower, upper]`. The split and SVM seeds default to `seed`.
#[pyfunction]
#[pyo3(signature = (
    data, lower, upper, pop_size=20, limit=10, max_iter=100, seed=0,
    fitness="svm", train_frac=0.7, split_seed=None,
    svm_c=1e-4, svm_epochs=30, svm_seed=None,
))]
#[allow(clippy::too_many_arguments)]
fn search(
    data: &Dataset,
    lower: usize,
    upper: usize,
    pop_size: usize,
    limit: usize,
    max_iter: usize,
    seed: u64,
    fitness: &str,
    train_frac: f64,
    split_seed: Option<u64>,
    svm_c: f64,
    svm_epochs: usize,
    svm_seed: Option<u64>,
) -> PyResult<SearchResult> {
    let protocol = build_protocol(
        fitness,
        train_frac,
        split_seed.unwrap_or(seed),
        svm_c,
        svm_epochs,
        svm_seed.unwrap_or(seed),
    )?;
    let config = ColonyConfig {
        population_size: pop_size,
        limit,
        lower_bound: lower,
        upper_bound: upper,
        max_iterations: max_iter,
        seed,
    };
    let evaluator = SubsetEvaluator::new(&data.inner, &protocol).map_err(to_py)?;
    let result = run_with_evaluator(&config, data.inner.n_features(), &evaluator).map_err(to_py)?;
    Ok(SearchResult {
        best_indices: result.best_mask.to_indices(),
        best_fitness: result.best_fitness,
        history: result.history,
        evaluations: result.evaluations,
        scout_events: result.scout_events,
    })
}

/// Confusion counts as a `(tp, fp, tn, fn)` tuple; positive class is 1.
#[pyfunction]
fn confusion(predicted: Vec<u8>, actual: Vec<u8>) -> PyResult<(u64, u64, u64, u64)> {
    let cm = metrics::confusion(&predicted, &actual).map_err(to_py)?;
    Ok((
        cm.true_positives,
        cm.false_positives,
        cm.true_negatives,
        cm.false_negatives,
    ))
}

/// Accuracy, recall and specificity as a dict.
#[pyfunction]
fn classification_report(predicted: Vec<u8>, actual: Vec<u8>) -> PyResult<HashMap<String, f64>> {
    let cm = metrics::confusion(&predicted, &actual).map_err(to_py)?;
    let report = metrics::MetricsReport::from_confusion(&cm).map_err(to_py)?;
    Ok(HashMap::from([
        ("accuracy".to_string(), report.accuracy),
        ("recall".to_string(), report.recall),
        ("specificity".to_string(), report.specificity),
    ]))
}

#[pymodule]
fn abcselect(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<SearchResult>()?;
    m.add_function(wrap_pyfunction!(evaluate_subset, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(confusion, m)?)?;
    m.add_function(wrap_pyfunction!(classification_report, m)?)?;
    Ok(())
}
