//! Fitness evaluators: a from-scratch linear SVM trained by stochastic
//! subgradient descent, and a nearest-centroid classifier in equivalent
//! linear form. The centroid evaluator is cheap enough for exhaustive
//! subset enumeration in tests; the SVM is the production evaluator.

use std::collections::HashMap;
use std::sync::Mutex;

use ndarray::{Array1, ArrayView1};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{project, stratified_split, Dataset, SplitSpec};
use crate::error::{Error, Result};
use crate::mask::FeatureMask;
use crate::metrics::confusion;

/// Settings for the stochastic subgradient SVM trainer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmHyperparams {
    /// Weight of the L2 term (lambda); larger means stronger shrinkage.
    pub regularization_strength: f64,
    /// Full passes over the training set.
    pub epochs: usize,
    /// Numerator of the step size `scale / (lambda * t)`.
    pub learning_rate_scale: f64,
    pub seed: u64,
}

impl Default for SvmHyperparams {
    fn default() -> Self {
        Self {
            regularization_strength: 1e-4,
            epochs: 30,
            learning_rate_scale: 1.0,
            seed: 0,
        }
    }
}

impl SvmHyperparams {
    pub fn validate(&self) -> Result<()> {
        if self.regularization_strength <= 0.0 || !self.regularization_strength.is_finite() {
            return Err(Error::InvalidHyperparams(format!(
                "regularization_strength {} must be a positive real",
                self.regularization_strength
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidHyperparams("epochs must be >= 1".into()));
        }
        if self.learning_rate_scale <= 0.0 || !self.learning_rate_scale.is_finite() {
            return Err(Error::InvalidHyperparams(format!(
                "learning_rate_scale {} must be a positive real",
                self.learning_rate_scale
            )));
        }
        Ok(())
    }
}

/// Linear decision function `w . x + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub weights: Array1<f64>,
    pub bias: f64,
}

impl LinearModel {
    pub fn decision(&self, sample: ArrayView1<'_, f64>) -> Result<f64> {
        if sample.len() != self.weights.len() {
            return Err(Error::LengthMismatch {
                left: sample.len(),
                right: self.weights.len(),
            });
        }
        Ok(self.weights.dot(&sample) + self.bias)
    }

    /// 1 when the decision value is >= 0; exact zero classifies positive.
    pub fn predict(&self, sample: ArrayView1<'_, f64>) -> Result<u8> {
        Ok(u8::from(self.decision(sample)? >= 0.0))
    }

    pub fn predict_all(&self, d: &Dataset) -> Result<Vec<u8>> {
        d.features()
            .rows()
            .into_iter()
            .map(|row| self.predict(row))
            .collect()
    }
}

fn check_trainable(train: &Dataset) -> Result<()> {
    let (neg, pos) = train.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::SingleClass);
    }
    for ((row, column), &v) in train.features().indexed_iter() {
        if !v.is_finite() {
            return Err(Error::NonFiniteFeature { row, column });
        }
    }
    Ok(())
}

/// Regularized hinge objective
/// `lambda/2 (||w||^2 + b^2) + mean_i max(0, 1 - y_i (w.x_i + b))`
/// with labels mapped to +-1. The bias sits in the regularizer because
/// training treats it as an extra weight on a constant-1 feature.
pub fn hinge_objective(d: &Dataset, model: &LinearModel, lambda: f64) -> f64 {
    let reg = 0.5 * lambda * (model.weights.dot(&model.weights) + model.bias * model.bias);
    let mut total = 0.0;
    for (row, &label) in d.features().rows().into_iter().zip(d.labels()) {
        let y = if label == 1 { 1.0 } else { -1.0 };
        let margin = y * (model.weights.dot(&row) + model.bias);
        total += (1.0 - margin).max(0.0);
    }
    reg + total / d.n_samples() as f64
}

/// Finds the scaling `s > 0` of `model` that minimizes the training
/// objective, which is convex in `s`: one pass collects the margins and
/// the rest is O(n) per grid point. Returns the rescaled model and its
/// objective. Rescaling never changes predictions, only the objective.
fn best_rescaling(train: &Dataset, model: &LinearModel, lambda: f64) -> (LinearModel, f64) {
    let norm_sq = model.weights.dot(&model.weights) + model.bias * model.bias;
    let margins: Vec<f64> = train
        .features()
        .rows()
        .into_iter()
        .zip(train.labels())
        .map(|(row, &label)| {
            let y = if label == 1 { 1.0 } else { -1.0 };
            y * (model.weights.dot(&row) + model.bias)
        })
        .collect();
    let n = margins.len() as f64;

    let mut best_scale = 1.0;
    let mut best_objective = f64::INFINITY;
    // Geometric grid, 2^-10 .. 2^4, 4 points per octave.
    for i in 0..=56 {
        let s = (2.0f64).powf(-10.0 + i as f64 * 0.25);
        let hinge: f64 = margins.iter().map(|m| (1.0 - s * m).max(0.0)).sum();
        let objective = 0.5 * lambda * s * s * norm_sq + hinge / n;
        if objective < best_objective {
            best_objective = objective;
            best_scale = s;
        }
    }
    (
        LinearModel {
            weights: &model.weights * best_scale,
            bias: model.bias * best_scale,
        },
        best_objective,
    )
}

/// Trains a linear SVM by stochastic subgradient descent on the
/// regularized hinge loss, step size `scale / (lambda * t)`.
///
/// The bias is an augmented constant-1 feature and each step projects
/// onto the `1/sqrt(lambda)` ball where the optimum lives. Returned is
/// the best of: the zero starting model, the lowest-objective epoch-end
/// iterate, and the final iterate plus a tail average over the second
/// half of the steps, the latter two after an exact scale line search
/// (SGD finds a good direction well before its norm settles). The final
/// training objective therefore never exceeds the zero model's, and the
/// whole procedure is deterministic for a fixed seed.
pub fn train_linear_svm(train: &Dataset, params: &SvmHyperparams) -> Result<LinearModel> {
    params.validate()?;
    check_trainable(train)?;

    let n = train.n_samples();
    let dim = train.n_features();
    let lambda = params.regularization_strength;
    let radius = 1.0 / lambda.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut weights = Array1::<f64>::zeros(dim);
    let mut bias = 0.0;
    let mut best = LinearModel {
        weights: weights.clone(),
        bias,
    };
    let mut best_objective = hinge_objective(train, &best, lambda);

    let total_steps = (params.epochs * n) as u64;
    let tail_start = total_steps / 2 + 1;
    let mut tail_sum = Array1::<f64>::zeros(dim);
    let mut tail_bias_sum = 0.0;
    let mut tail_count = 0u64;

    let mut best_epoch_end: Option<(LinearModel, f64)> = None;
    let mut order: Vec<usize> = (0..n).collect();
    let mut step = 0u64;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            step += 1;
            let eta = params.learning_rate_scale / (lambda * step as f64);
            let row = train.features().row(i);
            let y = if train.labels()[i] == 1 { 1.0 } else { -1.0 };
            let margin = y * (weights.dot(&row) + bias);
            let shrink = 1.0 - eta * lambda;
            weights *= shrink;
            bias *= shrink;
            if margin < 1.0 {
                weights.scaled_add(eta * y, &row);
                bias += eta * y;
            }
            let norm = (weights.dot(&weights) + bias * bias).sqrt();
            if norm > radius {
                let scale = radius / norm;
                weights *= scale;
                bias *= scale;
            }
            if step >= tail_start {
                tail_sum += &weights;
                tail_bias_sum += bias;
                tail_count += 1;
            }
        }
        let candidate = LinearModel {
            weights: weights.clone(),
            bias,
        };
        let objective = hinge_objective(train, &candidate, lambda);
        if best_epoch_end
            .as_ref()
            .is_none_or(|(_, current)| objective < *current)
        {
            best_epoch_end = Some((candidate, objective));
        }
    }

    let mut finalists = Vec::new();
    if let Some((model, _)) = best_epoch_end {
        finalists.push(model);
    }
    finalists.push(LinearModel { weights, bias });
    if tail_count > 0 {
        finalists.push(LinearModel {
            weights: tail_sum / tail_count as f64,
            bias: tail_bias_sum / tail_count as f64,
        });
    }
    for candidate in finalists {
        let (rescaled, objective) = best_rescaling(train, &candidate, lambda);
        if objective < best_objective {
            best = rescaled;
            best_objective = objective;
        }
    }

    if !best.bias.is_finite() || best.weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Internal("SVM produced non-finite weights".into()));
    }
    Ok(best)
}

/// Nearest-centroid classifier, expressed as a linear model:
/// `w = mu_1 - mu_0`, `b = (||mu_0||^2 - ||mu_1||^2) / 2`.
pub fn train_centroid(train: &Dataset) -> Result<LinearModel> {
    check_trainable(train)?;
    let dim = train.n_features();
    let mut mu = [Array1::<f64>::zeros(dim), Array1::<f64>::zeros(dim)];
    let mut counts = [0usize; 2];
    for (row, &label) in train.features().rows().into_iter().zip(train.labels()) {
        mu[label as usize] += &row;
        counts[label as usize] += 1;
    }
    mu[0] /= counts[0] as f64;
    mu[1] /= counts[1] as f64;
    let bias = (mu[0].dot(&mu[0]) - mu[1].dot(&mu[1])) / 2.0;
    Ok(LinearModel {
        weights: &mu[1] - &mu[0],
        bias,
    })
}

/// Which classifier scores a subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvaluatorKind {
    Svm,
    Centroid,
}

/// Everything behind one fitness number: the train/validation split and
/// the classifier that runs on the projected columns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitnessProtocol {
    pub split: SplitSpec,
    pub evaluator: EvaluatorKind,
    pub svm: SvmHyperparams,
}

impl Default for FitnessProtocol {
    fn default() -> Self {
        Self {
            split: SplitSpec::default(),
            evaluator: EvaluatorKind::Svm,
            svm: SvmHyperparams::default(),
        }
    }
}

/// Trains whichever evaluator the protocol names on `train`.
pub fn train_evaluator(train: &Dataset, protocol: &FitnessProtocol) -> Result<LinearModel> {
    match protocol.evaluator {
        EvaluatorKind::Svm => train_linear_svm(train, &protocol.svm),
        EvaluatorKind::Centroid => train_centroid(train),
    }
}

/// Anything that can score a feature mask in [0, 1].
pub trait FitnessFn {
    fn fitness(&self, mask: &FeatureMask) -> Result<f64>;
}

impl<F> FitnessFn for F
where
    F: Fn(&FeatureMask) -> Result<f64>,
{
    fn fitness(&self, mask: &FeatureMask) -> Result<f64> {
        self(mask)
    }
}

/// Mask-keyed fitness memo; safe for concurrent insert-or-get.
#[derive(Default)]
pub struct FitnessCache {
    map: Mutex<HashMap<FeatureMask, f64>>,
}

impl FitnessCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("fitness cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Returns the cached value or computes one outside the lock.
    /// Concurrent duplicate computations insert the same value, since
    /// fitness is a pure function of the mask.
    pub fn get_or_try_insert<F>(&self, mask: &FeatureMask, compute: F) -> Result<f64>
    where
        F: FnOnce() -> Result<f64>,
    {
        if let Some(&v) = self.map.lock().expect("fitness cache lock").get(mask) {
            return Ok(v);
        }
        let v = compute()?;
        self.map
            .lock()
            .expect("fitness cache lock")
            .insert(mask.clone(), v);
        Ok(v)
    }
}

/// Cached subset scorer bound to one dataset and protocol.
///
/// The train/validation split happens once at construction; every mask
/// is then scored against the same partitions, so fitness is a pure
/// function of `(mask, dataset, protocol)`.
pub struct SubsetEvaluator {
    train: Dataset,
    validation: Dataset,
    protocol: FitnessProtocol,
    cache: FitnessCache,
}

impl SubsetEvaluator {
    pub fn new(d: &Dataset, protocol: &FitnessProtocol) -> Result<Self> {
        protocol.svm.validate()?;
        let (train, validation) = stratified_split(d, &protocol.split)?;
        Ok(Self {
            train,
            validation,
            protocol: protocol.clone(),
            cache: FitnessCache::new(),
        })
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    fn compute(&self, mask: &FeatureMask) -> Result<f64> {
        let train = project(&self.train, mask)?;
        let validation = project(&self.validation, mask)?;
        let model = train_evaluator(&train, &self.protocol)?;
        let predicted = model.predict_all(&validation)?;
        confusion(&predicted, validation.labels())?.accuracy()
    }
}

impl FitnessFn for SubsetEvaluator {
    fn fitness(&self, mask: &FeatureMask) -> Result<f64> {
        self.cache.get_or_try_insert(mask, || self.compute(mask))
    }
}

/// Scores one subset: split per protocol, project both sides by `mask`,
/// train the chosen evaluator, return validation accuracy.
pub fn evaluate_subset(mask: &FeatureMask, d: &Dataset, protocol: &FitnessProtocol) -> Result<f64> {
    SubsetEvaluator::new(d, protocol)?.fitness(mask)
}
