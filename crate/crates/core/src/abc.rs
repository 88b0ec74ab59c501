//! Discrete artificial bee colony search over feature bitmasks.
//!
//! Each food source is a candidate feature subset with a cached fitness
//! (validation accuracy) and a failed-improvement counter. One iteration
//! runs the employed phase (every source proposes a neighbor built from a
//! random partner), the onlooker phase (fitness-proportional draws propose
//! more neighbors for promising sources), and at most one scout event
//! (the most-stagnant source past the trial limit is replaced by a fresh
//! random subset). Neighbor generation adapts the continuous update
//! `v_i = f_i + v * (f_i - f_j)` to bitmask space: the random scale
//! `v in [-1, 1]` becomes the per-bit probability |v| of adopting the
//! partner's value where the parents disagree, so v still measures how
//! far the child moves from its own parent toward the partner.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{FitnessFn, FitnessProtocol, SubsetEvaluator};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::mask::FeatureMask;

/// Colony settings. `lower_bound`/`upper_bound` bracket the subset
/// cardinality every mask must keep; `limit` is the number of failed
/// improvements a source survives before a scout replaces it.
///
/// A `lower_bound` of 0 permits empty masks, which dataset-backed
/// evaluators reject; practical runs use at least 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColonyConfig {
    /// Number of food sources, equal to the number of employed bees.
    pub population_size: usize,
    pub limit: usize,
    pub lower_bound: usize,
    pub upper_bound: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl ColonyConfig {
    /// Conventional defaults with an explicit cardinality window.
    pub fn with_bounds(lower_bound: usize, upper_bound: usize) -> Self {
        Self {
            population_size: 20,
            limit: 10,
            lower_bound,
            upper_bound,
            max_iterations: 100,
            seed: 0,
        }
    }

    pub fn validate(&self, n_features: usize) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidColonyConfig(format!(
                "population_size {} below minimum of 2",
                self.population_size
            )));
        }
        if self.lower_bound > self.upper_bound {
            return Err(Error::InvalidColonyConfig(format!(
                "lower_bound {} exceeds upper_bound {}",
                self.lower_bound, self.upper_bound
            )));
        }
        if self.upper_bound > n_features {
            return Err(Error::InvalidColonyConfig(format!(
                "upper_bound {} exceeds feature count {}",
                self.upper_bound, n_features
            )));
        }
        Ok(())
    }
}

/// Candidate subset plus its cached fitness and stagnation counter.
/// `fitness` stays `None` until the initial evaluation pass.
#[derive(Clone, Debug, PartialEq)]
pub struct FoodSource {
    pub mask: FeatureMask,
    pub fitness: Option<f64>,
    pub trials: usize,
}

/// Outcome of one colony run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_mask: FeatureMask,
    pub best_fitness: f64,
    /// Best-so-far fitness after initialization and after each iteration.
    pub history: Vec<f64>,
    /// Fitness evaluations requested (cache hits included).
    pub evaluations: u64,
    pub scout_events: u64,
}

/// Seeds the colony: every mask gets a cardinality drawn uniformly from
/// the bound window and uniformly placed set bits. Fitness stays unset.
pub fn init_colony(
    config: &ColonyConfig,
    n_features: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<FoodSource>> {
    config.validate(n_features)?;
    let mut colony = Vec::with_capacity(config.population_size);
    for _ in 0..config.population_size {
        let k = rng.random_range(config.lower_bound..=config.upper_bound);
        colony.push(FoodSource {
            mask: random_mask(n_features, k, rng),
            fitness: None,
            trials: 0,
        });
    }
    Ok(colony)
}

fn random_mask(n_features: usize, k: usize, rng: &mut ChaCha8Rng) -> FeatureMask {
    let mut mask = FeatureMask::zeros(n_features);
    for idx in sample(rng, n_features, k) {
        mask.set(idx, true);
    }
    mask
}

/// Restores the cardinality window by flipping uniformly chosen bits:
/// set bits get added below `lower`, cleared above `upper`. Bits outside
/// the flipped selection are untouched.
pub fn repair_bounds(
    mut mask: FeatureMask,
    bounds: (usize, usize),
    rng: &mut ChaCha8Rng,
) -> FeatureMask {
    let (lower, upper) = bounds;
    let count = mask.count_ones();
    if count < lower {
        let zeros: Vec<usize> = mask.iter_zeros().collect();
        for pick in sample(rng, zeros.len(), lower - count) {
            mask.set(zeros[pick], true);
        }
    } else if count > upper {
        let ones: Vec<usize> = mask.iter_ones().collect();
        for pick in sample(rng, ones.len(), count - upper) {
            mask.set(ones[pick], false);
        }
    }
    mask
}

/// Moves `own` toward `partner`: each differing bit adopts the partner's
/// value independently with probability `|v|`.
fn mix_masks(
    own: &FeatureMask,
    partner: &FeatureMask,
    v: f64,
    rng: &mut ChaCha8Rng,
) -> FeatureMask {
    let adopt = v.abs();
    let mut child = own.clone();
    for idx in 0..own.len() {
        if own.get(idx) != partner.get(idx) && rng.random::<f64>() < adopt {
            child.set(idx, partner.get(idx));
        }
    }
    child
}

/// Crossover step: draws the mixing scale `v` uniformly from [-1, 1],
/// blends the parents bit-wise, then repairs the cardinality window.
pub fn generate_neighbor(
    own: &FeatureMask,
    partner: &FeatureMask,
    bounds: (usize, usize),
    rng: &mut ChaCha8Rng,
) -> Result<FeatureMask> {
    if own.len() != partner.len() {
        return Err(Error::LengthMismatch {
            left: own.len(),
            right: partner.len(),
        });
    }
    let v = rng.random_range(-1.0..=1.0);
    let child = mix_masks(own, partner, v, rng);
    Ok(repair_bounds(child, bounds, rng))
}

/// Greedy replacement: the candidate takes over only on a strict fitness
/// improvement; otherwise the incumbent stays and its trial counter grows.
pub fn greedy_select<E: FitnessFn + ?Sized>(
    current: FoodSource,
    candidate: FeatureMask,
    evaluator: &E,
) -> Result<FoodSource> {
    let candidate_fitness = evaluator.fitness(&candidate)?;
    let current_fitness = current
        .fitness
        .ok_or_else(|| Error::Internal("greedy_select on a source with unset fitness".into()))?;
    if candidate_fitness > current_fitness {
        Ok(FoodSource {
            mask: candidate,
            fitness: Some(candidate_fitness),
            trials: 0,
        })
    } else {
        Ok(FoodSource {
            trials: current.trials + 1,
            ..current
        })
    }
}

/// Fitness-proportional selection weights; uniform when all fitness is 0.
pub fn onlooker_probabilities(colony: &[FoodSource]) -> Result<Vec<f64>> {
    let mut fitness = Vec::with_capacity(colony.len());
    for source in colony {
        let f = source
            .fitness
            .ok_or_else(|| Error::Internal("onlooker_probabilities on unset fitness".into()))?;
        if f < 0.0 {
            return Err(Error::Internal(format!("negative fitness {f}")));
        }
        fitness.push(f);
    }
    let total: f64 = fitness.iter().sum();
    if total == 0.0 {
        return Ok(vec![1.0 / colony.len() as f64; colony.len()]);
    }
    Ok(fitness.into_iter().map(|f| f / total).collect())
}

/// Fresh random subset for an abandoned source. The target cardinality is
/// `round(lower + v' * (upper - lower))` with `v'` uniform in [0, 1], so
/// every draw stays inside the window.
pub fn scout_reset(config: &ColonyConfig, n_features: usize, rng: &mut ChaCha8Rng) -> FeatureMask {
    let span = (config.upper_bound - config.lower_bound) as f64;
    let v_prime = rng.random::<f64>();
    let k = (config.lower_bound as f64 + v_prime * span).round() as usize;
    random_mask(
        n_features,
        k.clamp(config.lower_bound, config.upper_bound),
        rng,
    )
}

fn roulette(probabilities: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let draw = rng.random::<f64>();
    let mut cumulative = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        cumulative += p;
        if draw < cumulative {
            return i;
        }
    }
    probabilities.len() - 1
}

fn partner_index(own: usize, population: usize, rng: &mut ChaCha8Rng) -> usize {
    let r = rng.random_range(0..population - 1);
    if r >= own {
        r + 1
    } else {
        r
    }
}

struct BestTracker {
    mask: FeatureMask,
    fitness: f64,
}

impl BestTracker {
    fn offer(&mut self, mask: &FeatureMask, fitness: f64) {
        if fitness > self.fitness {
            self.fitness = fitness;
            self.mask = mask.clone();
        }
    }
}

/// Runs the full colony loop against an arbitrary fitness function.
///
/// One RNG stream seeded from the config drives everything in a fixed
/// phase order, so identical inputs give identical results. Terminates
/// after `max_iterations` iterations, or as soon as a perfect fitness of
/// 1.0 is seen.
pub fn run_with_evaluator<E: FitnessFn + ?Sized>(
    config: &ColonyConfig,
    n_features: usize,
    evaluator: &E,
) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut colony = init_colony(config, n_features, &mut rng)?;
    let mut evaluations = 0u64;
    let mut scout_events = 0u64;

    let mut best: Option<BestTracker> = None;
    for source in &mut colony {
        let fitness = evaluator.fitness(&source.mask)?;
        evaluations += 1;
        source.fitness = Some(fitness);
        match &mut best {
            Some(tracker) => tracker.offer(&source.mask, fitness),
            None => {
                best = Some(BestTracker {
                    mask: source.mask.clone(),
                    fitness,
                })
            }
        }
    }
    let mut best = best.ok_or_else(|| Error::Internal("empty colony".into()))?;
    let mut history = vec![best.fitness];

    if best.fitness < 1.0 {
        for _ in 0..config.max_iterations {
            // Employed phase: every source proposes a neighbor.
            for i in 0..colony.len() {
                let partner = partner_index(i, colony.len(), &mut rng);
                let candidate = generate_neighbor(
                    &colony[i].mask,
                    &colony[partner].mask,
                    (config.lower_bound, config.upper_bound),
                    &mut rng,
                )?;
                colony[i] = greedy_select(colony[i].clone(), candidate, evaluator)?;
                evaluations += 1;
                let updated = &colony[i];
                best.offer(&updated.mask, updated.fitness.unwrap_or(0.0));
            }

            // Onlooker phase: fitness-proportional proposals.
            let probabilities = onlooker_probabilities(&colony)?;
            for _ in 0..colony.len() {
                let i = roulette(&probabilities, &mut rng);
                let partner = partner_index(i, colony.len(), &mut rng);
                let candidate = generate_neighbor(
                    &colony[i].mask,
                    &colony[partner].mask,
                    (config.lower_bound, config.upper_bound),
                    &mut rng,
                )?;
                colony[i] = greedy_select(colony[i].clone(), candidate, evaluator)?;
                evaluations += 1;
                let updated = &colony[i];
                best.offer(&updated.mask, updated.fitness.unwrap_or(0.0));
            }

            // Scout phase: at most one abandonment per iteration, aimed at
            // the max-trials violator (ties broken by lowest index).
            let scout_target = colony
                .iter()
                .enumerate()
                .max_by(|(ia, a), (ib, b)| a.trials.cmp(&b.trials).then(ib.cmp(ia)))
                .filter(|(_, source)| source.trials > config.limit)
                .map(|(i, _)| i);
            if let Some(i) = scout_target {
                let mask = scout_reset(config, n_features, &mut rng);
                let fitness = evaluator.fitness(&mask)?;
                evaluations += 1;
                best.offer(&mask, fitness);
                colony[i] = FoodSource {
                    mask,
                    fitness: Some(fitness),
                    trials: 0,
                };
                scout_events += 1;
            }

            history.push(best.fitness);
            if best.fitness >= 1.0 {
                break;
            }
        }
    }

    Ok(RunResult {
        best_mask: best.mask,
        best_fitness: best.fitness,
        history,
        evaluations,
        scout_events,
    })
}

/// Colony search with the dataset-backed subset evaluator.
pub fn run(
    config: &ColonyConfig,
    dataset: &Dataset,
    protocol: &FitnessProtocol,
) -> Result<RunResult> {
    let evaluator = SubsetEvaluator::new(dataset, protocol)?;
    run_with_evaluator(config, dataset.n_features(), &evaluator)
}
