//! Brute-force oracle over every nonempty mask of a 12-feature synthetic
//! dataset: the top-ranked subset by validation accuracy must contain the
//! planted informative features.

use abc_select::classifier::{EvaluatorKind, FitnessFn, FitnessProtocol, SubsetEvaluator};
use abc_select::dataset::generate_synthetic;
use abc_select::mask::FeatureMask;

#[test]
fn best_subset_over_all_masks_contains_planted_features() {
    let d = generate_synthetic(500, 12, &[0, 1, 2], 0.1, 31).unwrap();
    let protocol = FitnessProtocol {
        evaluator: EvaluatorKind::Centroid,
        ..Default::default()
    };
    let evaluator = SubsetEvaluator::new(&d, &protocol).unwrap();

    let mut best_fitness = f64::NEG_INFINITY;
    let mut best_bits = 0u16;
    for bits in 1u16..(1 << 12) {
        let indices: Vec<usize> = (0..12).filter(|i| bits >> i & 1 == 1).collect();
        let mask = FeatureMask::from_indices(12, &indices).unwrap();
        let fitness = evaluator.fitness(&mask).unwrap();
        if fitness > best_fitness {
            best_fitness = fitness;
            best_bits = bits;
        }
    }

    assert!(
        best_bits & 0b111 == 0b111,
        "top mask {best_bits:#014b} (fitness {best_fitness}) misses a planted feature"
    );
}
