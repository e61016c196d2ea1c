//! Input builders for the benchmarks.

use catfid_core::distinguishers::{make_threshold_family, ThresholdFamilySpec};
use catfid_core::{DistinguisherFamily, FeatureExtractor, Role, SampleSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two scalar sets of size `n` under feature `v`, the second shifted by `shift`.
pub fn scalar_pair(n: usize, shift: f64, seed: u64) -> (SampleSet, SampleSet) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let b: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() + shift).min(1.0)).collect();
    (
        SampleSet::from_feature_values("v", &a, Role::Original).expect("finite values"),
        SampleSet::from_feature_values("v", &b, Role::Generated).expect("finite values"),
    )
}

/// Midpoint thresholds on `v`, one per gap in the pooled values.
pub fn midpoint_family(s: &SampleSet, g: &SampleSet) -> DistinguisherFamily {
    make_threshold_family(&ThresholdFamilySpec::midpoints(FeatureExtractor::named("v")), s, g)
        .expect("non-empty sets")
}
