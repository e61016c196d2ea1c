//! Resolution floor (split-half self-distinguishability) and percentile
//! bootstrap intervals for the gap.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::delta::{argmax, evaluate_family, member_gap};
use crate::distinguisher::DistinguisherFamily;
use crate::error::{Error, Result};
use crate::sample::SampleSet;
use crate::scoring::{quantile_index, ScoringFunction};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResolutionEstimate {
    pub epsilon_f_mean: f64,
    pub epsilon_f_max: f64,
    pub n_splits: usize,
    pub seed: u64,
}

fn gap_between(rows: &[Vec<f64>], sigma: &ScoringFunction, a: &[usize], b: &[usize]) -> f64 {
    let gaps: Vec<f64> = rows
        .iter()
        .map(|row| {
            let mut va: Vec<f64> = a.iter().map(|&i| row[i]).collect();
            let mut vb: Vec<f64> = b.iter().map(|&i| row[i]).collect();
            member_gap(sigma, &mut va, &mut vb)
        })
        .collect();
    argmax(&gaps).1
}

/// Noise floor of `family` on data like `set`: the gap between two random
/// halves of `set` (sizes ⌊m/2⌋ and ⌈m/2⌉), averaged over `n_splits`
/// seeded splits. Gaps below this are indistinguishable from resampling
/// noise.
pub fn estimate_resolution(
    set: &SampleSet,
    family: &DistinguisherFamily,
    sigma: &ScoringFunction,
    n_splits: usize,
    seed: u64,
) -> Result<ResolutionEstimate> {
    if set.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: set.len(),
        });
    }
    if n_splits == 0 {
        return Err(Error::InvalidArgument("n_splits must be at least 1".into()));
    }
    if family.is_empty() {
        return Err(Error::EmptyFamily(family.key().to_string()));
    }
    sigma.validate()?;
    let rows = evaluate_family(family, set.items())?;
    let m = set.len();
    let half = m / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..m).collect();
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for _ in 0..n_splits {
        order.shuffle(&mut rng);
        let (a, b) = order.split_at(half);
        let d = gap_between(&rows, sigma, a, b);
        sum += d;
        max = max.max(d);
    }
    Ok(ResolutionEstimate {
        epsilon_f_mean: (sum / n_splits as f64).min(max),
        epsilon_f_max: max,
        n_splits,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapInterval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
    pub n_boot: usize,
    pub seed: u64,
}

/// Percentile interval of the gap over `n_boot` paired resamples with
/// replacement of both sets. The family is held fixed across resamples.
pub fn bootstrap_delta_ci(
    original: &SampleSet,
    generated: &SampleSet,
    family: &DistinguisherFamily,
    sigma: &ScoringFunction,
    n_boot: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapInterval> {
    if n_boot < 100 {
        return Err(Error::InvalidArgument(format!("n_boot must be at least 100, got {n_boot}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("level {level} outside (0, 1)")));
    }
    if family.is_empty() {
        return Err(Error::EmptyFamily(family.key().to_string()));
    }
    sigma.validate()?;
    let rows_s = evaluate_family(family, original.items())?;
    let rows_g = evaluate_family(family, generated.items())?;
    let (n, m) = (original.len(), generated.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deltas = Vec::with_capacity(n_boot);
    let mut va = Vec::with_capacity(n);
    let mut vb = Vec::with_capacity(m);
    let mut gaps = Vec::with_capacity(family.len());
    for _ in 0..n_boot {
        let ia: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let ib: Vec<usize> = (0..m).map(|_| rng.random_range(0..m)).collect();
        gaps.clear();
        for (rs, rg) in rows_s.iter().zip(&rows_g) {
            va.clear();
            vb.clear();
            va.extend(ia.iter().map(|&i| rs[i]));
            vb.extend(ib.iter().map(|&i| rg[i]));
            gaps.push(member_gap(sigma, &mut va, &mut vb));
        }
        deltas.push(argmax(&gaps).1);
    }
    deltas.sort_by(f64::total_cmp);
    let alpha = (1.0 - level) / 2.0;
    Ok(BootstrapInterval {
        lo: deltas[quantile_index(alpha, n_boot)],
        hi: deltas[quantile_index(1.0 - alpha, n_boot)],
        level,
        n_boot,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distinguishers::features::FeatureExtractor;
    use crate::distinguishers::threshold::{make_threshold_family, ThresholdFamilySpec};
    use crate::sample::{Role, Sample};

    fn midpoints(s: &SampleSet, g: &SampleSet) -> DistinguisherFamily {
        make_threshold_family(&ThresholdFamilySpec::midpoints(FeatureExtractor::named("v")), s, g).unwrap()
    }

    #[test]
    fn identical_pair_has_zero_floor() {
        let x = Sample::text("a", "z").with_feature("v", 0.3).unwrap();
        let y = Sample::text("b", "z").with_feature("v", 0.3).unwrap();
        let s = SampleSet::new(vec![x, y], Role::Original).unwrap();
        let r = estimate_resolution(&s, &midpoints(&s, &s), &ScoringFunction::Mean, 10, 1).unwrap();
        assert_eq!(r.epsilon_f_mean, 0.0);
        assert_eq!(r.epsilon_f_max, 0.0);
    }

    #[test]
    fn constant_feature_has_zero_floor() {
        let s = SampleSet::from_feature_values("v", &[0.7; 9], Role::Original).unwrap();
        let r = estimate_resolution(&s, &midpoints(&s, &s), &ScoringFunction::Mean, 25, 3).unwrap();
        assert_eq!(r.epsilon_f_mean, 0.0);
    }

    #[test]
    fn floor_shrinks_with_set_size() {
        let floor = |m: usize| {
            let values: Vec<f64> = (0..m).map(|i| i as f64 / m as f64).collect();
            let s = SampleSet::from_feature_values("v", &values, Role::Original).unwrap();
            estimate_resolution(&s, &midpoints(&s, &s), &ScoringFunction::Mean, 50, 11).unwrap()
        };
        let small = floor(20);
        let large = floor(200);
        assert!(large.epsilon_f_mean > 0.0);
        assert!(large.epsilon_f_mean < small.epsilon_f_mean);
        assert!(small.epsilon_f_mean <= small.epsilon_f_max);
    }

    #[test]
    fn too_few_samples() {
        let s = SampleSet::from_feature_values("v", &[0.1], Role::Original).unwrap();
        let err = estimate_resolution(&s, &midpoints(&s, &s), &ScoringFunction::Mean, 5, 0).unwrap_err();
        assert!(matches!(err, Error::TooFewSamples { needed: 2, got: 1 }));
    }

    #[test]
    fn deterministic_given_seed() {
        let values: Vec<f64> = (0..50).map(|i| ((i * 37) % 50) as f64 / 50.0).collect();
        let s = SampleSet::from_feature_values("v", &values, Role::Original).unwrap();
        let f = midpoints(&s, &s);
        let a = estimate_resolution(&s, &f, &ScoringFunction::Mean, 20, 99).unwrap();
        let b = estimate_resolution(&s, &f, &ScoringFunction::Mean, 20, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bootstrap_single_points_are_fixed() {
        let s = SampleSet::from_feature_values("v", &[0.2], Role::Original).unwrap();
        let g = SampleSet::from_feature_values("v", &[0.8], Role::Generated).unwrap();
        let ci = bootstrap_delta_ci(&s, &g, &midpoints(&s, &g), &ScoringFunction::Mean, 200, 0.9, 5).unwrap();
        assert_eq!((ci.lo, ci.hi), (1.0, 1.0));
    }

    #[test]
    fn bootstrap_range_contract_on_identical_sets() {
        let s = SampleSet::from_feature_values("v", &[0.1, 0.4, 0.4, 0.8], Role::Original).unwrap();
        let ci = bootstrap_delta_ci(&s, &s, &midpoints(&s, &s), &ScoringFunction::Max, 300, 0.95, 8).unwrap();
        assert!(0.0 <= ci.lo && ci.lo <= ci.hi && ci.hi <= 1.0);
    }

    #[test]
    fn bootstrap_covers_ks_fixture() {
        let s = SampleSet::from_feature_values("v", &[0.1, 0.5, 0.9], Role::Original).unwrap();
        let g = SampleSet::from_feature_values("v", &[0.2, 0.6, 0.7], Role::Generated).unwrap();
        let family = midpoints(&s, &g);
        let point = crate::delta::delta(&s, &g, &family, &ScoringFunction::Mean).unwrap().delta;
        let ci = bootstrap_delta_ci(&s, &g, &family, &ScoringFunction::Mean, 1000, 0.95, 2024).unwrap();
        assert!(ci.lo <= point && point <= ci.hi, "{ci:?}");
    }

    #[test]
    fn bootstrap_argument_checks() {
        let s = SampleSet::from_feature_values("v", &[0.1, 0.2], Role::Original).unwrap();
        let f = midpoints(&s, &s);
        assert!(bootstrap_delta_ci(&s, &s, &f, &ScoringFunction::Mean, 99, 0.9, 0).is_err());
        assert!(bootstrap_delta_ci(&s, &s, &f, &ScoringFunction::Mean, 100, 1.0, 0).is_err());
    }
}
