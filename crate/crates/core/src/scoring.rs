//! Scoring functions: permutation-invariant aggregation of a multiset of
//! unit-interval values into one unit-interval value.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScoringFunction {
    Mean,
    Max,
    /// Lower empirical quantile: sort ascending, take index `ceil(q·n) − 1`
    /// clamped to `[0, n − 1]`.
    Quantile { q: f64 },
}

impl ScoringFunction {
    pub fn quantile(q: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&q) {
            Ok(ScoringFunction::Quantile { q })
        } else {
            Err(Error::InvalidArgument(format!("quantile level {q} outside [0, 1]")))
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let ScoringFunction::Quantile { q } = *self {
            ScoringFunction::quantile(q)?;
        }
        Ok(())
    }

    /// Aggregate `values`. Every σ here is exactly permutation-invariant.
    pub fn score(&self, values: &[f64]) -> Result<f64> {
        if values.is_empty() {
            return Err(Error::EmptyInput("scoring multiset"));
        }
        if let Some(&bad) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::OutOfUnitInterval {
                source_name: "scoring input".into(),
                value: bad,
            });
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(self.score_sorted(&sorted))
    }

    /// `sorted` must be nonempty, ascending, and inside [0, 1].
    pub(crate) fn score_sorted(&self, sorted: &[f64]) -> f64 {
        debug_assert!(!sorted.is_empty());
        let n = sorted.len();
        match *self {
            ScoringFunction::Mean => exact_mean(sorted).min(1.0),
            ScoringFunction::Max => sorted[n - 1],
            ScoringFunction::Quantile { q } => sorted[quantile_index(q, n)],
        }
    }
}

/// Add `x` into a nonoverlapping expansion without rounding error.
fn grow(partials: &mut Vec<f64>, mut x: f64) {
    let mut i = 0;
    for j in 0..partials.len() {
        let mut y = partials[j];
        if x.abs() < y.abs() {
            std::mem::swap(&mut x, &mut y);
        }
        let hi = x + y;
        let lo = y - (hi - x);
        if lo != 0.0 {
            partials[i] = lo;
            i += 1;
        }
        x = hi;
    }
    partials.truncate(i);
    partials.push(x);
}

/// The mean, rounded once. The sum is kept exact as an expansion, divided,
/// and the quotient corrected by the exact residual `sum − q·n`. A multiset
/// of copies of one value averages to that value, and a mean of 0/1 values
/// equals `count / n` bit for bit.
fn exact_mean(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mut partials = Vec::new();
    for &v in values {
        grow(&mut partials, v);
    }
    let sum: f64 = partials.iter().rev().sum();
    let q = sum / n;
    let p = q * n;
    grow(&mut partials, -p);
    grow(&mut partials, -q.mul_add(n, -p));
    let residual: f64 = partials.iter().rev().sum();
    q + residual / n
}

pub(crate) fn quantile_index(q: f64, n: usize) -> usize {
    let raw = (q * n as f64).ceil() as i64 - 1;
    raw.clamp(0, n as i64 - 1) as usize
}

impl fmt::Display for ScoringFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoringFunction::Mean => f.write_str("mean"),
            ScoringFunction::Max => f.write_str("max"),
            ScoringFunction::Quantile { q } => write!(f, "quantile({q})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    #[test]
    fn catalogue_values() {
        assert_eq!(ScoringFunction::Mean.score(&[0.0, 1.0]).unwrap(), 0.5);
        assert_eq!(ScoringFunction::Max.score(&[0.2, 0.7]).unwrap(), 0.7);
        let median = ScoringFunction::quantile(0.5).unwrap();
        assert_eq!(median.score(&[0.1, 0.9, 0.5]).unwrap(), 0.5);
    }

    #[test]
    fn quantile_index_brute_force() {
        // sort then index ceil(q*n) - 1, clamped
        assert_eq!(quantile_index(0.5, 3), 1);
        assert_eq!(quantile_index(0.0, 3), 0);
        assert_eq!(quantile_index(1.0, 3), 2);
        assert_eq!(quantile_index(0.34, 3), 1);
        assert_eq!(quantile_index(0.33, 3), 0);
    }

    #[test]
    fn empty_and_out_of_range_inputs() {
        assert!(matches!(
            ScoringFunction::Mean.score(&[]),
            Err(Error::EmptyInput(_))
        ));
        assert!(ScoringFunction::Max.score(&[0.5, 1.5]).is_err());
        assert!(ScoringFunction::quantile(1.1).is_err());
    }

    #[test]
    fn mean_of_copies_is_the_value() {
        for x in [0.1, 0.2, 0.3, 0.7, 0.9, 1.0 / 3.0] {
            for n in 1..300 {
                assert_eq!(exact_mean(&vec![x; n]), x, "{x} x {n}");
            }
        }
    }

    proptest! {
        #[test]
        fn mean_is_correctly_rounded(ks in prop::collection::vec(0u32..=1024, 1..200)) {
            // dyadic inputs: the exact mean is K / (1024 n), one IEEE division
            let values: Vec<f64> = ks.iter().map(|&k| k as f64 / 1024.0).collect();
            let total: u64 = ks.iter().map(|&k| k as u64).sum();
            let expected = total as f64 / (1024 * ks.len()) as f64;
            prop_assert_eq!(exact_mean(&values), expected);
        }

        #[test]
        fn indicator_mean_is_count_over_n(bits in prop::collection::vec(any::<bool>(), 1..500)) {
            let values: Vec<f64> = bits.iter().map(|&b| b as u8 as f64).collect();
            let count = bits.iter().filter(|&&b| b).count();
            prop_assert_eq!(exact_mean(&values), count as f64 / bits.len() as f64);
        }
    }

    fn sigma() -> impl Strategy<Value = ScoringFunction> {
        prop_oneof![
            Just(ScoringFunction::Mean),
            Just(ScoringFunction::Max),
            (0.0..=1.0f64).prop_map(|q| ScoringFunction::Quantile { q }),
        ]
    }

    proptest! {
        #[test]
        fn permutation_invariant_and_in_range(
            sigma in sigma(),
            values in prop::collection::vec(0.0..=1.0f64, 1..40),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut shuffled = values.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let a = sigma.score(&values).unwrap();
            let b = sigma.score(&shuffled).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
