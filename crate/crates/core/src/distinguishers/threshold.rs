//! Indicator families over one scalar feature, and the two-sample
//! Kolmogorov–Smirnov statistic they reduce to under the mean score.

use serde::{Deserialize, Serialize};

use crate::distinguisher::{Distinguisher, DistinguisherFamily, Polarity};
use crate::distinguishers::features::FeatureExtractor;
use crate::error::{Error, Result};
use crate::sample::SampleSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Thresholds {
    /// Exactly these thresholds, strictly ascending.
    Explicit(Vec<f64>),
    /// `count` evenly spaced thresholds from `lo` to `hi` inclusive. The
    /// resulting gap is a lower bound over all thresholds.
    Grid { lo: f64, hi: f64, count: usize },
    /// Midpoints between consecutive distinct observed values of both sets,
    /// plus one sentinel below the minimum and one above the maximum. The
    /// sup over all real thresholds is attained on this set.
    Midpoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdFamilySpec {
    pub feature: FeatureExtractor,
    pub thresholds: Thresholds,
    #[serde(default = "default_polarity")]
    pub polarity: Polarity,
}

fn default_polarity() -> Polarity {
    Polarity::Geq
}

impl ThresholdFamilySpec {
    pub fn midpoints(feature: FeatureExtractor) -> Self {
        ThresholdFamilySpec {
            feature,
            thresholds: Thresholds::Midpoints,
            polarity: Polarity::Geq,
        }
    }

    pub fn explicit(feature: FeatureExtractor, thresholds: Vec<f64>) -> Self {
        ThresholdFamilySpec {
            feature,
            thresholds: Thresholds::Explicit(thresholds),
            polarity: Polarity::Geq,
        }
    }
}

fn feature_values(feature: &FeatureExtractor, set: &SampleSet) -> Result<Vec<f64>> {
    set.items().iter().map(|x| feature.extract(x)).collect()
}

/// Sorted distinct values of both sets.
fn distinct_values(feature: &FeatureExtractor, a: &SampleSet, b: &SampleSet) -> Result<Vec<f64>> {
    let mut values = feature_values(feature, a)?;
    values.extend(feature_values(feature, b)?);
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(values)
}

/// A threshold strictly separating `a < b` under `polarity`: for `Geq`
/// it lies in `(a, b]`, for `Leq` in `[a, b)`.
fn separating_midpoint(a: f64, b: f64, polarity: Polarity) -> f64 {
    let m = a + (b - a) / 2.0;
    match polarity {
        Polarity::Geq if m <= a => b,
        Polarity::Leq if m >= b => a,
        _ => m,
    }
}

pub fn midpoint_thresholds(sorted_distinct: &[f64], polarity: Polarity) -> Vec<f64> {
    let (Some(&min), Some(&max)) = (sorted_distinct.first(), sorted_distinct.last()) else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(sorted_distinct.len() + 1);
    out.push(min - 1.0);
    out.extend(
        sorted_distinct
            .windows(2)
            .map(|w| separating_midpoint(w[0], w[1], polarity)),
    );
    out.push(max + 1.0);
    out
}

/// One indicator per threshold, in ascending threshold order.
pub fn make_threshold_family(
    spec: &ThresholdFamilySpec,
    original: &SampleSet,
    generated: &SampleSet,
) -> Result<DistinguisherFamily> {
    let key = format!("threshold:{}", spec.feature.name);
    // also checks the feature is readable on every sample
    let observed = distinct_values(&spec.feature, original, generated)?;
    let (thresholds, grid) = match &spec.thresholds {
        Thresholds::Explicit(ts) => (ts.clone(), false),
        Thresholds::Grid { lo, hi, count } => {
            if *count == 0 {
                (Vec::new(), true)
            } else if *count == 1 {
                (vec![*lo], true)
            } else {
                if !(lo < hi) {
                    return Err(Error::InvalidArgument(format!("grid bounds ({lo}, {hi}) need lo < hi")));
                }
                let step = (hi - lo) / (*count - 1) as f64;
                ((0..*count).map(|i| lo + step * i as f64).collect(), true)
            }
        }
        Thresholds::Midpoints => (midpoint_thresholds(&observed, spec.polarity), false),
    };
    if thresholds.is_empty() {
        return Err(Error::EmptyFamily(key));
    }
    if thresholds.iter().any(|t| !t.is_finite()) || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!("thresholds of `{key}` must be finite and strictly ascending")));
    }
    let members = thresholds
        .into_iter()
        .map(|t| Distinguisher::threshold(spec.feature.clone(), t, spec.polarity))
        .collect();
    let family = if grid {
        DistinguisherFamily::grid(key, members)?
    } else {
        DistinguisherFamily::explicit(key, members)?
    };
    Ok(match spec.thresholds {
        Thresholds::Midpoints => family.data_dependent(),
        _ => family,
    })
}

/// Two-sample KS statistic as an exact reduced fraction, with the float
/// value the mean-scored midpoint family produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsStatistic {
    pub numerator: u64,
    pub denominator: u64,
    pub value: f64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Sweep the merged sorted values once. Every cut between consecutive
/// distinct values gives the counts `#{x ≥ t}` for both sets.
pub fn ks_statistic(original: &SampleSet, generated: &SampleSet, feature: &FeatureExtractor) -> Result<KsStatistic> {
    if original.is_empty() || generated.is_empty() {
        return Err(Error::EmptyInput("sample set"));
    }
    let mut a = feature_values(feature, original)?;
    let mut b = feature_values(feature, generated)?;
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());

    let gap = |above_a: usize, above_b: usize| -> (u64, f64) {
        let exact = (above_a as u64 * m as u64).abs_diff(above_b as u64 * n as u64);
        let float = (above_a as f64 / n as f64 - above_b as f64 / m as f64).abs();
        (exact, float)
    };

    // below-minimum cut: everything is above
    let (mut best_exact, mut best_float) = gap(n, m);
    let (mut i, mut j) = (0, 0);
    while i < n || j < m {
        let v = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < n && a[i] == v {
            i += 1;
        }
        while j < m && b[j] == v {
            j += 1;
        }
        let (e, f) = gap(n - i, m - j);
        best_exact = best_exact.max(e);
        best_float = best_float.max(f);
    }

    let den = n as u64 * m as u64;
    let g = gcd(best_exact, den).max(1);
    Ok(KsStatistic {
        numerator: best_exact / g,
        denominator: den / g,
        value: best_float,
    })
}

/// Equal, bit for bit, to the gap of the midpoint threshold family under
/// the mean score.
pub fn ks_delta(original: &SampleSet, generated: &SampleSet, feature: &FeatureExtractor) -> Result<f64> {
    ks_statistic(original, generated, feature).map(|k| k.value)
}
