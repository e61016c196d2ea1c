//! The distinguisher gap between an original and a generated sample set,
//! and ε-verdicts on it.
//!
//! For a family `F` and scoring function `σ`:
//!
//! ```text
//! Δ(S, Ŝ) = max_{f ∈ F} | σ({f(x) : x ∈ S}) − σ({f(x) : x ∈ Ŝ}) |
//! ```
//!
//! The max runs over the family's finite enumeration. When the family is a
//! grid restriction of something larger the report says so, because the
//! value is then only a lower bound on the supremum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distinguisher::{DistinguisherFamily, Enumeration};
use crate::error::{Error, Result};
use crate::resolution::ResolutionEstimate;
use crate::sample::{Sample, SampleSet};
use crate::scoring::ScoringFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberGap {
    pub key: String,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetSizes {
    pub original: usize,
    pub generated: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaReport {
    pub delta: f64,
    pub argmax_key: String,
    /// In the family's enumeration order.
    pub per_member_gaps: Vec<MemberGap>,
    pub sizes: SetSizes,
    pub sigma: ScoringFunction,
    pub family_key: String,
    /// The family was a finite grid of a larger family, so `delta` is a
    /// lower bound on the supremum.
    pub lower_bound: bool,
    /// The family was built from the compared sets themselves.
    pub data_dependent: bool,
}

/// Distinguisher outputs on every sample, one row per family member.
pub(crate) fn evaluate_family(family: &DistinguisherFamily, items: &[Sample]) -> Result<Vec<Vec<f64>>> {
    family
        .members()
        .par_iter()
        .map(|f| items.iter().map(|x| f.evaluate(x)).collect::<Result<Vec<f64>>>())
        .collect()
}

/// `|σ(a) − σ(b)|`; both slices are sorted in place.
pub(crate) fn member_gap(sigma: &ScoringFunction, a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    (sigma.score_sorted(a) - sigma.score_sorted(b)).abs()
}

/// Max over per-member gaps; ties go to the earliest member.
pub(crate) fn argmax(gaps: &[f64]) -> (usize, f64) {
    let mut best = (0, gaps[0]);
    for (i, &g) in gaps.iter().enumerate().skip(1) {
        if g > best.1 {
            best = (i, g);
        }
    }
    best
}

pub fn delta(
    original: &SampleSet,
    generated: &SampleSet,
    family: &DistinguisherFamily,
    sigma: &ScoringFunction,
) -> Result<DeltaReport> {
    if family.is_empty() {
        return Err(Error::EmptyFamily(family.key().to_string()));
    }
    if original.is_empty() || generated.is_empty() {
        return Err(Error::EmptyInput("sample set"));
    }
    sigma.validate()?;
    let on_original = evaluate_family(family, original.items())?;
    let on_generated = evaluate_family(family, generated.items())?;
    let gaps: Vec<f64> = on_original
        .into_iter()
        .zip(on_generated)
        .map(|(mut a, mut b)| member_gap(sigma, &mut a, &mut b))
        .collect();
    let (best, value) = argmax(&gaps);
    Ok(DeltaReport {
        delta: value,
        argmax_key: family.members()[best].key().to_string(),
        per_member_gaps: family
            .members()
            .iter()
            .zip(&gaps)
            .map(|(f, &gap)| MemberGap {
                key: f.key().to_string(),
                gap,
            })
            .collect(),
        sizes: SetSizes {
            original: original.len(),
            generated: generated.len(),
        },
        sigma: *sigma,
        family_key: family.key().to_string(),
        lower_bound: family.enumeration() == Enumeration::Grid,
        data_dependent: family.is_data_dependent(),
    })
}

/// A tolerance in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Epsilon(value))
        } else {
            Err(Error::InvalidArgument(format!("epsilon {value} outside [0, 1]")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Epsilon {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Epsilon::new(value)
    }
}

impl From<Epsilon> for f64 {
    fn from(e: Epsilon) -> f64 {
        e.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub epsilon: f64,
    pub delta: f64,
    pub pass: bool,
    pub resolution_floor: Option<f64>,
    /// The family's own noise floor is not below ε, so a pass cannot be
    /// told apart from noise.
    pub resolution_caveat: bool,
}

/// `pass ⇔ delta ≤ ε` (inclusive), caveat when `ε_f ≥ ε`.
pub fn verdict(report: &DeltaReport, epsilon: Epsilon, resolution: Option<&ResolutionEstimate>) -> Verdict {
    verdict_for(report.delta, epsilon, resolution)
}

pub fn verdict_for(delta: f64, epsilon: Epsilon, resolution: Option<&ResolutionEstimate>) -> Verdict {
    let floor = resolution.map(|r| r.epsilon_f_mean);
    Verdict {
        epsilon: epsilon.get(),
        delta,
        pass: delta <= epsilon.get(),
        resolution_floor: floor,
        resolution_caveat: floor.is_some_and(|f| f >= epsilon.get()),
    }
}
