//! Two-sample distinguishability of generated sets against originals.
//!
//! The central quantity is the gap
//! `Δ = max_{f ∈ F} |σ(f(S)) − σ(f(Ŝ))|` between an original set `S` and a
//! generated set `Ŝ`, for a finite family `F` of distinguishers mapping
//! samples to [0, 1] and a permutation-invariant score `σ`. A generated set
//! passes at tolerance `ε` when `Δ ≤ ε`.
//!
//! ```
//! use catfid_core::{delta, DistinguisherFamily, FeatureExtractor, Role, SampleSet, ScoringFunction};
//! use catfid_core::distinguishers::{make_threshold_family, ThresholdFamilySpec};
//!
//! let s = SampleSet::from_feature_values("v", &[0.1, 0.2, 0.3], Role::Original).unwrap();
//! let g = SampleSet::from_feature_values("v", &[0.2, 0.3, 0.4], Role::Generated).unwrap();
//! let spec = ThresholdFamilySpec::midpoints(FeatureExtractor::named("v"));
//! let family: DistinguisherFamily = make_threshold_family(&spec, &s, &g).unwrap();
//! let report = delta(&s, &g, &family, &ScoringFunction::Mean).unwrap();
//! assert!((report.delta - 1.0 / 3.0).abs() < 1e-15);
//! ```

pub mod agent;
pub mod ctest;
pub mod delta;
pub mod distinguisher;
pub mod distinguishers;
pub mod error;
pub mod generalization;
pub mod harness;
pub mod resolution;
pub mod sample;
pub mod scoring;
pub mod seeds;

pub use delta::{delta, verdict, verdict_for, DeltaReport, Epsilon, MemberGap, SetSizes, Verdict};
pub use distinguisher::{Distinguisher, DistinguisherFamily, DistinguisherKind, Enumeration, Params, Polarity};
pub use distinguishers::{FamilySpec, FeatureExtractor, FeatureSource, Normalizer};
pub use error::{Error, ParseError, Result};
pub use resolution::{bootstrap_delta_ci, estimate_resolution, BootstrapInterval, ResolutionEstimate};
pub use sample::{Codec, Payload, Role, Sample, SampleRecord, SampleSet};
pub use scoring::ScoringFunction;
pub use seeds::derive_seed;
