//! Concrete distinguisher families: indicator thresholds over a feature,
//! an LZ78 compression ratio, and a trained logistic-regression judge.

pub mod classifier;
pub mod compression;
pub mod features;
pub mod spec;
pub mod threshold;

pub use classifier::{advantage_to_delta, train_classifier_distinguisher, ClassifierSpec, TrainedClassifier};
pub use features::{FeatureExtractor, FeatureSource, Normalizer};
pub use spec::{FamilySpec, Prepared};
pub use threshold::{ks_delta, ks_statistic, make_threshold_family, KsStatistic, ThresholdFamilySpec, Thresholds};

use crate::distinguisher::{Distinguisher, Params};

/// `f(x) = clamp(lz78_len(payload) / max(1, len(payload)), 0, 1)`.
pub fn make_compression_distinguisher() -> Distinguisher {
    Distinguisher::new("compression[lz78]", Params::Compression)
}
