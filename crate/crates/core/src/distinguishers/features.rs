use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sample::{Payload, Sample};

/// Where a feature's raw value comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FeatureSource {
    /// Bytes of text or opaque payloads, symbols of symbol sequences.
    PayloadLength,
    /// Mean symbol (or byte) value; 0 for an empty payload.
    MeanSymbolValue,
    ScalarIdentity,
    /// Fraction of length-`n` windows equal to `gram`.
    NgramFrequency { n: usize, gram: Vec<u32> },
    /// A named entry of the sample's feature map.
    Named { feature: String },
}

/// Clamped affine map of `[lo, hi]` onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct Normalizer {
    lo: f64,
    hi: f64,
}

impl Normalizer {
    pub const UNIT: Normalizer = Normalizer { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Normalizer { lo, hi })
        } else {
            Err(Error::InvalidArgument(format!("normalizer bounds ({lo}, {hi}) need lo < hi")))
        }
    }

    pub fn apply(&self, raw: f64) -> f64 {
        ((raw - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer::UNIT
    }
}

impl TryFrom<(f64, f64)> for Normalizer {
    type Error = Error;

    fn try_from((lo, hi): (f64, f64)) -> Result<Self> {
        Normalizer::new(lo, hi)
    }
}

impl From<Normalizer> for (f64, f64) {
    fn from(n: Normalizer) -> Self {
        (n.lo, n.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureExtractor {
    pub name: String,
    pub source: FeatureSource,
    #[serde(default)]
    pub normalizer: Normalizer,
}

impl FeatureExtractor {
    pub fn new(name: impl Into<String>, source: FeatureSource, normalizer: Normalizer) -> Self {
        FeatureExtractor {
            name: name.into(),
            source,
            normalizer,
        }
    }

    /// The named feature-map entry, with unit bounds.
    pub fn named(feature: &str) -> Self {
        FeatureExtractor::new(
            feature,
            FeatureSource::Named {
                feature: feature.to_string(),
            },
            Normalizer::UNIT,
        )
    }

    /// Raw value before normalization.
    pub fn raw(&self, x: &Sample) -> Result<f64> {
        let mismatch = || Error::CodecMismatch {
            distinguisher: format!("feature:{}", self.name),
            codec: x.codec(),
        };
        match (&self.source, x.payload()) {
            (FeatureSource::Named { feature }, _) => x.feature(feature),
            (FeatureSource::ScalarIdentity, Payload::Scalar(v)) => Ok(*v),
            (FeatureSource::ScalarIdentity, _) => Err(mismatch()),
            (_, Payload::Scalar(_)) => Err(mismatch()),
            (FeatureSource::PayloadLength, p) => Ok(match p {
                Payload::Text(s) => s.len(),
                Payload::Symbols(s) => s.len(),
                Payload::Bytes(b) => b.len(),
                Payload::Scalar(_) => unreachable!(),
            } as f64),
            (FeatureSource::MeanSymbolValue, p) => {
                let values = symbol_values(p);
                if values.is_empty() {
                    Ok(0.0)
                } else {
                    Ok(values.iter().map(|&v| v as f64).sum::<f64>() / values.len() as f64)
                }
            }
            (FeatureSource::NgramFrequency { n, gram }, p) => {
                if *n == 0 || gram.len() != *n {
                    return Err(Error::InvalidArgument(format!(
                        "n-gram feature `{}` needs a gram of length n ≥ 1",
                        self.name
                    )));
                }
                let values = symbol_values(p);
                if values.len() < *n {
                    return Ok(0.0);
                }
                let windows = values.len() - n + 1;
                let hits = values.windows(*n).filter(|w| *w == gram.as_slice()).count();
                Ok(hits as f64 / windows as f64)
            }
        }
    }

    /// Normalized value in [0, 1].
    pub fn extract(&self, x: &Sample) -> Result<f64> {
        self.raw(x).map(|v| self.normalizer.apply(v))
    }
}

fn symbol_values(p: &Payload) -> Vec<u32> {
    match p {
        Payload::Text(s) => s.bytes().map(u32::from).collect(),
        Payload::Symbols(s) => s.clone(),
        Payload::Bytes(b) => b.iter().copied().map(u32::from).collect(),
        Payload::Scalar(_) => Vec::new(),
    }
}
