//! Distinguishers (total maps from samples to [0, 1]) and finite families
//! of them.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::distinguishers::classifier::LogisticModel;
use crate::distinguishers::compression;
use crate::distinguishers::features::FeatureExtractor;
use crate::error::{Error, Result};
use crate::generalization::functor::FunctorMap;
use crate::sample::{Codec, Payload, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistinguisherKind {
    Threshold,
    Compression,
    Classifier,
    ExactMatch,
    Reward,
    HumanEmpirical,
    Transported,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    /// `f(x) = 1[feature(x) ≥ t]`
    Geq,
    /// `f(x) = 1[feature(x) ≤ t]`
    Leq,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Threshold {
        feature: FeatureExtractor,
        threshold: f64,
        polarity: Polarity,
    },
    Compression,
    Classifier(LogisticModel),
    ExactMatch {
        target: Payload,
    },
    /// Reads the `normalized_return` feature of a trajectory sample.
    Reward {
        env_id: String,
    },
    /// Per-item fraction of judges who called the item "original", keyed by
    /// sample id.
    HumanEmpirical {
        fractions: BTreeMap<String, f64>,
    },
    Transported {
        inner: Box<Distinguisher>,
        functor: FunctorMap,
    },
}

pub const NORMALIZED_RETURN: &str = "normalized_return";

#[derive(Debug, Clone, PartialEq)]
pub struct Distinguisher {
    key: String,
    params: Params,
}

impl Distinguisher {
    pub fn new(key: impl Into<String>, params: Params) -> Self {
        Distinguisher {
            key: key.into(),
            params,
        }
    }

    pub fn threshold(feature: FeatureExtractor, threshold: f64, polarity: Polarity) -> Self {
        let op = match polarity {
            Polarity::Geq => ">=",
            Polarity::Leq => "<=",
        };
        let key = format!("threshold[{}{op}{threshold:?}]", feature.name);
        Distinguisher::new(
            key,
            Params::Threshold {
                feature,
                threshold,
                polarity,
            },
        )
    }

    pub fn exact_match(target: Payload) -> Self {
        let key = format!("exact-match[{}]", target.to_json());
        Distinguisher::new(key, Params::ExactMatch { target })
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn kind(&self) -> DistinguisherKind {
        match self.params {
            Params::Threshold { .. } => DistinguisherKind::Threshold,
            Params::Compression => DistinguisherKind::Compression,
            Params::Classifier(_) => DistinguisherKind::Classifier,
            Params::ExactMatch { .. } => DistinguisherKind::ExactMatch,
            Params::Reward { .. } => DistinguisherKind::Reward,
            Params::HumanEmpirical { .. } => DistinguisherKind::HumanEmpirical,
            Params::Transported { .. } => DistinguisherKind::Transported,
        }
    }

    /// Evaluate on one sample. Always in [0, 1] on success.
    pub fn evaluate(&self, x: &Sample) -> Result<f64> {
        let value = match &self.params {
            Params::Threshold {
                feature,
                threshold,
                polarity,
            } => {
                let v = feature.extract(x)?;
                let hit = match polarity {
                    Polarity::Geq => v >= *threshold,
                    Polarity::Leq => v <= *threshold,
                };
                if hit {
                    1.0
                } else {
                    0.0
                }
            }
            Params::Compression => compression::compression_ratio(&x.payload().to_bytes()),
            Params::Classifier(model) => model.predict(x)?,
            Params::ExactMatch { target } => {
                if target.codec() != x.codec() {
                    return Err(self.mismatch(x.codec()));
                }
                if target == x.payload() {
                    1.0
                } else {
                    0.0
                }
            }
            Params::Reward { .. } => {
                if x.codec() != Codec::SymbolSequence {
                    return Err(self.mismatch(x.codec()));
                }
                let r = x.feature(NORMALIZED_RETURN)?;
                // rewards are in [0, 1] by env validation; never clamp here
                if !(0.0..=1.0).contains(&r) {
                    return Err(Error::OutOfUnitInterval {
                        source_name: self.key.clone(),
                        value: r,
                    });
                }
                r
            }
            Params::HumanEmpirical { fractions } => {
                *fractions
                    .get(x.id())
                    .ok_or_else(|| Error::InvalidArgument(format!("no judgements for item `{}`", x.id())))?
            }
            Params::Transported { inner, functor } => inner.evaluate(&functor.forward(x)?)?,
        };
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfUnitInterval {
                source_name: self.key.clone(),
                value,
            });
        }
        Ok(value)
    }

    pub(crate) fn mismatch(&self, codec: Codec) -> Error {
        Error::CodecMismatch {
            distinguisher: self.key.clone(),
            codec,
        }
    }
}

impl fmt::Display for Distinguisher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key)
    }
}

/// How a family's members were enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Enumeration {
    /// The family is exactly this list; the computed gap is the true sup.
    Explicit,
    /// A finite grid restriction of a larger (possibly infinite) family; the
    /// computed gap is a lower bound on the sup over the full family.
    Grid,
}

/// A finite family with a deterministic enumeration order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistinguisherFamily {
    key: String,
    members: Vec<Distinguisher>,
    enumeration: Enumeration,
    data_dependent: bool,
}

impl DistinguisherFamily {
    pub fn explicit(key: impl Into<String>, members: Vec<Distinguisher>) -> Result<Self> {
        Self::build(key.into(), members, Enumeration::Explicit)
    }

    pub fn grid(key: impl Into<String>, members: Vec<Distinguisher>) -> Result<Self> {
        Self::build(key.into(), members, Enumeration::Grid)
    }

    fn build(key: String, members: Vec<Distinguisher>, enumeration: Enumeration) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyFamily(key));
        }
        Ok(DistinguisherFamily {
            key,
            members,
            enumeration,
            data_dependent: false,
        })
    }

    /// Mark the family as constructed from the very sets it will compare.
    pub fn data_dependent(mut self) -> Self {
        self.data_dependent = true;
        self
    }

    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn members(&self) -> &[Distinguisher] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn enumeration(&self) -> Enumeration {
        self.enumeration
    }

    pub fn is_data_dependent(&self) -> bool {
        self.data_dependent
    }

    /// Concatenate families, preserving each one's order. Keys are joined
    /// with `+`.
    pub fn union(families: Vec<DistinguisherFamily>) -> Result<Self> {
        let key = families
            .iter()
            .map(|f| f.key.as_str())
            .collect::<Vec<_>>()
            .join("+");
        let enumeration = if families.iter().any(|f| f.enumeration == Enumeration::Grid) {
            Enumeration::Grid
        } else {
            Enumeration::Explicit
        };
        let data_dependent = families.iter().any(|f| f.data_dependent);
        let members = families.into_iter().flat_map(|f| f.members).collect();
        let mut family = Self::build(key, members, enumeration)?;
        family.data_dependent = data_dependent;
        Ok(family)
    }

    /// First `n` members in enumeration order, as a family of its own.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        let mut family = Self::build(
            format!("{}[..{n}]", self.key),
            self.members.iter().take(n).cloned().collect(),
            self.enumeration,
        )?;
        family.data_dependent = self.data_dependent;
        Ok(family)
    }

    pub(crate) fn map_members(
        &self,
        key: String,
        f: impl FnMut(&Distinguisher) -> Distinguisher,
    ) -> Self {
        DistinguisherFamily {
            key,
            members: self.members.iter().map(f).collect(),
            enumeration: self.enumeration,
            data_dependent: self.data_dependent,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distinguishers::features::FeatureExtractor;

    #[test]
    fn exact_match_values() {
        let f = Distinguisher::exact_match(Payload::Text("abc".into()));
        assert_eq!(f.evaluate(&Sample::text("a", "abc")).unwrap(), 1.0);
        assert_eq!(f.evaluate(&Sample::text("b", "abd")).unwrap(), 0.0);
        assert!(matches!(
            f.evaluate(&Sample::symbols("c", vec![1])),
            Err(Error::CodecMismatch { .. })
        ));
    }

    #[test]
    fn threshold_below_is_zero() {
        let f = Distinguisher::threshold(FeatureExtractor::named("v"), 0.5, Polarity::Geq);
        let x = Sample::text("x", "").with_feature("v", 0.4).unwrap();
        assert_eq!(f.evaluate(&x).unwrap(), 0.0);
        let y = Sample::text("y", "").with_feature("v", 0.5).unwrap();
        assert_eq!(f.evaluate(&y).unwrap(), 1.0);
        let leq = Distinguisher::threshold(FeatureExtractor::named("v"), 0.5, Polarity::Leq);
        assert_eq!(leq.evaluate(&x).unwrap(), 1.0);
    }

    #[test]
    fn reward_out_of_range_is_an_error_not_clamped() {
        let f = Distinguisher::new("r", Params::Reward { env_id: "e".into() });
        let ok = Sample::symbols("t", vec![0]).with_feature(NORMALIZED_RETURN, 0.5).unwrap();
        assert_eq!(f.evaluate(&ok).unwrap(), 0.5);
        let bad = Sample::symbols("t", vec![0]).with_feature(NORMALIZED_RETURN, 1.5).unwrap();
        assert!(matches!(f.evaluate(&bad), Err(Error::OutOfUnitInterval { .. })));
    }

    #[test]
    fn empty_family_rejected() {
        assert!(matches!(
            DistinguisherFamily::explicit("none", vec![]),
            Err(Error::EmptyFamily(_))
        ));
    }
}
