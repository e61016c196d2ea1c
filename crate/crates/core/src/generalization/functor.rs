//! Bijective payload re-encodings and transport of families along them.

use serde::{Deserialize, Serialize};

use crate::delta::delta;
use crate::distinguisher::{Distinguisher, DistinguisherFamily, Params};
use crate::error::{Error, Result};
use crate::sample::{Codec, Payload, Role, Sample, SampleSet};
use crate::scoring::ScoringFunction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctorMap {
    Identity,
    /// Symbol `s` becomes `perm[s]`; `perm` is a permutation of `0..n`.
    SymbolPermutation { perm: Vec<u32> },
    /// Scalar `x` becomes `scale * x + offset`, `scale ≠ 0`.
    ScalarAffine { scale: f64, offset: f64 },
}

impl FunctorMap {
    pub fn symbol_permutation(perm: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            match seen.get_mut(p as usize) {
                Some(slot) if !*slot => *slot = true,
                _ => return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation"))),
            }
        }
        Ok(FunctorMap::SymbolPermutation { perm })
    }

    pub fn scalar_affine(scale: f64, offset: f64) -> Result<Self> {
        if scale == 0.0 || !scale.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidArgument(format!("affine map {scale}·x + {offset} is not invertible")));
        }
        Ok(FunctorMap::ScalarAffine { scale, offset })
    }

    pub fn key(&self) -> String {
        match self {
            FunctorMap::Identity => "identity".into(),
            FunctorMap::SymbolPermutation { perm } => {
                let p: Vec<String> = perm.iter().map(u32::to_string).collect();
                format!("perm[{}]", p.join(","))
            }
            FunctorMap::ScalarAffine { scale, offset } => format!("affine[{scale:?}x+{offset:?}]"),
        }
    }

    pub fn inverse(&self) -> FunctorMap {
        match self {
            FunctorMap::Identity => FunctorMap::Identity,
            FunctorMap::SymbolPermutation { perm } => {
                let mut inv = vec![0; perm.len()];
                for (i, &p) in perm.iter().enumerate() {
                    inv[p as usize] = i as u32;
                }
                FunctorMap::SymbolPermutation { perm: inv }
            }
            FunctorMap::ScalarAffine { scale, offset } => FunctorMap::ScalarAffine {
                scale: 1.0 / scale,
                offset: -offset / scale,
            },
        }
    }

    fn mismatch(&self, codec: Codec) -> Error {
        Error::CodecMismatch {
            distinguisher: format!("functor:{}", self.key()),
            codec,
        }
    }

    pub fn map_payload(&self, payload: &Payload) -> Result<Payload> {
        match (self, payload) {
            (FunctorMap::Identity, p) => Ok(p.clone()),
            (FunctorMap::SymbolPermutation { perm }, Payload::Symbols(s)) => s
                .iter()
                .map(|&x| {
                    perm.get(x as usize).copied().ok_or(Error::OutOfAlphabet {
                        symbol: x,
                        alphabet: perm.len() as u32,
                    })
                })
                .collect::<Result<_>>()
                .map(Payload::Symbols),
            (FunctorMap::ScalarAffine { scale, offset }, Payload::Scalar(x)) => {
                let y = scale * x + offset;
                if !y.is_finite() {
                    return Err(Error::InvalidArgument(format!("affine image of {x} is not finite")));
                }
                Ok(Payload::Scalar(y))
            }
            (_, p) => Err(self.mismatch(p.codec())),
        }
    }

    /// Image of one sample: same id, features and label, mapped payload.
    pub fn forward(&self, x: &Sample) -> Result<Sample> {
        Ok(x.with_payload(x.id(), self.map_payload(x.payload())?))
    }

    pub fn forward_set(&self, set: &SampleSet) -> Result<SampleSet> {
        let items = set.items().iter().map(|x| self.forward(x)).collect::<Result<Vec<_>>>()?;
        let mut out = SampleSet::new(items, set.role())?;
        if let Some(l) = set.label() {
            out = out.with_label(l);
        }
        Ok(out)
    }
}

/// `f′(x) = f(forward(x))` for every member, keys suffixed with the functor
/// key.
pub fn transport_family(family: &DistinguisherFamily, functor: &FunctorMap) -> DistinguisherFamily {
    let fk = functor.key();
    family.map_members(format!("{}∘{fk}", family.key()), |member| {
        Distinguisher::new(
            format!("{}∘{fk}", member.key()),
            Params::Transported {
                inner: Box::new(member.clone()),
                functor: functor.clone(),
            },
        )
    })
}

/// Whether scoring the transported family on B-samples gives exactly the
/// same delta as scoring the original family on their images.
pub fn transport_invariance_check(
    original_b: &SampleSet,
    generated_b: &SampleSet,
    family_a: &DistinguisherFamily,
    functor: &FunctorMap,
    sigma: &ScoringFunction,
) -> Result<bool> {
    let image_s = functor.forward_set(original_b)?;
    let image_g = functor.forward_set(generated_b)?;
    let transported = delta(original_b, generated_b, &transport_family(family_a, functor), sigma)?;
    let direct = delta(&image_s, &image_g, family_a, sigma)?;
    let same_gaps = transported
        .per_member_gaps
        .iter()
        .zip(&direct.per_member_gaps)
        .all(|(a, b)| a.gap.to_bits() == b.gap.to_bits());
    Ok(transported.delta.to_bits() == direct.delta.to_bits() && same_gaps)
}

/// Preimage of an A-domain set under the functor, as a B-domain set.
pub fn pull_back(set: &SampleSet, functor: &FunctorMap, role: Role) -> Result<SampleSet> {
    let inv = functor.inverse();
    let items = set.items().iter().map(|x| inv.forward(x)).collect::<Result<Vec<_>>>()?;
    SampleSet::new(items, role)
}
