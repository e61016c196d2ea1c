use std::borrow::Cow;

use serde::{Deserialize, Serialize};

use crate::distinguisher::DistinguisherFamily;
use crate::distinguishers::classifier::{train_classifier_distinguisher, ClassifierSpec, TrainedClassifier};
use crate::distinguishers::make_compression_distinguisher;
use crate::distinguishers::threshold::{make_threshold_family, ThresholdFamilySpec};
use crate::error::{Error, Result};
use crate::sample::SampleSet;

/// Declarative description of a family, instantiated against a pair of
/// sets (midpoint thresholds and classifiers depend on the data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilySpec {
    Threshold(ThresholdFamilySpec),
    Compression,
    Classifier(ClassifierSpec),
    Union { members: Vec<FamilySpec> },
}

/// A family together with the sets it should be scored on. When a
/// classifier is involved those are its held-out splits, for every member.
#[derive(Debug, Clone)]
pub struct Prepared<'a> {
    pub family: DistinguisherFamily,
    pub original: Cow<'a, SampleSet>,
    pub generated: Cow<'a, SampleSet>,
    /// Balanced held-out accuracy of the classifier member, if any.
    pub classifier_accuracy: Option<f64>,
}

impl FamilySpec {
    fn classifiers(&self) -> Vec<&ClassifierSpec> {
        match self {
            FamilySpec::Classifier(c) => vec![c],
            FamilySpec::Union { members } => members.iter().flat_map(|m| m.classifiers()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classifiers().len() > 1 {
            return Err(Error::Config("at most one classifier per family".into()));
        }
        if let FamilySpec::Union { members } = self {
            if members.is_empty() {
                return Err(Error::Config("union family has no members".into()));
            }
        }
        Ok(())
    }

    pub fn instantiate<'a>(&self, original: &'a SampleSet, generated: &'a SampleSet) -> Result<Prepared<'a>> {
        self.validate()?;
        let trained = match self.classifiers().first() {
            Some(spec) => Some(train_classifier_distinguisher(original, generated, spec)?),
            None => None,
        };
        let (original, generated) = match &trained {
            Some(t) => (Cow::Owned(t.heldout_original.clone()), Cow::Owned(t.heldout_generated.clone())),
            None => (Cow::Borrowed(original), Cow::Borrowed(generated)),
        };
        let family = self.build(&original, &generated, trained.as_ref())?;
        Ok(Prepared {
            family,
            original,
            generated,
            classifier_accuracy: trained.map(|t| t.heldout_advantage),
        })
    }

    fn build(
        &self,
        original: &SampleSet,
        generated: &SampleSet,
        trained: Option<&TrainedClassifier>,
    ) -> Result<DistinguisherFamily> {
        match self {
            FamilySpec::Threshold(spec) => make_threshold_family(spec, original, generated),
            FamilySpec::Compression => {
                DistinguisherFamily::explicit("compression", vec![make_compression_distinguisher()])
            }
            FamilySpec::Classifier(_) => {
                let t = trained.expect("classifier trained before build");
                DistinguisherFamily::explicit(t.distinguisher.key().to_string(), vec![t.distinguisher.clone()])
            }
            FamilySpec::Union { members } => DistinguisherFamily::union(
                members
                    .iter()
                    .map(|m| m.build(original, generated, trained))
                    .collect::<Result<_>>()?,
            ),
        }
    }
}
