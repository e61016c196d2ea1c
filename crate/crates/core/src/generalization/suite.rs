use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distinguishers::features::{FeatureExtractor, FeatureSource, Normalizer};
use crate::distinguishers::spec::FamilySpec;
use crate::distinguishers::threshold::ThresholdFamilySpec;
use crate::error::{Error, Result};
use crate::generalization::category::{CategorySpec, Shape};

/// Categories plus a train/holdout split. Indices are 0-based positions in
/// `specs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategorySuite {
    pub name: String,
    pub specs: Vec<CategorySpec>,
    pub train: Vec<usize>,
    pub holdout: Vec<usize>,
}

impl CategorySuite {
    pub fn new(name: &str, specs: Vec<CategorySpec>, train: Vec<usize>, holdout: Vec<usize>) -> Result<Self> {
        let suite = CategorySuite {
            name: name.into(),
            specs,
            train,
            holdout,
        };
        suite.validate()?;
        Ok(suite)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.specs.len();
        if m < 2 {
            return Err(Error::Config(format!("suite `{}` needs at least 2 categories", self.name)));
        }
        if self.holdout.is_empty() {
            return Err(Error::EmptyHoldout);
        }
        let mut seen = BTreeSet::new();
        for &i in self.train.iter().chain(&self.holdout) {
            if i >= m {
                return Err(Error::Config(format!("suite `{}`: index {i} out of range", self.name)));
            }
            if !seen.insert(i) {
                return Err(Error::Config(format!("suite `{}`: index {i} listed twice", self.name)));
            }
        }
        if seen.len() != m {
            return Err(Error::Config(format!(
                "suite `{}`: train and holdout do not cover every category",
                self.name
            )));
        }
        let mut labels = BTreeSet::new();
        for spec in &self.specs {
            spec.validate()?;
            if !labels.insert(spec.label.as_str()) {
                return Err(Error::Config(format!("suite `{}`: duplicate label `{}`", self.name, spec.label)));
            }
        }
        Ok(())
    }

    pub fn holdout_specs(&self) -> impl Iterator<Item = (usize, &CategorySpec)> {
        self.holdout.iter().map(|&i| (i, &self.specs[i]))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let suite: CategorySuite =
            serde_json::from_str(&text).map_err(|e| Error::data(path, e.line(), e.to_string()))?;
        suite.validate()?;
        Ok(suite)
    }
}

/// Arithmetic-sequence categories over a 26-symbol alphabet.
pub fn sequence_suite() -> CategorySuite {
    let spec = |label: &str, template: &str| CategorySpec::ctest(label, template, (0, 25), 26, 6);
    CategorySuite::new(
        "sequences",
        vec![
            spec("step-1", "S?;A1"),
            spec("step-2", "S?;A2"),
            spec("down-1", "S?;D1"),
            spec("step-3", "S?;A3"),
            spec("double", "S?;M2"),
            spec("step-any", "S?;A?"),
            spec("zigzag", "S?;A2;D1"),
        ],
        vec![0, 1, 2],
        vec![3, 4, 5, 6],
    )
    .expect("shipped suite is valid")
}

/// Location/scale families on the real line.
pub fn numeric_suite() -> CategorySuite {
    CategorySuite::new(
        "numeric",
        vec![
            CategorySpec::numeric("normal-low", Shape::Normal, 0.2, 0.05),
            CategorySpec::numeric("uniform-mid", Shape::Uniform, 0.4, 0.2),
            CategorySpec::numeric("normal-high", Shape::Normal, 0.8, 0.05),
            CategorySpec::numeric("normal-wide", Shape::Normal, 0.5, 0.2),
            CategorySpec::numeric("uniform-low", Shape::Uniform, 0.0, 0.1),
            CategorySpec::numeric("normal-far", Shape::Normal, 1.2, 0.1),
        ],
        vec![0, 1, 2],
        vec![3, 4, 5],
    )
    .expect("shipped suite is valid")
}

pub fn builtin_suites() -> Vec<CategorySuite> {
    vec![sequence_suite(), numeric_suite()]
}

/// Threshold family suited to a suite's payloads: mean symbol value for
/// sequences, the scalar itself for numeric categories.
pub fn default_family_for(suite: &CategorySuite) -> FamilySpec {
    use crate::generalization::category::CategoryGenerator;
    let feature = match &suite.specs[0].generator {
        CategoryGenerator::Ctest { alphabet, .. } => FeatureExtractor::new(
            "mean-symbol",
            FeatureSource::MeanSymbolValue,
            Normalizer::new(0.0, (*alphabet - 1) as f64).expect("alphabet ≥ 2"),
        ),
        CategoryGenerator::Numeric { .. } => FeatureExtractor::new(
            "value",
            FeatureSource::ScalarIdentity,
            Normalizer::new(-1.0, 2.0).expect("ordered bounds"),
        ),
    };
    FamilySpec::Threshold(ThresholdFamilySpec::midpoints(feature))
}
