use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::delta::Epsilon;
use crate::distinguishers::spec::FamilySpec;
use crate::error::{Error, Result};
use crate::scoring::ScoringFunction;

pub const SEED_ENV: &str = "CATFID_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionSettings {
    #[serde(default = "default_splits")]
    pub n_splits: usize,
}

fn default_splits() -> usize {
    20
}

impl Default for ResolutionSettings {
    fn default() -> Self {
        ResolutionSettings {
            n_splits: default_splits(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSettings {
    #[serde(default = "default_boot")]
    pub n_boot: usize,
    #[serde(default = "default_level")]
    pub level: f64,
}

fn default_boot() -> usize {
    1000
}
fn default_level() -> f64 {
    0.95
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    #[serde(default)]
    pub original: Option<PathBuf>,
    #[serde(default)]
    pub generated: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default)]
    pub json: Option<PathBuf>,
    #[serde(default)]
    pub markdown: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSettings {
    pub k_shot: usize,
    pub m_gen: usize,
    #[serde(default)]
    pub m_ref: Option<usize>,
}

/// One evaluation run. Unknown keys are rejected at every level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub family: FamilySpec,
    #[serde(default = "default_sigma")]
    pub sigma: ScoringFunction,
    pub epsilon: Epsilon,
    /// Falls back to `CATFID_SEED`, then 0.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub resolution: Option<ResolutionSettings>,
    #[serde(default)]
    pub bootstrap: Option<BootstrapSettings>,
    #[serde(default)]
    pub inputs: InputPaths,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub suite: Option<SuiteSettings>,
}

fn default_sigma() -> ScoringFunction {
    ScoringFunction::Mean
}

impl EvalConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: EvalConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.sigma.validate().map_err(|e| Error::Config(e.to_string()))?;
        self.family.validate()?;
        if let Some(r) = &self.resolution {
            if r.n_splits == 0 {
                return Err(Error::Config("resolution.n_splits must be at least 1".into()));
            }
        }
        if let Some(b) = &self.bootstrap {
            if b.n_boot < 100 || !(b.level > 0.0 && b.level < 1.0) {
                return Err(Error::Config("bootstrap needs n_boot ≥ 100 and level in (0, 1)".into()));
            }
        }
        if let Some(s) = &self.suite {
            if s.k_shot == 0 || s.m_gen == 0 {
                return Err(Error::Config("suite.k_shot and suite.m_gen must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// The config with `seed` resolved, as recorded in manifests.
    pub fn resolved(&self) -> Result<Self> {
        let mut c = self.clone();
        c.seed = Some(resolve_seed(self.seed)?);
        Ok(c)
    }
}

pub fn resolve_seed(explicit: Option<u64>) -> Result<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}
