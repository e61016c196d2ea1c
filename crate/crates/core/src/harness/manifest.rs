use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL_VERSION: &str = concat!("catfid ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Everything needed to reproduce a report. Two runs whose manifests agree
/// outside `timestamp` produce identical reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub tool_version: String,
    /// UTC, RFC 3339.
    pub timestamp: String,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<InputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> Result<InputDigest> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    })
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

impl RunManifest {
    /// `config` is hashed through its canonical JSON form.
    pub fn new<C: Serialize>(config: &C, seeds: BTreeMap<String, u64>, inputs: &[&Path]) -> Result<Self> {
        let canonical = serde_json::to_vec(config)?;
        Ok(RunManifest {
            config_digest: format!("sha256:{}", sha256_hex(&canonical)),
            tool_version: TOOL_VERSION.to_string(),
            timestamp: now_rfc3339(),
            seeds,
            inputs: inputs.iter().map(|p| digest_file(p)).collect::<Result<_>>()?,
        })
    }
}
