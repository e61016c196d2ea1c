//! JSONL sample-set files: one sample object per line.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sample::{Role, Sample, SampleSet};

/// Read and validate a sample set. Blank lines are skipped; errors carry
/// the 1-based line number.
pub fn load_sample_set(path: &Path, role: Role) -> Result<SampleSet> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut items = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let sample: Sample = serde_json::from_str(line).map_err(|e| Error::data(path, line_no, e.to_string()))?;
        if !seen.insert(sample.id().to_string()) {
            return Err(Error::data(path, line_no, format!("duplicate sample id `{}`", sample.id())));
        }
        items.push(sample);
    }
    if items.is_empty() {
        return Err(Error::data(path, 0, "file contains no samples"));
    }
    SampleSet::new(items, role)
}

pub fn write_sample_set(path: &Path, set: &SampleSet) -> Result<()> {
    let mut out = Vec::new();
    for x in set.items() {
        serde_json::to_writer(&mut out, x)?;
        out.push(b'\n');
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&out).map_err(|e| Error::io(path, e))
}
