use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::delta::{DeltaReport, Verdict};
use crate::error::{Error, Result};
use crate::generalization::holdout::HoldoutTable;
use crate::harness::manifest::RunManifest;
use crate::resolution::{BootstrapInterval, ResolutionEstimate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub manifest: Option<RunManifest>,
    pub delta: DeltaReport,
    pub verdict: Verdict,
    pub resolution: Option<ResolutionEstimate>,
    pub bootstrap: Option<BootstrapInterval>,
    /// Balanced held-out accuracy when the family includes a classifier.
    pub classifier_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub manifest: Option<RunManifest>,
    pub table: HoldoutTable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Markdown),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

pub const CAVEAT_MARKER: &str = "resolution floor";

fn pretty_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn manifest_section(out: &mut String, m: &RunManifest) {
    let _ = writeln!(out, "## Run manifest\n");
    let _ = writeln!(out, "- tool: {}", m.tool_version);
    let _ = writeln!(out, "- config: `{}`", m.config_digest);
    let _ = writeln!(out, "- timestamp: {}", m.timestamp);
    for (name, seed) in &m.seeds {
        let _ = writeln!(out, "- seed `{name}`: {seed}");
    }
    for input in &m.inputs {
        let _ = writeln!(out, "- input `{}`: sha256 `{}`", input.path, input.sha256);
    }
}

pub fn render_report(report: &Report, format: Format) -> Result<String> {
    let manifest = report.manifest.as_ref().ok_or(Error::MissingManifest)?;
    if format == Format::Json {
        return pretty_json(report);
    }
    let d = &report.delta;
    let v = &report.verdict;
    let mut out = String::new();
    let _ = writeln!(out, "# Evaluation report\n");
    let _ = writeln!(out, "| quantity | value |\n|---|---|");
    let bound = if d.lower_bound { " (lower bound)" } else { "" };
    let _ = writeln!(out, "| delta | {}{bound} |", d.delta);
    let _ = writeln!(out, "| argmax distinguisher | `{}` |", d.argmax_key);
    let _ = writeln!(out, "| epsilon | {} |", v.epsilon);
    match &report.resolution {
        Some(r) => {
            let _ = writeln!(out, "| ε_f (mean / max) | {} / {} |", r.epsilon_f_mean, r.epsilon_f_max);
        }
        None => {
            let _ = writeln!(out, "| ε_f | not estimated |");
        }
    }
    if let Some(b) = &report.bootstrap {
        let _ = writeln!(out, "| {}% bootstrap interval | [{}, {}] |", b.level * 100.0, b.lo, b.hi);
    }
    if let Some(acc) = report.classifier_accuracy {
        let _ = writeln!(out, "| classifier held-out accuracy | {acc} |");
    }
    let _ = writeln!(out, "| σ | {} |", d.sigma);
    let _ = writeln!(out, "| sizes (original / generated) | {} / {} |", d.sizes.original, d.sizes.generated);
    let _ = writeln!(out, "| verdict | **{}** |\n", if v.pass { "PASS" } else { "FAIL" });
    if v.resolution_caveat {
        let floor = v.resolution_floor.unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "> Caveat: the {CAVEAT_MARKER} ε_f = {floor} is not below ε = {}. \
             Gaps this small are within the family's own sampling noise, so the verdict says little.\n",
            v.epsilon
        );
    }
    if d.data_dependent {
        let _ = writeln!(out, "Family `{}` was built from the two sets it compares.\n", d.family_key);
    }
    let _ = writeln!(out, "## Per-member gaps\n\n| distinguisher | gap |\n|---|---|");
    let mut gaps: Vec<_> = d.per_member_gaps.iter().collect();
    gaps.sort_by(|a, b| b.gap.total_cmp(&a.gap));
    for g in gaps {
        let _ = writeln!(out, "| `{}` | {} |", g.key, g.gap);
    }
    out.push('\n');
    manifest_section(&mut out, manifest);
    Ok(out)
}

pub fn render_suite_report(report: &SuiteReport, format: Format) -> Result<String> {
    let manifest = report.manifest.as_ref().ok_or(Error::MissingManifest)?;
    if format == Format::Json {
        return pretty_json(report);
    }
    let t = &report.table;
    let mut out = String::new();
    let _ = writeln!(out, "# Holdout evaluation: `{}` on suite `{}`\n", t.generator, t.suite);
    let _ = writeln!(out, "| category | delta | epsilon | verdict |\n|---|---|---|---|");
    for row in &t.rows {
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            row.category,
            row.report.delta,
            row.verdict.epsilon,
            if row.verdict.pass { "PASS" } else { "FAIL" }
        );
    }
    let s = &t.summary;
    let _ = writeln!(
        out,
        "\nmean delta {}, max delta {}, {} of {} categories pass.\n",
        s.mean_delta, s.max_delta, s.passed, s.total
    );
    manifest_section(&mut out, manifest);
    Ok(out)
}

/// Parse a JSON report and re-render it.
pub fn rerender(json: &str, format: Format) -> Result<String> {
    let value: serde_json::Value = serde_json::from_str(json)?;
    if value.get("table").is_some() {
        render_suite_report(&serde_json::from_value(value)?, format)
    } else {
        render_report(&serde_json::from_value(value)?, format)
    }
}
