//! Config-driven runs: load sample files, compose the pieces, and produce
//! reports with a reproducibility manifest.

pub mod config;
pub mod data;
pub mod manifest;
pub mod report;

pub use config::{
    resolve_seed, BootstrapSettings, EvalConfig, InputPaths, OutputPaths, ResolutionSettings, SuiteSettings, SEED_ENV,
};
pub use data::{load_sample_set, write_sample_set};
pub use manifest::{digest_file, sha256_hex, InputDigest, RunManifest, TOOL_VERSION};
pub use report::{render_report, render_suite_report, rerender, Format, Report, SuiteReport, CAVEAT_MARKER};

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::delta::{delta, verdict};
use crate::error::{Error, Result};
use crate::generalization::generators::Generator;
use crate::generalization::holdout::{holdout_eval, HoldoutConfig};
use crate::generalization::suite::CategorySuite;
use crate::resolution::{bootstrap_delta_ci, estimate_resolution, ResolutionEstimate};
use crate::sample::Role;
use crate::seeds::derive_seed;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

/// Process exit status for an error: 2 for usage, config and missing
/// files, 3 for anything wrong with the data itself.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } | Error::Config(_) | Error::InvalidArgument(_) | Error::Json(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn require(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
        ))
    }
}

/// Named sub-seeds of a run, all derived from the base seed.
pub fn run_seeds(base: u64) -> BTreeMap<String, u64> {
    BTreeMap::from([
        ("base".to_string(), base),
        ("resolution".to_string(), derive_seed(base, 1)),
        ("bootstrap".to_string(), derive_seed(base, 2)),
        ("suite".to_string(), derive_seed(base, 3)),
    ])
}

pub fn run_eval(config: &EvalConfig, original: &Path, generated: &Path) -> Result<Report> {
    require(original)?;
    require(generated)?;
    config.validate()?;
    let config = config.resolved()?;
    let seeds = run_seeds(config.seed.unwrap_or_default());
    let s = load_sample_set(original, Role::Original)?;
    let g = load_sample_set(generated, Role::Generated)?;

    let prepared = config.family.instantiate(&s, &g)?;
    let report = delta(&prepared.original, &prepared.generated, &prepared.family, &config.sigma)?;
    let resolution = match &config.resolution {
        Some(r) => Some(estimate_resolution(
            &prepared.original,
            &prepared.family,
            &config.sigma,
            r.n_splits,
            seeds["resolution"],
        )?),
        None => None,
    };
    let bootstrap = match &config.bootstrap {
        Some(b) => Some(bootstrap_delta_ci(
            &prepared.original,
            &prepared.generated,
            &prepared.family,
            &config.sigma,
            b.n_boot,
            b.level,
            seeds["bootstrap"],
        )?),
        None => None,
    };
    let verdict = verdict(&report, config.epsilon, resolution.as_ref());
    let manifest = RunManifest::new(&config, seeds, &[original, generated])?;
    Ok(Report {
        manifest: Some(manifest),
        delta: report,
        verdict,
        resolution,
        bootstrap,
        classifier_accuracy: prepared.classifier_accuracy,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    pub manifest: RunManifest,
    pub family_key: String,
    pub estimate: ResolutionEstimate,
}

/// Resolution floor of the configured family on one set.
pub fn run_resolution(config: &EvalConfig, set: &Path) -> Result<ResolutionReport> {
    require(set)?;
    config.validate()?;
    let config = config.resolved()?;
    let seeds = run_seeds(config.seed.unwrap_or_default());
    let s = load_sample_set(set, Role::Original)?;
    let prepared = config.family.instantiate(&s, &s)?;
    let n_splits = config.resolution.unwrap_or_default().n_splits;
    let estimate = estimate_resolution(&prepared.original, &prepared.family, &config.sigma, n_splits, seeds["resolution"])?;
    Ok(ResolutionReport {
        manifest: RunManifest::new(&config, seeds, &[set])?,
        family_key: prepared.family.key().to_string(),
        estimate,
    })
}

pub fn run_suite(config: &EvalConfig, suite_path: &Path, generator: &dyn Generator) -> Result<SuiteReport> {
    require(suite_path)?;
    config.validate()?;
    let config = config.resolved()?;
    let settings = config
        .suite
        .ok_or_else(|| Error::Config("config has no `suite` section".into()))?;
    let seeds = run_seeds(config.seed.unwrap_or_default());
    let suite = CategorySuite::load(suite_path)?;
    let holdout = HoldoutConfig {
        k_shot: settings.k_shot,
        m_gen: settings.m_gen,
        m_ref: settings.m_ref,
        family: config.family.clone(),
        sigma: config.sigma,
        epsilon: config.epsilon,
        seed: seeds["suite"],
    };
    let table = holdout_eval(generator, &suite, &holdout)?;
    Ok(SuiteReport {
        manifest: Some(RunManifest::new(&config, seeds, &[suite_path])?),
        table,
    })
}

/// Write the JSON and/or Markdown renderings wherever the config asks.
pub fn write_outputs(report: &Report, output: &OutputPaths) -> Result<()> {
    if let Some(p) = &output.json {
        std::fs::write(p, render_report(report, Format::Json)?).map_err(|e| Error::io(p, e))?;
    }
    if let Some(p) = &output.markdown {
        std::fs::write(p, render_report(report, Format::Markdown)?).map_err(|e| Error::io(p, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::SampleSet;

    fn write(dir: &Path, name: &str, values: &[f64], role: Role) -> std::path::PathBuf {
        let path = dir.join(name);
        write_sample_set(&path, &SampleSet::from_feature_values("v", values, role).unwrap()).unwrap();
        path
    }

    fn config(eps: f64) -> EvalConfig {
        EvalConfig::from_json(&format!(
            r#"{{"family":{{"kind":"threshold","feature":{{"name":"v","source":{{"kind":"named","feature":"v"}}}},
            "thresholds":"midpoints"}},"epsilon":{eps},"seed":5,"resolution":{{"n_splits":10}},
            "bootstrap":{{"n_boot":200}}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn disjoint_sets_fail() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(dir.path(), "s.jsonl", &[0.1, 0.2, 0.3], Role::Original);
        let g = write(dir.path(), "g.jsonl", &[0.7, 0.8, 0.9], Role::Generated);
        let r = run_eval(&config(0.5), &s, &g).unwrap();
        assert_eq!(r.delta.delta, 1.0);
        assert!(!r.verdict.pass);
        let same = run_eval(&config(0.5), &s, &s).unwrap();
        assert_eq!(same.delta.delta, 0.0);
        assert!(same.verdict.pass);
    }

    #[test]
    fn missing_file_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(dir.path(), "s.jsonl", &[0.1], Role::Original);
        let err = run_eval(&config(0.5), &s, &dir.path().join("nope.jsonl")).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_USAGE);
    }

    #[test]
    fn rendering_contracts() {
        let dir = tempfile::tempdir().unwrap();
        let s = write(dir.path(), "s.jsonl", &[0.1, 0.2, 0.3, 0.4], Role::Original);
        let g = write(dir.path(), "g.jsonl", &[0.15, 0.35, 0.8], Role::Generated);
        let r = run_eval(&config(0.01), &s, &g).unwrap();
        assert!(r.verdict.resolution_caveat);
        let md = render_report(&r, Format::Markdown).unwrap();
        assert!(md.contains(CAVEAT_MARKER));

        let json = render_report(&r, Format::Json).unwrap();
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);

        let table: Vec<f64> = md
            .lines()
            .skip_while(|l| !l.starts_with("## Per-member"))
            .filter(|l| l.starts_with("| `"))
            .map(|l| l.rsplit('|').nth(1).unwrap().trim().parse().unwrap())
            .collect();
        assert_eq!(table.len(), r.delta.per_member_gaps.len());
        assert!(table.windows(2).all(|w| w[0] >= w[1]));

        let mut bare = r.clone();
        bare.manifest = None;
        assert!(matches!(render_report(&bare, Format::Json), Err(Error::MissingManifest)));
    }

    #[test]
    fn no_caveat_when_floor_is_small() {
        let dir = tempfile::tempdir().unwrap();
        let v: Vec<f64> = (0..20).map(|i| i as f64 / 20.0).collect();
        let s = write(dir.path(), "s.jsonl", &v, Role::Original);
        let r = run_eval(&config(1.0), &s, &s).unwrap();
        assert!(!r.verdict.resolution_caveat);
        assert!(!render_report(&r, Format::Markdown).unwrap().contains(CAVEAT_MARKER));
    }
}
