//! k-shot evaluation of a generator on held-out categories.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::delta::{delta, verdict, DeltaReport, Epsilon, Verdict};
use crate::distinguishers::spec::FamilySpec;
use crate::error::{Error, Result};
use crate::generalization::category::sample_category;
use crate::generalization::generators::{GenerationRequest, Generator};
use crate::generalization::suite::CategorySuite;
use crate::sample::{Role, SampleSet};
use crate::scoring::ScoringFunction;
use crate::seeds::derive_seed;

pub const MIN_REFERENCE_SIZE: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoldoutConfig {
    pub k_shot: usize,
    pub m_gen: usize,
    /// Defaults to `max(m_gen, 20)`.
    #[serde(default)]
    pub m_ref: Option<usize>,
    pub family: FamilySpec,
    pub sigma: ScoringFunction,
    pub epsilon: Epsilon,
    pub seed: u64,
}

impl HoldoutConfig {
    pub fn reference_size(&self) -> usize {
        self.m_ref.unwrap_or(self.m_gen.max(MIN_REFERENCE_SIZE))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutRow {
    pub category: String,
    pub index: usize,
    pub report: DeltaReport,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoldoutSummary {
    pub mean_delta: f64,
    pub max_delta: f64,
    pub passed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutTable {
    pub suite: String,
    pub generator: String,
    pub rows: Vec<HoldoutRow>,
    pub summary: HoldoutSummary,
}

/// The k-shot set handed to the generator: fresh ids, no labels.
fn blind(shots: &SampleSet) -> Result<SampleSet> {
    let items = shots
        .items()
        .iter()
        .enumerate()
        .map(|(i, x)| x.without_label().with_payload(format!("shot-{i}"), x.payload().clone()))
        .collect();
    SampleSet::new(items, Role::Original)
}

/// Category `c` uses `derive_seed(seed, c)` split into three streams: 0 for
/// the shots, 1 for the reference set, 2 for the generator.
pub fn holdout_eval(generator: &dyn Generator, suite: &CategorySuite, config: &HoldoutConfig) -> Result<HoldoutTable> {
    suite.validate()?;
    if config.k_shot == 0 || config.m_gen == 0 {
        return Err(Error::InvalidArgument("k_shot and m_gen must be at least 1".into()));
    }
    config.sigma.validate()?;
    config.family.validate()?;
    let m_ref = config.reference_size();
    let categories: Vec<_> = suite.holdout_specs().collect();
    let rows = categories
        .par_iter()
        .map(|&(index, spec)| {
            let base = derive_seed(config.seed, index as u64);
            let shots = blind(&sample_category(spec, config.k_shot, derive_seed(base, 0))?)?;
            let reference = sample_category(spec, m_ref, derive_seed(base, 1))?;
            let generated = generator.generate(&GenerationRequest {
                shots: &shots,
                count: config.m_gen,
                seed: derive_seed(base, 2),
            })?;
            if generated.len() != config.m_gen {
                return Err(Error::InvalidArgument(format!(
                    "generator `{}` returned {} samples, expected {}",
                    generator.key(),
                    generated.len(),
                    config.m_gen
                )));
            }
            let prepared = config.family.instantiate(&reference, &generated)?;
            let report = delta(&prepared.original, &prepared.generated, &prepared.family, &config.sigma)?;
            let verdict = verdict(&report, config.epsilon, None);
            Ok(HoldoutRow {
                category: spec.label.clone(),
                index,
                report,
                verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let deltas: Vec<f64> = rows.iter().map(|r| r.report.delta).collect();
    let summary = HoldoutSummary {
        mean_delta: deltas.iter().sum::<f64>() / deltas.len() as f64,
        max_delta: deltas.iter().copied().fold(0.0, f64::max),
        passed: rows.iter().filter(|r| r.verdict.pass).count(),
        total: rows.len(),
    };
    Ok(HoldoutTable {
        suite: suite.name.clone(),
        generator: generator.key(),
        rows,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generalization::category::CategorySpec;
    use crate::generalization::generators::ConstantGenerator;
    use crate::generalization::suite::{default_family_for, sequence_suite};
    use std::sync::atomic::{AtomicUsize, Ordering};

    struct Spy(AtomicUsize);

    impl Generator for Spy {
        fn key(&self) -> String {
            "spy".into()
        }

        fn generate(&self, request: &GenerationRequest<'_>) -> Result<SampleSet> {
            assert!(request.shots.label().is_none());
            for x in request.shots.items() {
                assert!(x.label().is_none());
                assert!(x.id().starts_with("shot-"));
            }
            self.0.fetch_add(1, Ordering::SeqCst);
            ConstantGenerator::zero().generate(request)
        }
    }

    fn config(suite: &CategorySuite) -> HoldoutConfig {
        HoldoutConfig {
            k_shot: 1,
            m_gen: 5,
            m_ref: None,
            family: default_family_for(suite),
            sigma: ScoringFunction::Mean,
            epsilon: Epsilon::new(0.2).unwrap(),
            seed: 4,
        }
    }

    #[test]
    fn generator_sees_no_labels() {
        let suite = sequence_suite();
        let spy = Spy(AtomicUsize::new(0));
        let table = holdout_eval(&spy, &suite, &config(&suite)).unwrap();
        assert_eq!(spy.0.load(Ordering::SeqCst), suite.holdout.len());
        assert_eq!(table.rows.len(), suite.holdout.len());
        assert_eq!(table.rows[0].report.sizes.original, MIN_REFERENCE_SIZE);
    }

    #[test]
    fn single_holdout_gives_one_row() {
        let specs = vec![
            CategorySpec::ctest("a", "S?;A1", (0, 25), 26, 5),
            CategorySpec::ctest("b", "S?;A2", (0, 25), 26, 5),
        ];
        let suite = CategorySuite::new("pair", specs, vec![0], vec![1]).unwrap();
        let table = holdout_eval(&ConstantGenerator::zero(), &suite, &config(&suite)).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert_eq!(table.rows[0].category, "b");
        assert_eq!(table.summary.total, 1);
    }
}
