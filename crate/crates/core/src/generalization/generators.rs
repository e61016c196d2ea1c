//! Generators under test. A generator sees only the unlabelled k-shot
//! samples, a count and a seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::generalization::category::{sample_category, CategorySpec};
use crate::sample::{Payload, Role, Sample, SampleSet};

/// What a generator is given. `shots` never carries a label.
#[derive(Debug, Clone, Copy)]
pub struct GenerationRequest<'a> {
    pub shots: &'a SampleSet,
    pub count: usize,
    pub seed: u64,
}

pub trait Generator: Send + Sync {
    fn key(&self) -> String;

    /// Must return exactly `request.count` samples.
    fn generate(&self, request: &GenerationRequest<'_>) -> Result<SampleSet>;
}

fn finish(payloads: Vec<Payload>) -> Result<SampleSet> {
    let items = payloads
        .into_iter()
        .enumerate()
        .map(|(i, p)| Sample::new(format!("gen-{i}"), p))
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(items, Role::Generated)
}

/// Memorizing baseline: cycles through the shots, corrupting each symbol
/// (or byte) with probability `noise`. Scalars are jittered by
/// `noise · spread · Z`, where spread is the shots' standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct CopyGenerator {
    noise: f64,
    alphabet: u32,
}

impl CopyGenerator {
    pub fn new(noise: f64, alphabet: u32) -> Result<Self> {
        if !(0.0..=1.0).contains(&noise) {
            return Err(Error::InvalidArgument(format!("noise {noise} outside [0, 1]")));
        }
        if alphabet == 0 {
            return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
        }
        Ok(CopyGenerator { noise, alphabet })
    }
}

pub fn baseline_copy_generator(noise: f64) -> Result<CopyGenerator> {
    CopyGenerator::new(noise, crate::ctest::item::DEFAULT_ALPHABET)
}

fn spread(shots: &SampleSet) -> f64 {
    let xs: Vec<f64> = shots
        .items()
        .iter()
        .filter_map(|x| match x.payload() {
            Payload::Scalar(v) => Some(*v),
            _ => None,
        })
        .collect();
    if xs.len() < 2 {
        return 1.0;
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (xs.len() - 1) as f64;
    if var > 0.0 {
        var.sqrt()
    } else {
        1.0
    }
}

impl Generator for CopyGenerator {
    fn key(&self) -> String {
        format!("copy[noise={}]", self.noise)
    }

    fn generate(&self, request: &GenerationRequest<'_>) -> Result<SampleSet> {
        let mut rng = ChaCha8Rng::seed_from_u64(request.seed);
        let shots = request.shots.items();
        let sd = spread(request.shots);
        let flip = |rng: &mut ChaCha8Rng| self.noise > 0.0 && rng.random::<f64>() < self.noise;
        let payloads = (0..request.count)
            .map(|i| match shots[i % shots.len()].payload() {
                Payload::Symbols(s) => Payload::Symbols(
                    s.iter()
                        .map(|&x| if flip(&mut rng) { rng.random_range(0..self.alphabet) } else { x })
                        .collect(),
                ),
                Payload::Text(t) => Payload::Text(
                    t.chars()
                        .map(|c| if flip(&mut rng) { rng.random_range(b'a'..=b'z') as char } else { c })
                        .collect(),
                ),
                Payload::Bytes(b) => {
                    Payload::Bytes(b.iter().map(|&x| if flip(&mut rng) { rng.random() } else { x }).collect())
                }
                Payload::Scalar(v) => {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    Payload::Scalar(v + self.noise * sd * z)
                }
            })
            .collect();
        finish(payloads)
    }
}

/// Emits one payload regardless of input. Without an explicit payload it
/// emits the zero element of the shots' codec (all-zero symbols of the
/// first shot's length, `0.0`, empty text or bytes).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConstantGenerator {
    payload: Option<Payload>,
}

impl ConstantGenerator {
    pub fn new(payload: Payload) -> Self {
        ConstantGenerator { payload: Some(payload) }
    }

    pub fn zero() -> Self {
        ConstantGenerator::default()
    }
}

impl Generator for ConstantGenerator {
    fn key(&self) -> String {
        match &self.payload {
            Some(p) => format!("constant[{}]", p.to_json()),
            None => "constant[zero]".into(),
        }
    }

    fn generate(&self, request: &GenerationRequest<'_>) -> Result<SampleSet> {
        let payload = match &self.payload {
            Some(p) => p.clone(),
            None => match request.shots.items()[0].payload() {
                Payload::Symbols(s) => Payload::Symbols(vec![0; s.len()]),
                Payload::Scalar(_) => Payload::Scalar(0.0),
                Payload::Text(_) => Payload::Text(String::new()),
                Payload::Bytes(_) => Payload::Bytes(Vec::new()),
            },
        };
        finish(vec![payload; request.count])
    }
}

/// Test-only cheat: knows every category of a suite, picks the one under
/// which the shots are most likely (first on ties), and returns fresh
/// draws from it.
#[derive(Debug, Clone, PartialEq)]
pub struct FreshSampleOracle {
    specs: Vec<CategorySpec>,
}

impl FreshSampleOracle {
    pub fn new(specs: Vec<CategorySpec>) -> Self {
        FreshSampleOracle { specs }
    }

    pub fn identify(&self, shots: &SampleSet) -> Option<&CategorySpec> {
        let mut best: Option<(&CategorySpec, f64)> = None;
        for spec in &self.specs {
            let ll: f64 = shots.items().iter().map(|x| spec.log_likelihood(x)).sum();
            if ll > f64::NEG_INFINITY && best.map_or(true, |(_, b)| ll > b) {
                best = Some((spec, ll));
            }
        }
        best.map(|(s, _)| s)
    }
}

impl Generator for FreshSampleOracle {
    fn key(&self) -> String {
        "fresh-sample-oracle".into()
    }

    fn generate(&self, request: &GenerationRequest<'_>) -> Result<SampleSet> {
        let spec = self
            .identify(request.shots)
            .ok_or_else(|| Error::InvalidArgument("shots fit no known category".into()))?;
        let fresh = sample_category(spec, request.count, request.seed)?;
        finish(fresh.into_items().into_iter().map(|x| x.payload().clone()).collect())
    }
}
