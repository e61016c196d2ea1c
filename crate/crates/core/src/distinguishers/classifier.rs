//! Learned distinguisher: logistic regression trained on one split, scored
//! on the other.
//!
//! Inputs are standardized with the training split's mean and standard
//! deviation, weights start at zero, and training is full-batch gradient
//! descent on mean log-loss with a fixed step and iteration count. Nothing
//! random happens after the seeded split, so a seed fixes the model bit for
//! bit.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distinguisher::{Distinguisher, Params};
use crate::distinguishers::features::FeatureExtractor;
use crate::error::{Error, Result};
use crate::sample::{Role, Sample, SampleSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierSpec {
    /// Fraction of each set used for training.
    #[serde(default = "default_split")]
    pub split_fraction: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// Model inputs. Defaults to every named feature present on the samples.
    #[serde(default)]
    pub inputs: Option<Vec<FeatureExtractor>>,
}

fn default_split() -> f64 {
    0.5
}
fn default_learning_rate() -> f64 {
    0.5
}
fn default_iterations() -> usize {
    500
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec {
            split_fraction: default_split(),
            seed: 0,
            learning_rate: default_learning_rate(),
            iterations: default_iterations(),
            inputs: None,
        }
    }
}

/// A frozen trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    inputs: Vec<FeatureExtractor>,
    mean: Vec<f64>,
    scale: Vec<f64>,
    weights: Vec<f64>,
    bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogisticModel {
    fn raw_inputs(inputs: &[FeatureExtractor], x: &Sample) -> Result<Vec<f64>> {
        inputs.iter().map(|f| f.raw(x)).collect()
    }

    /// Probability that `x` is an original.
    pub fn predict(&self, x: &Sample) -> Result<f64> {
        let raw = Self::raw_inputs(&self.inputs, x)?;
        let z = raw
            .iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .zip(&self.weights)
            .map(|(((v, m), s), w)| w * (v - m) / s)
            .sum::<f64>()
            + self.bias;
        Ok(sigmoid(z))
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }
}

#[derive(Debug, Clone)]
pub struct TrainedClassifier {
    pub distinguisher: Distinguisher,
    /// Balanced accuracy on the held-out split.
    pub heldout_advantage: f64,
    pub heldout_original: SampleSet,
    pub heldout_generated: SampleSet,
}

fn split_indices(n: usize, fraction: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let n_train = ((n as f64 * fraction).round() as usize).clamp(1, n - 1);
    let test = idx.split_off(n_train);
    (idx, test)
}

fn default_inputs(sets: [&SampleSet; 2]) -> Vec<FeatureExtractor> {
    let names: BTreeSet<&str> = sets
        .iter()
        .flat_map(|s| s.items())
        .flat_map(|x| x.features().keys().map(String::as_str))
        .collect();
    names.into_iter().map(FeatureExtractor::named).collect()
}

pub fn train_classifier_distinguisher(
    original: &SampleSet,
    generated: &SampleSet,
    spec: &ClassifierSpec,
) -> Result<TrainedClassifier> {
    for set in [original, generated] {
        if set.len() < 4 {
            return Err(Error::TooFewSamples {
                needed: 4,
                got: set.len(),
            });
        }
    }
    if !(spec.split_fraction > 0.0 && spec.split_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "split_fraction {} outside (0, 1)",
            spec.split_fraction
        )));
    }
    let inputs = spec
        .inputs
        .clone()
        .unwrap_or_else(|| default_inputs([original, generated]));
    if inputs.is_empty() {
        return Err(Error::InvalidArgument("classifier has no input features".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (train_o, test_o) = split_indices(original.len(), spec.split_fraction, &mut rng);
    let (train_g, test_g) = split_indices(generated.len(), spec.split_fraction, &mut rng);

    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &i in &train_o {
        xs.push(LogisticModel::raw_inputs(&inputs, &original.items()[i])?);
        ys.push(1.0);
    }
    for &i in &train_g {
        xs.push(LogisticModel::raw_inputs(&inputs, &generated.items()[i])?);
        ys.push(0.0);
    }

    let d = inputs.len();
    let n = xs.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| xs.iter().map(|x| x[j]).sum::<f64>() / n).collect();
    let scale: Vec<f64> = (0..d)
        .map(|j| {
            let var = xs.iter().map(|x| (x[j] - mean[j]).powi(2)).sum::<f64>() / n;
            if var > 0.0 {
                var.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let zs: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| (0..d).map(|j| (x[j] - mean[j]) / scale[j]).collect())
        .collect();

    let mut weights = vec![0.0; d];
    let mut bias = 0.0;
    for _ in 0..spec.iterations {
        let mut grad_w = vec![0.0; d];
        let mut grad_b = 0.0;
        for (z, y) in zs.iter().zip(&ys) {
            let p = sigmoid(z.iter().zip(&weights).map(|(a, w)| a * w).sum::<f64>() + bias);
            let err = p - y;
            for j in 0..d {
                grad_w[j] += err * z[j];
            }
            grad_b += err;
        }
        for j in 0..d {
            weights[j] -= spec.learning_rate * grad_w[j] / n;
        }
        bias -= spec.learning_rate * grad_b / n;
    }

    let model = LogisticModel {
        inputs,
        mean,
        scale,
        weights,
        bias,
    };

    let heldout_original = original.select(&test_o, Role::Original)?;
    let heldout_generated = generated.select(&test_g, Role::Generated)?;
    let rate = |set: &SampleSet, want_original: bool| -> Result<f64> {
        let mut hits = 0usize;
        for x in set.items() {
            let called_original = model.predict(x)? >= 0.5;
            if called_original == want_original {
                hits += 1;
            }
        }
        Ok(hits as f64 / set.len() as f64)
    };
    let heldout_advantage = 0.5 * (rate(&heldout_original, true)? + rate(&heldout_generated, false)?);

    let key = format!("classifier[seed={},split={}]", spec.seed, spec.split_fraction);
    Ok(TrainedClassifier {
        distinguisher: Distinguisher::new(key, Params::Classifier(model)),
        heldout_advantage,
        heldout_original,
        heldout_generated,
    })
}

/// `|2·acc − 1|`: chance is 0, perfect separation (either way round) is 1.
pub fn advantage_to_delta(balanced_accuracy: f64) -> f64 {
    (2.0 * balanced_accuracy - 1.0).abs().clamp(0.0, 1.0)
}
