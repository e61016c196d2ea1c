use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agent::env::FiniteEnv;
use crate::agent::policy::{sample_index, TabularPolicy};
use crate::distinguisher::NORMALIZED_RETURN;
use crate::error::Result;
use crate::sample::{Role, Sample, SampleSet};
use crate::seeds::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    pub total: f64,
}

impl Trajectory {
    pub fn normalized_return(&self) -> f64 {
        self.total / self.steps.len() as f64
    }

    /// Symbol sequence `s₀ a₀ s₁ a₁ …` with the normalized return as a
    /// feature.
    pub fn to_sample(&self, id: impl Into<String>) -> Result<Sample> {
        let symbols = self
            .steps
            .iter()
            .flat_map(|s| [s.state as u32, s.action as u32])
            .collect();
        Sample::symbols(id, symbols).with_feature(NORMALIZED_RETURN, self.normalized_return())
    }
}

pub fn run_episode(env: &FiniteEnv, policy: &TabularPolicy, rng: &mut impl Rng) -> Result<Trajectory> {
    let mut state = env.initial_state();
    let mut steps = Vec::with_capacity(env.horizon());
    let mut total = 0.0;
    for t in 0..env.horizon() {
        let action = policy.choose(env, state, t, rng)?;
        let next = sample_index(env.transition(state, action), rng.random::<f64>());
        let reward = env.reward(state, action, next);
        steps.push(Step { state, action, reward });
        total += reward;
        state = next;
    }
    Ok(Trajectory { steps, total })
}

/// Episode `i` draws from its own stream `derive_seed(seed, i)`, so the
/// result does not depend on how episodes are scheduled.
pub fn rollout_trajectories(
    env: &FiniteEnv,
    policy: &TabularPolicy,
    episodes: usize,
    seed: u64,
) -> Result<Vec<Trajectory>> {
    (0..episodes)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            run_episode(env, policy, &mut rng)
        })
        .collect()
}

pub fn rollout(env: &FiniteEnv, policy: &TabularPolicy, episodes: usize, seed: u64, role: Role) -> Result<SampleSet> {
    let items = rollout_trajectories(env, policy, episodes, seed)?
        .iter()
        .enumerate()
        .map(|(i, t)| t.to_sample(format!("episode-{i}")))
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(items, role)
}
