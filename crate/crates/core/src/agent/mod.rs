//! Reward-optimality evaluation on finite environments.
//!
//! The original set is rollouts of the optimal policy, the generated set is
//! rollouts of the candidate, and the family is the single reward
//! distinguisher `f(trajectory) = return / horizon`.

pub mod env;
pub mod policy;
pub mod rollout;
pub mod solve;

pub use env::{EnvFile, FiniteEnv};
pub use policy::{ActionChoice, PolicyEntry, TabularPolicy};
pub use rollout::{rollout, rollout_trajectories, run_episode, Step, Trajectory};
pub use solve::{value_iteration, Solution};

use crate::delta::{delta, DeltaReport};
use crate::distinguisher::{Distinguisher, DistinguisherFamily, Params};
use crate::error::{Error, Result};
use crate::sample::Role;
use crate::scoring::ScoringFunction;

pub fn reward_distinguisher(env: &FiniteEnv) -> Distinguisher {
    Distinguisher::new(
        format!("reward[{}]", env.id()),
        Params::Reward {
            env_id: env.id().to_string(),
        },
    )
}

pub fn agent_delta(
    env: &FiniteEnv,
    policy: &TabularPolicy,
    episodes: usize,
    sigma: &ScoringFunction,
    seed: u64,
) -> Result<DeltaReport> {
    if episodes == 0 {
        return Err(Error::InvalidArgument("episodes must be at least 1".into()));
    }
    let optimal = value_iteration(env)?;
    let reference = rollout(env, &optimal.policy, episodes, seed, Role::Original)?;
    let candidate = rollout(env, policy, episodes, seed, Role::Generated)?;
    let family = DistinguisherFamily::explicit(format!("reward:{}", env.id()), vec![reward_distinguisher(env)])?;
    delta(&reference, &candidate, &family, sigma)
}
