use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agent::env::FiniteEnv;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ActionChoice {
    Deterministic(usize),
    /// Probabilities indexed by action.
    Distribution(Vec<f64>),
}

/// Action (or action distribution) per `(state, timestep)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TabularPolicy {
    rules: BTreeMap<(usize, usize), ActionChoice>,
}

impl TabularPolicy {
    pub fn new() -> Self {
        TabularPolicy::default()
    }

    pub fn set(&mut self, state: usize, timestep: usize, choice: ActionChoice) {
        self.rules.insert((state, timestep), choice);
    }

    pub fn get(&self, state: usize, timestep: usize) -> Option<&ActionChoice> {
        self.rules.get(&(state, timestep))
    }

    /// Same action in every state at every step.
    pub fn constant(env: &FiniteEnv, action: usize) -> Self {
        Self::fill(env, |_, _| ActionChoice::Deterministic(action))
    }

    pub fn uniform(env: &FiniteEnv) -> Self {
        let na = env.actions().len();
        Self::fill(env, |_, _| ActionChoice::Distribution(vec![1.0 / na as f64; na]))
    }

    fn fill(env: &FiniteEnv, mut f: impl FnMut(usize, usize) -> ActionChoice) -> Self {
        let mut p = TabularPolicy::new();
        for t in 0..env.horizon() {
            for s in 0..env.states().len() {
                p.set(s, t, f(s, t));
            }
        }
        p
    }

    pub(crate) fn choose(&self, env: &FiniteEnv, state: usize, timestep: usize, rng: &mut impl Rng) -> Result<usize> {
        let na = env.actions().len();
        match self.get(state, timestep) {
            None => Err(Error::MalformedPolicy(format!(
                "no action for state `{}` at timestep {timestep}",
                env.states()[state]
            ))),
            Some(ActionChoice::Deterministic(a)) if *a < na => Ok(*a),
            Some(ActionChoice::Deterministic(a)) => Err(Error::MalformedPolicy(format!("action index {a} out of range"))),
            Some(ActionChoice::Distribution(probs)) => {
                if probs.len() != na {
                    return Err(Error::MalformedPolicy("distribution does not cover every action".into()));
                }
                Ok(sample_index(probs, rng.random::<f64>()))
            }
        }
    }

    /// Parse `{"state,timestep": "action" | {"action": prob, ..}}`.
    pub fn from_file_map(env: &FiniteEnv, map: &BTreeMap<String, PolicyEntry>) -> Result<Self> {
        let mut policy = TabularPolicy::new();
        for (key, entry) in map {
            let (state, t) = key
                .rsplit_once(',')
                .ok_or_else(|| Error::MalformedPolicy(format!("key `{key}` is not `state,timestep`")))?;
            let s = env
                .state_index(state)
                .ok_or_else(|| Error::MalformedPolicy(format!("unknown state `{state}`")))?;
            let t: usize = t
                .trim()
                .parse()
                .map_err(|_| Error::MalformedPolicy(format!("bad timestep in `{key}`")))?;
            let action = |name: &str| {
                env.action_index(name)
                    .ok_or_else(|| Error::MalformedPolicy(format!("unknown action `{name}`")))
            };
            let choice = match entry {
                PolicyEntry::Action(name) => ActionChoice::Deterministic(action(name)?),
                PolicyEntry::Distribution(probs) => {
                    let mut v = vec![0.0; env.actions().len()];
                    for (name, &p) in probs {
                        if !(0.0..=1.0).contains(&p) {
                            return Err(Error::MalformedPolicy(format!("probability {p} in `{key}`")));
                        }
                        v[action(name)?] = p;
                    }
                    if (v.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                        return Err(Error::MalformedPolicy(format!("distribution at `{key}` does not sum to 1")));
                    }
                    ActionChoice::Distribution(v)
                }
            };
            policy.set(s, t, choice);
        }
        Ok(policy)
    }

    pub fn load(env: &FiniteEnv, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let map: BTreeMap<String, PolicyEntry> =
            serde_json::from_str(&text).map_err(|e| Error::data(path, e.line(), e.to_string()))?;
        Self::from_file_map(env, &map)
    }

    pub fn to_file_map(&self, env: &FiniteEnv) -> BTreeMap<String, PolicyEntry> {
        self.rules
            .iter()
            .map(|(&(s, t), choice)| {
                let entry = match choice {
                    ActionChoice::Deterministic(a) => PolicyEntry::Action(env.actions()[*a].clone()),
                    ActionChoice::Distribution(p) => PolicyEntry::Distribution(
                        p.iter()
                            .enumerate()
                            .filter(|(_, &x)| x > 0.0)
                            .map(|(a, &x)| (env.actions()[a].clone(), x))
                            .collect(),
                    ),
                };
                (format!("{},{t}", env.states()[s]), entry)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolicyEntry {
    Action(String),
    Distribution(BTreeMap<String, f64>),
}

/// Inverse-CDF draw; falls back to the last positive entry when rounding
/// leaves `u` above the cumulative sum.
pub(crate) fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}
