use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ROW_SUM_TOLERANCE: f64 = 1e-12;

/// Finite-horizon tabular environment with rewards in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteEnv {
    id: String,
    states: Vec<String>,
    actions: Vec<String>,
    /// `[state][action][next_state]` probabilities.
    transition: Vec<Vec<Vec<f64>>>,
    /// `[state][action][next_state]` rewards.
    reward: Vec<Vec<Vec<f64>>>,
    horizon: usize,
    initial_state: usize,
}

impl FiniteEnv {
    pub fn new(
        id: impl Into<String>,
        states: Vec<String>,
        actions: Vec<String>,
        transition: Vec<Vec<Vec<f64>>>,
        reward: Vec<Vec<Vec<f64>>>,
        horizon: usize,
        initial_state: usize,
    ) -> Result<Self> {
        let env = FiniteEnv {
            id: id.into(),
            states,
            actions,
            transition,
            reward,
            horizon,
            initial_state,
        };
        env.validate()?;
        Ok(env)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedEnv(format!("{}: {msg}", self.id)));
        let (ns, na) = (self.states.len(), self.actions.len());
        if ns == 0 || na == 0 {
            return bad("needs at least one state and one action".into());
        }
        if self.horizon == 0 {
            return bad("horizon must be positive".into());
        }
        if self.initial_state >= ns {
            return bad(format!("initial state {} out of range", self.initial_state));
        }
        if self.transition.len() != ns || self.reward.len() != ns {
            return bad("transition/reward tables do not cover every state".into());
        }
        for s in 0..ns {
            if self.transition[s].len() != na || self.reward[s].len() != na {
                return bad(format!("state `{}` does not cover every action", self.states[s]));
            }
            for a in 0..na {
                let row = &self.transition[s][a];
                let rewards = &self.reward[s][a];
                if row.len() != ns || rewards.len() != ns {
                    return bad(format!("row ({}, {}) has the wrong width", self.states[s], self.actions[a]));
                }
                if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return bad(format!("row ({}, {}) has a probability outside [0, 1]", self.states[s], self.actions[a]));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return bad(format!("row ({}, {}) sums to {sum}", self.states[s], self.actions[a]));
                }
                if rewards.iter().any(|r| !(0.0..=1.0).contains(r)) {
                    return bad(format!("row ({}, {}) has a reward outside [0, 1]", self.states[s], self.actions[a]));
                }
            }
        }
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn transition(&self, s: usize, a: usize) -> &[f64] {
        &self.transition[s][a]
    }

    pub fn reward(&self, s: usize, a: usize, next: usize) -> f64 {
        self.reward[s][a][next]
    }

    pub fn is_deterministic(&self) -> bool {
        self.transition
            .iter()
            .flatten()
            .all(|row| row.iter().filter(|&&p| p > 0.0).count() == 1)
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    /// One state, one arm per reward, horizon 1, deterministic payouts.
    pub fn bandit(id: &str, payouts: &[f64]) -> Result<Self> {
        let na = payouts.len();
        FiniteEnv::new(
            id,
            vec!["s".into()],
            (0..na).map(|a| format!("arm{a}")).collect(),
            vec![vec![vec![1.0]; na]],
            vec![payouts.iter().map(|&r| vec![r]).collect()],
            1,
            0,
        )
    }

    /// `width × height` grid with moves up/down/left/right (walls block),
    /// start at (0, 0), absorbing goal at the far corner. Entering the goal
    /// pays 1; every other transition pays 0.
    pub fn grid(id: &str, width: usize, height: usize, horizon: usize) -> Result<Self> {
        let ns = width * height;
        let goal = ns - 1;
        let moves: [(&str, i64, i64); 4] = [("up", 0, -1), ("down", 0, 1), ("left", -1, 0), ("right", 1, 0)];
        let mut transition = vec![vec![vec![0.0; ns]; moves.len()]; ns];
        let mut reward = vec![vec![vec![0.0; ns]; moves.len()]; ns];
        for s in 0..ns {
            let (x, y) = ((s % width) as i64, (s / width) as i64);
            for (a, &(_, dx, dy)) in moves.iter().enumerate() {
                let next = if s == goal {
                    goal
                } else {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                        s
                    } else {
                        ny as usize * width + nx as usize
                    }
                };
                transition[s][a][next] = 1.0;
                if next == goal && s != goal {
                    reward[s][a][next] = 1.0;
                }
            }
        }
        FiniteEnv::new(
            id,
            (0..ns).map(|s| format!("{},{}", s % width, s / width)).collect(),
            moves.iter().map(|m| m.0.to_string()).collect(),
            transition,
            reward,
            horizon,
            0,
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: EnvFile = serde_json::from_str(&text).map_err(|e| Error::data(path, e.line(), e.to_string()))?;
        file.try_into()
    }
}

/// JSON form of an environment. Transition and reward entries are
/// `[state, action, next_state, value]`; missing rewards are 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvFile {
    pub id: String,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub transitions: Vec<(String, String, String, f64)>,
    #[serde(default)]
    pub rewards: Vec<(String, String, String, f64)>,
    pub horizon: usize,
    pub initial_state: String,
}

impl TryFrom<EnvFile> for FiniteEnv {
    type Error = Error;

    fn try_from(file: EnvFile) -> Result<Self> {
        let index = |names: &[String], kind: &str| -> Result<HashMap<String, usize>> {
            let mut map = HashMap::new();
            for (i, n) in names.iter().enumerate() {
                if map.insert(n.clone(), i).is_some() {
                    return Err(Error::MalformedEnv(format!("duplicate {kind} `{n}`")));
                }
            }
            Ok(map)
        };
        let si = index(&file.states, "state")?;
        let ai = index(&file.actions, "action")?;
        let lookup = |map: &HashMap<String, usize>, name: &str, kind: &str| {
            map.get(name)
                .copied()
                .ok_or_else(|| Error::MalformedEnv(format!("unknown {kind} `{name}`")))
        };
        let (ns, na) = (file.states.len(), file.actions.len());
        let mut transition = vec![vec![vec![0.0; ns]; na]; ns];
        let mut reward = vec![vec![vec![0.0; ns]; na]; ns];
        for (s, a, n, p) in &file.transitions {
            let (s, a, n) = (lookup(&si, s, "state")?, lookup(&ai, a, "action")?, lookup(&si, n, "state")?);
            transition[s][a][n] += p;
        }
        for (s, a, n, r) in &file.rewards {
            let (s, a, n) = (lookup(&si, s, "state")?, lookup(&ai, a, "action")?, lookup(&si, n, "state")?);
            reward[s][a][n] = *r;
        }
        let initial = lookup(&si, &file.initial_state, "state")?;
        FiniteEnv::new(file.id, file.states, file.actions, transition, reward, file.horizon, initial)
    }
}

impl From<&FiniteEnv> for EnvFile {
    fn from(env: &FiniteEnv) -> Self {
        let mut transitions = Vec::new();
        let mut rewards = Vec::new();
        for (s, sn) in env.states.iter().enumerate() {
            for (a, an) in env.actions.iter().enumerate() {
                for (n, nn) in env.states.iter().enumerate() {
                    let p = env.transition[s][a][n];
                    if p > 0.0 {
                        transitions.push((sn.clone(), an.clone(), nn.clone(), p));
                    }
                    let r = env.reward[s][a][n];
                    if r != 0.0 {
                        rewards.push((sn.clone(), an.clone(), nn.clone(), r));
                    }
                }
            }
        }
        EnvFile {
            id: env.id.clone(),
            states: env.states.clone(),
            actions: env.actions.clone(),
            transitions,
            rewards,
            horizon: env.horizon,
            initial_state: env.states[env.initial_state].clone(),
        }
    }
}
