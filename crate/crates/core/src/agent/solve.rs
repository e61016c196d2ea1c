use crate::agent::env::FiniteEnv;
use crate::agent::policy::{ActionChoice, TabularPolicy};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub policy: TabularPolicy,
    /// Undiscounted expected return from the initial state.
    pub optimal_expected_return: f64,
    /// `values[t][s]`: optimal expected return-to-go at step `t`.
    pub values: Vec<Vec<f64>>,
}

/// Finite-horizon backward induction. Ties go to the lowest action index.
pub fn value_iteration(env: &FiniteEnv) -> Result<Solution> {
    let (ns, na, h) = (env.states().len(), env.actions().len(), env.horizon());
    let mut values = vec![vec![0.0; ns]; h + 1];
    let mut policy = TabularPolicy::new();
    for t in (0..h).rev() {
        for s in 0..ns {
            let mut best = (0, f64::NEG_INFINITY);
            for a in 0..na {
                let q: f64 = env
                    .transition(s, a)
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(next, &p)| p * (env.reward(s, a, next) + values[t + 1][next]))
                    .sum();
                if q > best.1 {
                    best = (a, q);
                }
            }
            values[t][s] = best.1;
            policy.set(s, t, ActionChoice::Deterministic(best.0));
        }
    }
    Ok(Solution {
        policy,
        optimal_expected_return: values[0][env.initial_state()],
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandit_picks_the_better_arm() {
        let env = FiniteEnv::bandit("b", &[0.9, 0.1]).unwrap();
        let sol = value_iteration(&env).unwrap();
        assert_eq!(sol.optimal_expected_return, 0.9);
        assert_eq!(sol.policy.get(0, 0), Some(&ActionChoice::Deterministic(0)));
    }

    #[test]
    fn zero_reward_ties_go_to_action_zero() {
        let env = FiniteEnv::bandit("z", &[0.0, 0.0, 0.0]).unwrap();
        let sol = value_iteration(&env).unwrap();
        assert_eq!(sol.optimal_expected_return, 0.0);
        assert_eq!(sol.policy.get(0, 0), Some(&ActionChoice::Deterministic(0)));

        let grid = FiniteEnv::grid("g", 3, 3, 1).unwrap();
        let sol = value_iteration(&grid).unwrap();
        assert_eq!(sol.optimal_expected_return, 0.0);
    }

    #[test]
    fn grid_reaches_goal_in_four_moves() {
        let env = FiniteEnv::grid("g", 3, 3, 4).unwrap();
        assert_eq!(value_iteration(&env).unwrap().optimal_expected_return, 1.0);
        let short = FiniteEnv::grid("g", 3, 3, 3).unwrap();
        assert_eq!(value_iteration(&short).unwrap().optimal_expected_return, 0.0);
    }
}
