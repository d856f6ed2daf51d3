use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::TrainingLog;
use crate::env::{Env, Observation, Policy, Task};
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QLearningParams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Fraction of the episodes over which epsilon anneals linearly.
    pub anneal_fraction: f64,
}

impl Default for QLearningParams {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            gamma: 0.95,
            epsilon_start: 1.0,
            epsilon_end: 0.05,
            anneal_fraction: 0.5,
        }
    }
}

impl QLearningParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "{name} = {v} outside [0, 1]"
                )))
            }
        };
        unit("alpha", self.alpha)?;
        unit("gamma", self.gamma)?;
        unit("epsilon_start", self.epsilon_start)?;
        unit("epsilon_end", self.epsilon_end)?;
        unit("anneal_fraction", self.anneal_fraction)
    }

    pub fn epsilon(&self, episode: usize, episodes: usize) -> f64 {
        let horizon = self.anneal_fraction * episodes as f64;
        if horizon <= 0.0 || episode as f64 >= horizon {
            return self.epsilon_end;
        }
        let t = episode as f64 / horizon;
        self.epsilon_start + t * (self.epsilon_end - self.epsilon_start)
    }
}

/// Action values keyed by [`Observation::key`].
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n_actions: usize,
    values: HashMap<Vec<i64>, Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct QTableFile {
    n_actions: usize,
    entries: Vec<(Vec<i64>, Vec<f64>)>,
}

impl QTable {
    pub fn new(n_actions: usize) -> Self {
        Self {
            n_actions,
            values: HashMap::new(),
        }
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, key: &[i64]) -> Option<&[f64]> {
        self.values.get(key).map(Vec::as_slice)
    }

    fn row(&mut self, key: Vec<i64>) -> &mut Vec<f64> {
        let n = self.n_actions;
        self.values.entry(key).or_insert_with(|| vec![0.0; n])
    }

    pub fn max_value(&self, key: &[i64]) -> f64 {
        self.get(key)
            .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .unwrap_or(0.0)
    }

    /// Highest-valued action (lowest index on ties), if the state was seen.
    pub fn best_action(&self, key: &[i64]) -> Option<usize> {
        let row = self.get(key)?;
        let mut best = 0;
        for (a, &v) in row.iter().enumerate() {
            if v > row[best] {
                best = a;
            }
        }
        Some(best)
    }

    pub fn all_finite(&self) -> bool {
        self.values.values().flatten().all(|v| v.is_finite())
    }

    /// Entries sorted by key.
    pub fn to_json(&self) -> String {
        let mut entries: Vec<(Vec<i64>, Vec<f64>)> = self
            .values
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        serde_json::to_string(&QTableFile {
            n_actions: self.n_actions,
            entries,
        })
        .expect("q-table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: QTableFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("bad q-table: {e}")))?;
        if let Some((_, row)) = file
            .entries
            .iter()
            .find(|(_, row)| row.len() != file.n_actions)
        {
            return Err(Error::InvalidParameter(format!(
                "q-table row has {} values, expected {}",
                row.len(),
                file.n_actions
            )));
        }
        Ok(Self {
            n_actions: file.n_actions,
            values: file.entries.into_iter().collect(),
        })
    }
}

/// Greedy policy over a learned table. Unseen states fall back to the
/// first legal action.
#[derive(Debug, Clone)]
pub struct QPolicy {
    pub table: QTable,
}

impl<O: Observation> Policy<O> for QPolicy {
    fn act(&mut self, observation: &O, mask: &[bool]) -> usize {
        self.table
            .best_action(&observation.key())
            .or_else(|| mask.iter().position(|&m| m))
            .unwrap_or(0)
    }
}

/// Tabular Q-learning with epsilon-greedy exploration. With `instance`
/// every episode replays that instance; otherwise each reset draws a new one.
pub fn q_learning_train<T: Task>(
    env: &mut Env<T>,
    episodes: usize,
    params: &QLearningParams,
    seed: u64,
    instance: Option<&T::Instance>,
) -> Result<(QPolicy, TrainingLog)> {
    params.validate()?;
    let n_actions = env.action_count();
    let mut table = QTable::new(n_actions);
    let mut explore = RngStream::new(seed).derive(1);
    let mut log = TrainingLog::default();

    for episode in 0..episodes {
        let reseed = (episode == 0).then_some(seed);
        let mut obs = env.reset(reseed, instance.cloned())?;
        let epsilon = params.epsilon(episode, episodes);
        let mut total = 0.0;
        let mut length = 0;
        while !env.is_over() {
            let key = obs.key();
            let action = if explore.unit() < epsilon {
                explore.below(n_actions)
            } else {
                table.best_action(&key).unwrap_or(0)
            };
            let step = env.step(action)?;
            let next_key = step.observation.key();
            let bootstrap = if step.terminated {
                0.0
            } else {
                table.max_value(&next_key)
            };
            let q = &mut table.row(key)[action];
            *q += params.alpha * (step.reward + params.gamma * bootstrap - *q);
            total += step.reward;
            length += 1;
            obs = step.observation;
        }
        log.push(length, total);
    }
    Ok((QPolicy { table }, log))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Transition;

    /// One-step bandit: action `a` pays `a` and ends the episode.
    #[derive(Clone)]
    struct Bandit {
        done: bool,
    }

    #[derive(Clone, Serialize)]
    struct Unit;

    impl Observation for Unit {
        fn key(&self) -> Vec<i64> {
            vec![0]
        }
    }

    impl Task for Bandit {
        type Observation = Unit;
        type Instance = ();

        fn action_count(&self) -> usize {
            3
        }
        fn generate(&self, _: &mut RngStream) -> Result<()> {
            Ok(())
        }
        fn load(&mut self, _: ()) -> Result<()> {
            self.done = false;
            Ok(())
        }
        fn instance(&self) -> &() {
            &()
        }
        fn apply(&mut self, action: usize) -> Transition {
            self.done = true;
            Transition::legal(action as f64)
        }
        fn observe(&self) -> Unit {
            Unit
        }
        fn is_complete(&self) -> bool {
            self.done
        }
        fn step_budget(&self) -> usize {
            1
        }
        fn action_mask(&self) -> Vec<bool> {
            vec![true; 3]
        }
    }

    #[test]
    fn degenerate_update_copies_rewards() {
        let mut env = Env::new(Bandit { done: false }, 0);
        let params = QLearningParams {
            alpha: 1.0,
            gamma: 0.0,
            epsilon_start: 1.0,
            epsilon_end: 1.0,
            anneal_fraction: 0.0,
        };
        let (policy, log) = q_learning_train(&mut env, 200, &params, 3, None).unwrap();
        assert_eq!(policy.table.get(&[0]).unwrap(), &[0.0, 1.0, 2.0]);
        assert_eq!(log.len(), 200);
        assert_eq!(policy.table.best_action(&[0]), Some(2));
    }

    #[test]
    fn epsilon_schedule() {
        let p = QLearningParams::default();
        assert_eq!(p.epsilon(0, 100), 1.0);
        assert!((p.epsilon(25, 100) - 0.525).abs() < 1e-12);
        assert_eq!(p.epsilon(50, 100), 0.05);
        assert_eq!(p.epsilon(99, 100), 0.05);
    }

    #[test]
    fn params_validation() {
        let bad = QLearningParams {
            gamma: 1.5,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn table_json_roundtrip() {
        let mut t = QTable::new(2);
        *t.row(vec![1, 2]) = vec![0.5, -1.0];
        *t.row(vec![0]) = vec![2.0, 3.0];
        let back = QTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert!(QTable::from_json(r#"{"n_actions":2,"entries":[[[0],[1.0]]]}"#).is_err());
    }
}
