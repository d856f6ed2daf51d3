use std::fmt::Write as _;

use serde::Serialize;

use super::{Env, Policy, StepResult, Task};
use crate::error::Result;

#[derive(Debug, Clone, Serialize)]
pub struct TraceStep<O> {
    pub action: usize,
    pub result: StepResult<O>,
}

/// Full record of one rollout.
#[derive(Debug, Clone, Serialize)]
pub struct EpisodeTrace<O> {
    pub seed: Option<u64>,
    pub instance: serde_json::Value,
    pub initial_observation: O,
    pub steps: Vec<TraceStep<O>>,
}

#[derive(Serialize)]
struct Header<'a, O> {
    seed: Option<u64>,
    instance: &'a serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial_observation: Option<&'a O>,
}

impl<O: Serialize> EpisodeTrace<O> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.result.reward).sum()
    }

    pub fn terminated(&self) -> bool {
        self.steps.last().is_some_and(|s| s.result.terminated)
    }

    pub fn truncated(&self) -> bool {
        self.steps.last().is_some_and(|s| s.result.truncated)
    }

    /// JSON header line, then `step_idx action reward terminated truncated`
    /// per step. With `observations`, each step line also carries the
    /// observation as trailing JSON and the header the initial one.
    pub fn to_text(&self, observations: bool) -> String {
        let header = Header {
            seed: self.seed,
            instance: &self.instance,
            initial_observation: observations.then_some(&self.initial_observation),
        };
        let mut out = serde_json::to_string(&header).expect("trace header serializes");
        out.push('\n');
        for (i, step) in self.steps.iter().enumerate() {
            let r = &step.result;
            write!(
                out,
                "{i} {} {:?} {} {}",
                step.action, r.reward, r.terminated, r.truncated
            )
            .unwrap();
            if observations {
                out.push(' ');
                out.push_str(
                    &serde_json::to_string(&r.observation).expect("observation serializes"),
                );
            }
            out.push('\n');
        }
        out
    }
}

fn start<T: Task>(
    env: &mut Env<T>,
    seed: Option<u64>,
    instance: Option<T::Instance>,
) -> Result<EpisodeTrace<T::Observation>> {
    let initial_observation = env.reset(seed, instance)?;
    Ok(EpisodeTrace {
        seed,
        instance: serde_json::to_value(env.task().instance()).expect("instance serializes"),
        initial_observation,
        steps: Vec::new(),
    })
}

/// Rolls `policy` from a fresh reset until termination or truncation.
pub fn run_episode<T: Task, P: Policy<T::Observation> + ?Sized>(
    env: &mut Env<T>,
    policy: &mut P,
    seed: Option<u64>,
    instance: Option<T::Instance>,
) -> Result<EpisodeTrace<T::Observation>> {
    let mut trace = start(env, seed, instance)?;
    let mut observation = trace.initial_observation.clone();
    while !env.is_over() {
        let action = policy.act(&observation, &env.action_mask());
        let result = env.step(action)?;
        observation = result.observation.clone();
        trace.steps.push(TraceStep { action, result });
    }
    Ok(trace)
}

/// Plays a fixed action sequence. Actions left over after the episode
/// ends surface the usual post-episode error.
pub fn run_script<T: Task>(
    env: &mut Env<T>,
    seed: Option<u64>,
    instance: Option<T::Instance>,
    actions: &[usize],
) -> Result<EpisodeTrace<T::Observation>> {
    let mut trace = start(env, seed, instance)?;
    for &action in actions {
        let result = env.step(action)?;
        trace.steps.push(TraceStep { action, result });
    }
    Ok(trace)
}
