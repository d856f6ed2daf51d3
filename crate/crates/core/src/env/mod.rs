//! Episode lifecycle shared by all environments.
//!
//! Each environment implements [`Task`]: the instance generator, the
//! transition function and the observation encoder. [`Env`] wraps a task
//! with seeding, step counting, truncation and the post-episode guard.

mod trace;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RngStream;

pub use trace::{run_episode, run_script, EpisodeTrace, TraceStep};

/// Diagnostics attached to a step.
pub type Info = BTreeMap<String, serde_json::Value>;

/// An observation that can key a tabular agent.
pub trait Observation: Clone + Serialize {
    /// Observation fields flattened in a fixed order.
    fn key(&self) -> Vec<i64>;
}

/// What a task reports back after applying one action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub reward: f64,
    pub illegal: bool,
}

impl Transition {
    pub fn legal(reward: f64) -> Self {
        Self {
            reward,
            illegal: false,
        }
    }

    pub fn illegal(reward: f64) -> Self {
        Self {
            reward,
            illegal: true,
        }
    }
}

/// Environment-specific half of an RL environment.
pub trait Task {
    type Observation: Observation;
    type Instance: Clone + Serialize + serde::de::DeserializeOwned;

    /// Size of the integer action space.
    fn action_count(&self) -> usize;

    /// Draws a fresh per-episode instance.
    fn generate(&self, rng: &mut RngStream) -> Result<Self::Instance>;

    /// Validates `instance` and puts the task into its initial state.
    fn load(&mut self, instance: Self::Instance) -> Result<()>;

    fn instance(&self) -> &Self::Instance;

    /// Applies any action code, including out-of-range ones. Illegal actions
    /// must leave the state untouched.
    fn apply(&mut self, action: usize) -> Transition;

    fn observe(&self) -> Self::Observation;

    fn is_complete(&self) -> bool;

    /// Steps after which the episode is truncated.
    fn step_budget(&self) -> usize;

    /// Which action codes are currently legal.
    fn action_mask(&self) -> Vec<bool>;

    fn annotate(&self, _info: &mut Info) {}
}

#[derive(Debug, Clone, Serialize)]
pub struct StepResult<O> {
    pub observation: O,
    pub reward: f64,
    pub terminated: bool,
    pub truncated: bool,
    pub info: Info,
}

/// Maps observations to action codes. `mask` holds the currently legal actions.
pub trait Policy<O> {
    fn act(&mut self, observation: &O, mask: &[bool]) -> usize;
}

impl<O, F: FnMut(&O, &[bool]) -> usize> Policy<O> for F {
    fn act(&mut self, observation: &O, mask: &[bool]) -> usize {
        self(observation, mask)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Idle,
    Running,
    Finished,
}

#[derive(Debug, Clone)]
pub struct Env<T: Task> {
    task: T,
    rng: RngStream,
    steps: usize,
    phase: Phase,
    last_seed: Option<u64>,
}

impl<T: Task> Env<T> {
    pub fn new(task: T, seed: u64) -> Self {
        Self {
            task,
            rng: RngStream::new(seed),
            steps: 0,
            phase: Phase::Idle,
            last_seed: None,
        }
    }

    pub fn task(&self) -> &T {
        &self.task
    }

    /// Mutable access for reconfiguration between episodes.
    pub fn task_mut(&mut self) -> &mut T {
        &mut self.task
    }

    pub fn action_count(&self) -> usize {
        self.task.action_count()
    }

    pub fn action_mask(&self) -> Vec<bool> {
        self.task.action_mask()
    }

    pub fn observe(&self) -> T::Observation {
        self.task.observe()
    }

    pub fn steps_taken(&self) -> usize {
        self.steps
    }

    pub fn is_over(&self) -> bool {
        self.phase == Phase::Finished
    }

    /// Seed passed to the most recent `reset`, if any.
    pub fn last_seed(&self) -> Option<u64> {
        self.last_seed
    }

    /// Starts a new episode. A supplied seed reseeds the stream first; a
    /// supplied instance is used verbatim, otherwise one is generated.
    pub fn reset(
        &mut self,
        seed: Option<u64>,
        instance: Option<T::Instance>,
    ) -> Result<T::Observation> {
        if let Some(seed) = seed {
            self.rng.reseed(seed);
        }
        self.last_seed = seed;
        let instance = match instance {
            Some(instance) => instance,
            None => self.task.generate(&mut self.rng)?,
        };
        self.task.load(instance)?;
        self.steps = 0;
        self.phase = if self.task.is_complete() {
            Phase::Finished
        } else {
            Phase::Running
        };
        Ok(self.task.observe())
    }

    pub fn step(&mut self, action: usize) -> Result<StepResult<T::Observation>> {
        match self.phase {
            Phase::Idle => return Err(Error::NotReset),
            Phase::Finished => return Err(Error::EpisodeOver),
            Phase::Running => {}
        }
        let transition = self.task.apply(action);
        self.steps += 1;
        let terminated = self.task.is_complete();
        let truncated = !terminated && self.steps >= self.task.step_budget();
        if terminated || truncated {
            self.phase = Phase::Finished;
        }
        let mut info = Info::new();
        info.insert("illegal_action".into(), transition.illegal.into());
        self.task.annotate(&mut info);
        Ok(StepResult {
            observation: self.task.observe(),
            reward: transition.reward,
            terminated,
            truncated,
            info,
        })
    }
}
