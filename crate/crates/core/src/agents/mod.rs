//! Desk-scale agents: tabular Q-learning plus a few fixed policies.

mod log;
mod policies;
mod q_learning;

pub use log::{EpisodeRecord, TrainingLog};
pub use policies::{
    greedy_scheduling_policy, masked_random_policy, GreedyScheduling, MaskedRandom,
};
pub use q_learning::{q_learning_train, QLearningParams, QPolicy, QTable};
