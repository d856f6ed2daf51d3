//! Reinforcement-learning environments for quantum circuit compilation.
//!
//! Three environments share one episode kernel ([`env::Env`]):
//!
//! - [`envs::mapping`]: place logical qubits on a fixed hardware coupling graph.
//! - [`envs::routing`]: insert swaps so every interaction becomes executable.
//! - [`envs::scheduling`]: assign start cycles back to front under
//!   commutation rules, gate durations and exclusion classes.
//!
//! [`oracles`] holds exhaustive reference solvers and the ALAP baseline,
//! [`agents`] small tabular and heuristic policies.

pub mod agents;
pub mod env;
pub mod envs;
mod error;
pub mod formats;
pub mod model;
pub mod oracles;
pub mod render;
pub mod rng;

pub use error::{Error, Result};
