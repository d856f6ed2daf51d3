//! Reference solvers: the ALAP list scheduler and exhaustive oracles for
//! all three problems. Oracles refuse instances above their size bounds
//! rather than approximating.

mod alap;
mod mapping;
mod routing;
mod schedule;

use std::time::Duration;

use serde::Serialize;

pub use alap::alap_schedule;
pub use mapping::{optimal_mapping, optimal_mapping_with};
pub use routing::{optimal_routing, optimal_routing_with, RoutingWitness};
pub use schedule::{optimal_schedule, optimal_schedule_with};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleLimits {
    pub mapping_nodes: usize,
    pub routing_nodes: usize,
    pub routing_length: usize,
    pub schedule_gates: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            mapping_nodes: 8,
            routing_nodes: 5,
            routing_length: 8,
            schedule_gates: 6,
        }
    }
}

/// Optimum found by an oracle together with a witness reaching it.
#[derive(Debug, Clone, Serialize)]
pub struct OracleResult<W> {
    pub objective: u64,
    pub witness: W,
    pub nodes_explored: u64,
    /// Wall-clock time; left out of serialized records so they stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}
