//! Domain types shared by every environment.

mod circuit;
mod commutation;
mod graph;
mod interaction;
mod machine;
mod mapping;
mod schedule;

pub use circuit::{gate_arity, Circuit, Gate, TWO_QUBIT_GATES};
pub use commutation::{dependency_dag, CommutationRules, DependencyDag, Role, RuleSide};
pub use graph::{
    interaction_graph_of, normalize_edge, CouplingGraph, Edge, Graph, InteractionGraph,
};
pub use interaction::{interaction_circuit_of, InteractionCircuit};
pub use machine::MachineProperties;
pub use mapping::{mapped_edges, mapping_cost, Mapping};
pub use schedule::{is_valid_schedule, Schedule, ScheduleReport, Violation};
