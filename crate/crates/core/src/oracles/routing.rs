use std::collections::{HashMap, VecDeque};
use web_time::Instant;

use serde::Serialize;

use super::{OracleLimits, OracleResult};
use crate::envs::routing::{SwapRecord, ADVANCE};
use crate::error::{Error, Result};
use crate::model::{CouplingGraph, InteractionCircuit};

/// Minimal swap sequence, also as routing-environment action codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoutingWitness {
    pub swaps: Vec<SwapRecord>,
    pub actions: Vec<usize>,
}

pub fn optimal_routing(
    circuit: &InteractionCircuit,
    cg: &CouplingGraph,
    start_placement: Option<&[usize]>,
) -> Result<OracleResult<RoutingWitness>> {
    optimal_routing_with(circuit, cg, start_placement, &OracleLimits::default())
}

type State = (usize, Vec<usize>);

/// Uniform-cost search over `(position, placement)`: advancing is free when
/// the current interaction is executable, each swap costs one.
pub fn optimal_routing_with(
    circuit: &InteractionCircuit,
    cg: &CouplingGraph,
    start_placement: Option<&[usize]>,
    limits: &OracleLimits,
) -> Result<OracleResult<RoutingWitness>> {
    let n = cg.n_nodes();
    if circuit.n_qubits() != n {
        return Err(Error::NodeCountMismatch {
            expected: n,
            found: circuit.n_qubits(),
        });
    }
    if n > limits.routing_nodes {
        return Err(Error::OracleBound {
            problem: "routing node count",
            limit: limits.routing_nodes,
            found: n,
        });
    }
    if circuit.len() > limits.routing_length {
        return Err(Error::OracleBound {
            problem: "routing circuit length",
            limit: limits.routing_length,
            found: circuit.len(),
        });
    }
    let started = Instant::now();
    let edges: Vec<(usize, usize)> = cg.edges().collect();
    let placement: Vec<usize> = match start_placement {
        Some(p) => p.to_vec(),
        None => (0..n).collect(),
    };
    let pairs = circuit.pairs();

    // 0-1 BFS; parents record (previous state, action code).
    let start: State = (0, placement);
    let mut dist: HashMap<State, u64> = HashMap::from([(start.clone(), 0)]);
    let mut parent: HashMap<State, (State, usize)> = HashMap::new();
    let mut queue = VecDeque::from([(0u64, start)]);
    let mut explored = 0u64;
    let goal = loop {
        let Some((d, state)) = queue.pop_front() else {
            unreachable!("connected coupling graphs can always be routed");
        };
        if dist.get(&state).is_some_and(|&best| best < d) {
            continue;
        }
        explored += 1;
        let (position, placement) = &state;
        if *position == pairs.len() {
            break (d, state);
        }
        let (a, b) = pairs[*position];
        let mut relax =
            |next: State, cost: u64, action: usize, queue: &mut VecDeque<(u64, State)>| {
                let nd = d + cost;
                if dist.get(&next).is_none_or(|&old| nd < old) {
                    dist.insert(next.clone(), nd);
                    parent.insert(next.clone(), (state.clone(), action));
                    if cost == 0 {
                        queue.push_front((nd, next));
                    } else {
                        queue.push_back((nd, next));
                    }
                }
            };
        if cg.has_edge(placement[a], placement[b]) {
            relax((position + 1, placement.clone()), 0, ADVANCE, &mut queue);
        }
        for (i, &(p, q)) in edges.iter().enumerate() {
            let mut next = placement.clone();
            for slot in next.iter_mut() {
                if *slot == p {
                    *slot = q;
                } else if *slot == q {
                    *slot = p;
                }
            }
            relax((*position, next), 1, i + 1, &mut queue);
        }
    };

    let (objective, mut state) = goal;
    let mut actions = Vec::new();
    let mut swaps = Vec::new();
    while let Some((prev, action)) = parent.get(&state) {
        actions.push(*action);
        if *action != ADVANCE {
            swaps.push(SwapRecord {
                position: prev.0,
                edge: edges[action - 1],
            });
        }
        state = prev.clone();
    }
    actions.reverse();
    swaps.reverse();
    Ok(OracleResult {
        objective,
        witness: RoutingWitness { swaps, actions },
        nodes_explored: explored,
        elapsed: started.elapsed(),
    })
}
