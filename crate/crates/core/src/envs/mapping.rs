//! Initial mapping: assign logical qubits to physical qubits one pair at a
//! time so that as many interaction edges as possible land on coupling edges.
//!
//! The coupling graph is fixed for the lifetime of the environment; each
//! episode draws a fresh interaction graph. Action `l * n + p` maps logical
//! qubit `l` to physical qubit `p`.

use serde::{Deserialize, Serialize};

use crate::env::{Env, Observation, Task, Transition};
use crate::error::{Error, Result};
use crate::model::{mapping_cost, CouplingGraph, Graph, InteractionGraph, Mapping};
use crate::rng::RngStream;

/// Erdős–Rényi `G(n, p)` draw.
pub fn generate_interaction_graph(
    rng: &mut RngStream,
    n: usize,
    edge_probability: f64,
) -> Result<InteractionGraph> {
    check_probability(edge_probability)?;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "interaction graph needs n >= 1".into(),
        ));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.bernoulli(edge_probability) {
                edges.push((a, b));
            }
        }
    }
    InteractionGraph::from_edges(n, edges)
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "edge probability {p} outside [0, 1]"
        )))
    }
}

/// Dense shaping: every interaction edge is scored once, when its second
/// endpoint gets mapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MappingRewards {
    /// Per interaction edge realized on a coupling edge.
    pub on_coupling: f64,
    /// Subtracted per interaction edge realized off the coupling graph.
    pub penalty_weight: f64,
    pub illegal: f64,
    pub completion_bonus: f64,
}

impl Default for MappingRewards {
    fn default() -> Self {
        Self {
            on_coupling: 1.0,
            penalty_weight: 1.0,
            illegal: -5.0,
            completion_bonus: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappingObservation {
    /// Physical qubit per logical qubit, `n` while unmapped.
    pub mapping_vector: Vec<usize>,
    /// 1 for physical qubits already taken.
    pub mapped_flags: Vec<u8>,
    pub interaction_adjacency: Vec<u8>,
    pub coupling_adjacency: Vec<u8>,
}

impl Observation for MappingObservation {
    fn key(&self) -> Vec<i64> {
        self.mapping_vector
            .iter()
            .map(|&v| v as i64)
            .chain(self.mapped_flags.iter().map(|&v| v as i64))
            .chain(self.interaction_adjacency.iter().map(|&v| v as i64))
            .chain(self.coupling_adjacency.iter().map(|&v| v as i64))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MappingAction {
    pub logical: usize,
    pub physical: usize,
}

impl MappingAction {
    pub fn encode(self, n: usize) -> usize {
        self.logical * n + self.physical
    }

    pub fn decode(code: usize, n: usize) -> Option<Self> {
        (code < n * n).then(|| Self {
            logical: code / n,
            physical: code % n,
        })
    }
}

#[derive(Debug, Clone)]
pub struct InitialMapping {
    coupling: CouplingGraph,
    coupling_adjacency: Vec<u8>,
    edge_probability: f64,
    rewards: MappingRewards,
    interaction: InteractionGraph,
    mapping: Mapping,
}

pub type InitialMappingEnv = Env<InitialMapping>;

impl InitialMapping {
    pub fn new(edge_probability: f64, coupling: CouplingGraph) -> Result<Self> {
        check_probability(edge_probability)?;
        let n = coupling.n_nodes();
        Ok(Self {
            coupling_adjacency: coupling.upper_adjacency(),
            interaction: InteractionGraph::new(Graph::edgeless(n)?),
            mapping: Mapping::empty(n),
            coupling,
            edge_probability,
            rewards: MappingRewards::default(),
        })
    }

    pub fn with_rewards(mut self, rewards: MappingRewards) -> Self {
        self.rewards = rewards;
        self
    }

    pub fn into_env(self, seed: u64) -> InitialMappingEnv {
        Env::new(self, seed)
    }

    pub fn n(&self) -> usize {
        self.coupling.n_nodes()
    }

    pub fn coupling(&self) -> &CouplingGraph {
        &self.coupling
    }

    pub fn interaction(&self) -> &InteractionGraph {
        &self.interaction
    }

    pub fn mapping(&self) -> &Mapping {
        &self.mapping
    }

    pub fn rewards(&self) -> &MappingRewards {
        &self.rewards
    }

    pub fn edge_probability(&self) -> f64 {
        self.edge_probability
    }

    /// Cost of the finished bijection.
    pub fn episode_cost(&self) -> Result<usize> {
        mapping_cost(&self.mapping, &self.interaction, &self.coupling)
    }
}

impl Task for InitialMapping {
    type Observation = MappingObservation;
    type Instance = InteractionGraph;

    fn action_count(&self) -> usize {
        self.n() * self.n()
    }

    fn generate(&self, rng: &mut RngStream) -> Result<InteractionGraph> {
        generate_interaction_graph(rng, self.n(), self.edge_probability)
    }

    fn load(&mut self, instance: InteractionGraph) -> Result<()> {
        if instance.n_nodes() != self.n() {
            return Err(Error::IncompatibleInstance(format!(
                "interaction graph has {} nodes, coupling graph {}",
                instance.n_nodes(),
                self.n()
            )));
        }
        self.interaction = instance;
        self.mapping = Mapping::empty(self.n());
        Ok(())
    }

    fn instance(&self) -> &InteractionGraph {
        &self.interaction
    }

    fn apply(&mut self, action: usize) -> Transition {
        let n = self.n();
        let Some(MappingAction { logical, physical }) = MappingAction::decode(action, n) else {
            return Transition::illegal(self.rewards.illegal);
        };
        if self.mapping.assign(logical, physical).is_err() {
            return Transition::illegal(self.rewards.illegal);
        }
        let mut reward = 0.0;
        for other in self.interaction.neighbors(logical) {
            if let Some(p) = self.mapping.get(other) {
                if self.coupling.has_edge(physical, p) {
                    reward += self.rewards.on_coupling;
                } else {
                    reward -= self.rewards.penalty_weight;
                }
            }
        }
        if self.mapping.is_complete() {
            reward += self.rewards.completion_bonus;
        }
        Transition::legal(reward)
    }

    fn observe(&self) -> MappingObservation {
        let n = self.n();
        let mut mapped_flags = vec![0; n];
        for p in self.mapping.assignment().iter().flatten() {
            mapped_flags[*p] = 1;
        }
        MappingObservation {
            mapping_vector: self
                .mapping
                .assignment()
                .iter()
                .map(|p| p.unwrap_or(n))
                .collect(),
            mapped_flags,
            interaction_adjacency: self.interaction.upper_adjacency(),
            coupling_adjacency: self.coupling_adjacency.clone(),
        }
    }

    fn is_complete(&self) -> bool {
        self.mapping.is_complete()
    }

    fn step_budget(&self) -> usize {
        10 * self.n()
    }

    fn action_mask(&self) -> Vec<bool> {
        let n = self.n();
        (0..n * n)
            .map(|code| {
                let (l, p) = (code / n, code % n);
                !self.mapping.is_mapped(l) && !self.mapping.is_used(p)
            })
            .collect()
    }
}
