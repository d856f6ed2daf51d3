//! Qubit routing: walk over an interaction circuit and insert swaps until
//! every interaction sits on a coupling edge.
//!
//! Action 0 advances the position pointer; action `i` in `1..=|E_C|` swaps
//! the two logical qubits sitting on the `i`-th coupling edge (edges in
//! lexicographic order).

use serde::{Deserialize, Serialize};

use crate::env::{Env, Info, Observation, Task, Transition};
use crate::error::{Error, Result};
use crate::model::{Circuit, CouplingGraph, Edge, Gate, InteractionCircuit};
use crate::rng::RngStream;

pub const ADVANCE: usize = 0;

/// `length` interactions, each a uniformly drawn pair of distinct qubits.
pub fn generate_interaction_circuit(
    rng: &mut RngStream,
    n: usize,
    length: usize,
) -> Result<InteractionCircuit> {
    if n < 2 && length > 0 {
        return Err(Error::InvalidParameter(
            "interactions need at least two qubits".into(),
        ));
    }
    let pairs = (0..length)
        .map(|_| {
            let a = rng.below(n);
            let b = (a + 1 + rng.below(n - 1)) % n;
            (a.min(b), a.max(b))
        })
        .collect();
    InteractionCircuit::new(n, pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoutingRewards {
    pub advance: f64,
    pub swap: f64,
    pub illegal: f64,
}

impl Default for RoutingRewards {
    fn default() -> Self {
        Self {
            advance: 0.0,
            swap: -1.0,
            illegal: -5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoutingInstance {
    pub circuit: InteractionCircuit,
    /// Logical → physical placement at position 0; identity when absent.
    #[serde(default)]
    pub start_placement: Option<Vec<usize>>,
}

impl From<InteractionCircuit> for RoutingInstance {
    fn from(circuit: InteractionCircuit) -> Self {
        Self {
            circuit,
            start_placement: None,
        }
    }
}

/// A swap inserted before the interaction at `position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SwapRecord {
    pub position: usize,
    pub edge: Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum RoutedOp {
    Swap { a: usize, b: usize },
    Interaction { a: usize, b: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoutingObservation {
    /// Next interactions as physical pairs, padded with `(n, n)`.
    pub window: Vec<(usize, usize)>,
    pub position_fraction: f64,
    pub swap_count: usize,
}

impl Observation for RoutingObservation {
    fn key(&self) -> Vec<i64> {
        let mut key: Vec<i64> = self
            .window
            .iter()
            .flat_map(|&(a, b)| [a as i64, b as i64])
            .collect();
        key.push((self.position_fraction * 1e6).round() as i64);
        key.push(self.swap_count as i64);
        key
    }
}

#[derive(Debug, Clone)]
pub struct Routing {
    coupling: CouplingGraph,
    edges: Vec<Edge>,
    window_size: usize,
    length_range: (usize, usize),
    rewards: RoutingRewards,
    instance: RoutingInstance,
    position: usize,
    /// Logical → physical.
    placement: Vec<usize>,
    /// Physical → logical.
    occupant: Vec<usize>,
    swaps: Vec<SwapRecord>,
}

pub type RoutingEnv = Env<Routing>;

fn invert(placement: &[usize]) -> Vec<usize> {
    let mut occupant = vec![0; placement.len()];
    for (logical, &physical) in placement.iter().enumerate() {
        occupant[physical] = logical;
    }
    occupant
}

fn is_permutation(values: &[usize]) -> bool {
    let mut seen = vec![false; values.len()];
    values
        .iter()
        .all(|&v| v < seen.len() && !std::mem::replace(&mut seen[v], true))
}

impl Routing {
    pub fn new(coupling: CouplingGraph) -> Result<Self> {
        let n = coupling.n_nodes();
        if n < 2 {
            return Err(Error::InvalidParameter(
                "routing needs at least two qubits".into(),
            ));
        }
        Ok(Self {
            edges: coupling.edges().collect(),
            window_size: 4,
            length_range: (1, 10),
            rewards: RoutingRewards::default(),
            instance: InteractionCircuit::new(n, Vec::new())?.into(),
            position: 0,
            placement: (0..n).collect(),
            occupant: (0..n).collect(),
            swaps: Vec::new(),
            coupling,
        })
    }

    pub fn with_window_size(mut self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "window size must be positive".into(),
            ));
        }
        self.window_size = k;
        Ok(self)
    }

    pub fn with_length_range(mut self, min: usize, max: usize) -> Result<Self> {
        if min > max {
            return Err(Error::InvalidParameter(format!(
                "circuit length range ({min}, {max}) is empty"
            )));
        }
        self.length_range = (min, max);
        Ok(self)
    }

    pub fn with_rewards(mut self, rewards: RoutingRewards) -> Self {
        self.rewards = rewards;
        self
    }

    pub fn into_env(self, seed: u64) -> RoutingEnv {
        Env::new(self, seed)
    }

    pub fn n(&self) -> usize {
        self.coupling.n_nodes()
    }

    pub fn coupling(&self) -> &CouplingGraph {
        &self.coupling
    }

    /// Coupling edges in action order (action `i + 1` swaps `edges()[i]`).
    pub fn swap_edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn length_range(&self) -> (usize, usize) {
        self.length_range
    }

    pub fn rewards(&self) -> &RoutingRewards {
        &self.rewards
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn placement(&self) -> &[usize] {
        &self.placement
    }

    pub fn swaps(&self) -> &[SwapRecord] {
        &self.swaps
    }

    fn start_placement(&self) -> Vec<usize> {
        self.instance
            .start_placement
            .clone()
            .unwrap_or_else(|| (0..self.n()).collect())
    }

    fn current_is_executable(&self) -> bool {
        self.instance
            .circuit
            .pairs()
            .get(self.position)
            .is_some_and(|&(a, b)| self.coupling.has_edge(self.placement[a], self.placement[b]))
    }

    /// Physical-level result: at each position the swaps recorded there,
    /// then the interaction under the placement in effect.
    pub fn routed_output(&self) -> Result<Vec<RoutedOp>> {
        if !self.is_complete() {
            return Err(Error::NotTerminated);
        }
        let mut placement = self.start_placement();
        let mut occupant = invert(&placement);
        let mut swaps = self.swaps.iter().peekable();
        let mut out = Vec::with_capacity(self.instance.circuit.len() + self.swaps.len());
        for (position, &(a, b)) in self.instance.circuit.pairs().iter().enumerate() {
            while let Some(swap) = swaps.next_if(|s| s.position == position) {
                let (p, q) = swap.edge;
                occupant.swap(p, q);
                placement[occupant[p]] = p;
                placement[occupant[q]] = q;
                out.push(RoutedOp::Swap { a: p, b: q });
            }
            out.push(RoutedOp::Interaction {
                a: placement[a],
                b: placement[b],
            });
        }
        Ok(out)
    }

    /// Routed output as a physical circuit of `swap` and `cnot` gates.
    pub fn routed_circuit(&self) -> Result<Circuit> {
        let gates = self
            .routed_output()?
            .into_iter()
            .map(|op| match op {
                RoutedOp::Swap { a, b } => Gate::two("swap", a, b),
                RoutedOp::Interaction { a, b } => Gate::two("cnot", a, b),
            })
            .collect();
        Circuit::new(self.n(), gates)
    }
}

impl Task for Routing {
    type Observation = RoutingObservation;
    type Instance = RoutingInstance;

    fn action_count(&self) -> usize {
        self.edges.len() + 1
    }

    fn generate(&self, rng: &mut RngStream) -> Result<RoutingInstance> {
        let (min, max) = self.length_range;
        let length = rng.between(min, max);
        Ok(generate_interaction_circuit(rng, self.n(), length)?.into())
    }

    fn load(&mut self, instance: RoutingInstance) -> Result<()> {
        let n = self.n();
        if instance.circuit.n_qubits() != n {
            return Err(Error::IncompatibleInstance(format!(
                "interaction circuit has {} qubits, coupling graph {n}",
                instance.circuit.n_qubits()
            )));
        }
        if let Some(start) = &instance.start_placement {
            if start.len() != n || !is_permutation(start) {
                return Err(Error::IncompatibleInstance(
                    "start placement is not a bijection on the coupling graph's qubits".into(),
                ));
            }
        }
        self.instance = instance;
        self.position = 0;
        self.placement = self.start_placement();
        self.occupant = invert(&self.placement);
        self.swaps.clear();
        Ok(())
    }

    fn instance(&self) -> &RoutingInstance {
        &self.instance
    }

    fn apply(&mut self, action: usize) -> Transition {
        if action == ADVANCE {
            if !self.current_is_executable() {
                return Transition::illegal(self.rewards.illegal);
            }
            self.position += 1;
            return Transition::legal(self.rewards.advance);
        }
        let Some(&(p, q)) = self.edges.get(action - 1) else {
            return Transition::illegal(self.rewards.illegal);
        };
        self.occupant.swap(p, q);
        self.placement[self.occupant[p]] = p;
        self.placement[self.occupant[q]] = q;
        self.swaps.push(SwapRecord {
            position: self.position,
            edge: (p, q),
        });
        Transition::legal(self.rewards.swap)
    }

    fn observe(&self) -> RoutingObservation {
        let n = self.n();
        let pairs = self.instance.circuit.pairs();
        let window = (0..self.window_size)
            .map(|i| match pairs.get(self.position + i) {
                Some(&(a, b)) => (self.placement[a], self.placement[b]),
                None => (n, n),
            })
            .collect();
        let position_fraction = if pairs.is_empty() {
            1.0
        } else {
            self.position as f64 / pairs.len() as f64
        };
        RoutingObservation {
            window,
            position_fraction,
            swap_count: self.swaps.len(),
        }
    }

    fn is_complete(&self) -> bool {
        self.position == self.instance.circuit.len()
    }

    fn step_budget(&self) -> usize {
        4 * self.n() * self.n() * self.instance.circuit.len()
    }

    fn action_mask(&self) -> Vec<bool> {
        let mut mask = vec![true; self.action_count()];
        mask[ADVANCE] = self.current_is_executable();
        mask
    }

    fn annotate(&self, info: &mut Info) {
        info.insert(
            "action_mask".into(),
            serde_json::to_value(self.action_mask()).unwrap(),
        );
    }
}

/// Routed interactions that do not sit on a coupling edge.
pub fn unexecutable_ops(ops: &[RoutedOp], coupling: &CouplingGraph) -> Vec<usize> {
    ops.iter()
        .enumerate()
        .filter(|(_, op)| match **op {
            RoutedOp::Swap { a, b } | RoutedOp::Interaction { a, b } => !coupling.has_edge(a, b),
        })
        .map(|(i, _)| i)
        .collect()
}

/// Replays `ops` tracking which logical qubit sits on each physical line
/// and returns the logical pair behind every interaction.
pub fn replay_logical_pairs(ops: &[RoutedOp], start_placement: &[usize]) -> Vec<(usize, usize)> {
    let mut line = invert(start_placement);
    let mut pairs = Vec::new();
    for op in ops {
        match *op {
            RoutedOp::Swap { a, b } => line.swap(a, b),
            RoutedOp::Interaction { a, b } => pairs.push((line[a], line[b])),
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Graph;

    fn line3() -> CouplingGraph {
        CouplingGraph::new(Graph::line(3).unwrap()).unwrap()
    }

    fn env_with(pairs: Vec<(usize, usize)>) -> (RoutingEnv, RoutingInstance) {
        let env = Routing::new(line3()).unwrap().into_env(0);
        let inst = InteractionCircuit::new(3, pairs).unwrap().into();
        (env, inst)
    }

    #[test]
    fn advance_on_coupled_pair() {
        let (mut env, inst) = env_with(vec![(0, 1)]);
        env.reset(None, Some(inst)).unwrap();
        let step = env.step(ADVANCE).unwrap();
        assert_eq!(step.reward, 0.0);
        assert!(step.terminated);
    }

    #[test]
    fn swap_makes_distant_pair_executable() {
        let (mut env, inst) = env_with(vec![(0, 2)]);
        env.reset(None, Some(inst)).unwrap();
        let step = env.step(ADVANCE).unwrap();
        assert_eq!(step.reward, -5.0);
        assert_eq!(step.info["illegal_action"], true);
        assert_eq!(env.task().position(), 0);
        // edges: (0,1) -> 1, (1,2) -> 2
        let step = env.step(2).unwrap();
        assert_eq!(step.reward, -1.0);
        assert_eq!(step.observation.window[0], (0, 1));
        assert!(env.step(ADVANCE).unwrap().terminated);
    }

    #[test]
    fn swap_is_an_involution() {
        let (mut env, inst) = env_with(vec![(0, 2), (1, 2)]);
        env.reset(None, Some(inst)).unwrap();
        let before = env.task().placement().to_vec();
        env.step(1).unwrap();
        assert_ne!(env.task().placement(), before.as_slice());
        env.step(1).unwrap();
        assert_eq!(env.task().placement(), before.as_slice());
    }

    #[test]
    fn line_instance_routes_with_one_swap() {
        let (mut env, inst) = env_with(vec![(0, 1), (1, 2), (0, 2)]);
        env.reset(None, Some(inst.clone())).unwrap();
        for a in [ADVANCE, ADVANCE, 2, ADVANCE] {
            env.step(a).unwrap();
        }
        assert!(env.is_over());
        let out = env.task().routed_output().unwrap();
        assert_eq!(
            out,
            vec![
                RoutedOp::Interaction { a: 0, b: 1 },
                RoutedOp::Interaction { a: 1, b: 2 },
                RoutedOp::Swap { a: 1, b: 2 },
                RoutedOp::Interaction { a: 0, b: 1 },
            ]
        );
        assert!(unexecutable_ops(&out, &line3()).is_empty());
        assert_eq!(replay_logical_pairs(&out, &[0, 1, 2]), inst.circuit.pairs());
    }

    #[test]
    fn routed_output_before_end_is_an_error() {
        let (mut env, inst) = env_with(vec![(0, 1), (0, 2)]);
        env.reset(None, Some(inst)).unwrap();
        assert!(matches!(
            env.task().routed_output(),
            Err(Error::NotTerminated)
        ));
    }

    #[test]
    fn empty_circuit_is_done_at_reset() {
        let (mut env, inst) = env_with(vec![]);
        let obs = env.reset(None, Some(inst)).unwrap();
        assert!(env.is_over());
        assert_eq!(obs.window, vec![(3, 3); 4]);
        assert!(env.task().routed_output().unwrap().is_empty());
        assert!(matches!(env.step(ADVANCE), Err(Error::EpisodeOver)));
    }

    #[test]
    fn window_is_padded() {
        let (mut env, inst) = env_with(vec![(0, 1), (1, 2)]);
        let obs = env.reset(None, Some(inst)).unwrap();
        assert_eq!(obs.window, vec![(0, 1), (1, 2), (3, 3), (3, 3)]);
        assert_eq!(obs.position_fraction, 0.0);
    }

    #[test]
    fn start_placement_is_validated_and_used() {
        let (mut env, _) = env_with(vec![]);
        let bad = RoutingInstance {
            circuit: InteractionCircuit::new(3, vec![(0, 2)]).unwrap(),
            start_placement: Some(vec![0, 0, 1]),
        };
        assert!(env.reset(None, Some(bad)).is_err());
        let good = RoutingInstance {
            circuit: InteractionCircuit::new(3, vec![(0, 2)]).unwrap(),
            start_placement: Some(vec![0, 2, 1]),
        };
        let obs = env.reset(None, Some(good)).unwrap();
        assert_eq!(obs.window[0], (0, 1));
        assert!(env.action_mask()[ADVANCE]);
    }

    #[test]
    fn info_carries_legality_mask() {
        let (mut env, inst) = env_with(vec![(0, 2)]);
        env.reset(None, Some(inst)).unwrap();
        let step = env.step(9).unwrap();
        assert_eq!(step.info["illegal_action"], true);
        assert_eq!(
            step.info["action_mask"],
            serde_json::json!([false, true, true])
        );
    }

    #[test]
    fn generator_edge_cases() {
        let mut rng = RngStream::new(5);
        assert!(generate_interaction_circuit(&mut rng, 4, 0)
            .unwrap()
            .is_empty());
        let two = generate_interaction_circuit(&mut rng, 2, 50).unwrap();
        assert!(two.pairs().iter().all(|&p| p == (0, 1)));
        assert!(generate_interaction_circuit(&mut rng, 1, 1).is_err());
        assert!(generate_interaction_circuit(&mut rng, 1, 0).is_ok());
    }
}
