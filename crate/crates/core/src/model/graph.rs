use std::collections::{BTreeSet, VecDeque};
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Circuit;

/// Unordered edge, stored with the smaller endpoint first.
pub type Edge = (usize, usize);

pub fn normalize_edge(a: usize, b: usize) -> Edge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Undirected simple graph over `0..n_nodes`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph")]
pub struct Graph {
    n_nodes: usize,
    edges: BTreeSet<Edge>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGraph {
    n_nodes: usize,
    edges: Vec<Edge>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;

    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.n_nodes, raw.edges)
    }
}

impl Graph {
    /// Duplicate edges (in either orientation) collapse into one.
    pub fn new(n_nodes: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::InvalidGraph("graph needs at least one node".into()));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop on node {a}")));
            }
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) leaves the {n_nodes}-node vertex set"
                )));
            }
            set.insert(normalize_edge(a, b));
        }
        Ok(Self {
            n_nodes,
            edges: set,
        })
    }

    pub fn edgeless(n_nodes: usize) -> Result<Self> {
        Self::new(n_nodes, [])
    }

    pub fn complete(n_nodes: usize) -> Result<Self> {
        Self::new(
            n_nodes,
            (0..n_nodes).flat_map(|a| (a + 1..n_nodes).map(move |b| (a, b))),
        )
    }

    /// Node 0 joined to every other node.
    pub fn star(n_nodes: usize) -> Result<Self> {
        Self::new(n_nodes, (1..n_nodes).map(|b| (0, b)))
    }

    pub fn line(n_nodes: usize) -> Result<Self> {
        Self::new(n_nodes, (1..n_nodes).map(|b| (b - 1, b)))
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.edges.contains(&normalize_edge(a, b))
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == node {
                Some(b)
            } else if b == node {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n_nodes];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(node) = queue.pop_front() {
            for next in self.neighbors(node) {
                if !seen[next] {
                    seen[next] = true;
                    queue.push_back(next);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Flattened `n × n` 0/1 matrix with only the upper triangle (`i < j`) set.
    pub fn upper_adjacency(&self) -> Vec<u8> {
        let n = self.n_nodes;
        let mut out = vec![0; n * n];
        for &(a, b) in &self.edges {
            out[a * n + b] = 1;
        }
        out
    }
}

/// Hardware connectivity between physical qubits. Always connected.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Graph", into = "Graph")]
pub struct CouplingGraph(Graph);

impl CouplingGraph {
    pub fn new(graph: Graph) -> Result<Self> {
        if !graph.is_connected() {
            return Err(Error::InvalidGraph(
                "coupling graph must be connected".into(),
            ));
        }
        Ok(Self(graph))
    }

    pub fn from_edges(n_nodes: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        Self::new(Graph::new(n_nodes, edges)?)
    }

    pub fn graph(&self) -> &Graph {
        &self.0
    }
}

impl Deref for CouplingGraph {
    type Target = Graph;

    fn deref(&self) -> &Graph {
        &self.0
    }
}

impl TryFrom<Graph> for CouplingGraph {
    type Error = Error;

    fn try_from(graph: Graph) -> Result<Self> {
        Self::new(graph)
    }
}

impl From<CouplingGraph> for Graph {
    fn from(cg: CouplingGraph) -> Graph {
        cg.0
    }
}

/// Which logical qubits interact in a circuit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Graph", into = "Graph")]
pub struct InteractionGraph(Graph);

impl InteractionGraph {
    pub fn new(graph: Graph) -> Self {
        Self(graph)
    }

    pub fn from_edges(n_nodes: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        Ok(Self(Graph::new(n_nodes, edges)?))
    }

    pub fn graph(&self) -> &Graph {
        &self.0
    }
}

impl Deref for InteractionGraph {
    type Target = Graph;

    fn deref(&self) -> &Graph {
        &self.0
    }
}

impl From<Graph> for InteractionGraph {
    fn from(graph: Graph) -> Self {
        Self(graph)
    }
}

impl From<InteractionGraph> for Graph {
    fn from(ig: InteractionGraph) -> Graph {
        ig.0
    }
}

impl From<&CouplingGraph> for InteractionGraph {
    fn from(cg: &CouplingGraph) -> Self {
        Self(cg.graph().clone())
    }
}

/// Edge `{u, v}` for every two-qubit gate acting on `u` and `v`.
pub fn interaction_graph_of(circuit: &Circuit) -> InteractionGraph {
    let edges = circuit
        .gates()
        .iter()
        .filter(|g| g.is_two_qubit())
        .map(|g| (g.operands()[0], g.operands()[1]));
    InteractionGraph(Graph::new(circuit.n_qubits(), edges).expect("circuit operands are in range"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Gate;

    #[test]
    fn triangle_from_three_cnots() {
        let circuit = Circuit::new(
            3,
            vec![
                Gate::two("cnot", 0, 1),
                Gate::two("cnot", 1, 2),
                Gate::two("cnot", 0, 2),
            ],
        )
        .unwrap();
        let ig = interaction_graph_of(&circuit);
        assert_eq!(ig.edge_set(), Graph::complete(3).unwrap().edge_set());
    }

    #[test]
    fn single_qubit_gates_give_no_edges() {
        let circuit = Circuit::new(
            2,
            vec![
                Gate::single("x", 0),
                Gate::single("h", 1),
                Gate::single("measure", 0),
            ],
        )
        .unwrap();
        assert_eq!(interaction_graph_of(&circuit).edge_count(), 0);
    }

    #[test]
    fn repeated_interaction_is_one_edge() {
        let circuit = Circuit::new(2, vec![Gate::two("cnot", 0, 1); 5]).unwrap();
        let ig = interaction_graph_of(&circuit);
        assert_eq!(ig.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn graph_validation() {
        assert!(Graph::new(3, [(1, 1)]).is_err());
        assert!(Graph::new(3, [(0, 3)]).is_err());
        assert!(Graph::new(0, []).is_err());
        assert_eq!(Graph::new(3, [(0, 1), (1, 0)]).unwrap().edge_count(), 1);
        assert!(CouplingGraph::from_edges(3, [(0, 1)]).is_err());
        assert!(CouplingGraph::from_edges(1, []).is_ok());
    }

    #[test]
    fn upper_adjacency_layout() {
        let g = Graph::line(3).unwrap();
        assert_eq!(g.upper_adjacency(), vec![0, 1, 0, 0, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn deserialization_validates() {
        let g: Graph = serde_json::from_str(r#"{"n_nodes":3,"edges":[[1,0],[1,2]]}"#).unwrap();
        assert_eq!(g, Graph::line(3).unwrap());
        assert!(serde_json::from_str::<Graph>(r#"{"n_nodes":2,"edges":[[0,0]]}"#).is_err());
        assert!(serde_json::from_str::<CouplingGraph>(r#"{"n_nodes":3,"edges":[[0,1]]}"#).is_err());
    }
}
