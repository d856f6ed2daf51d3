use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::graph::{normalize_edge, CouplingGraph, Edge, InteractionGraph};

/// Partial injection from logical to physical qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Option<usize>>", into = "Vec<Option<usize>>")]
pub struct Mapping {
    assignment: Vec<Option<usize>>,
}

impl TryFrom<Vec<Option<usize>>> for Mapping {
    type Error = Error;

    fn try_from(assignment: Vec<Option<usize>>) -> Result<Self> {
        Mapping::from_partial(assignment)
    }
}

impl From<Mapping> for Vec<Option<usize>> {
    fn from(mapping: Mapping) -> Self {
        mapping.assignment
    }
}

impl Mapping {
    pub fn empty(n: usize) -> Self {
        Self {
            assignment: vec![None; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            assignment: (0..n).map(Some).collect(),
        }
    }

    /// Complete mapping from `assignment[logical] = physical`.
    pub fn from_permutation(assignment: &[usize]) -> Result<Self> {
        Self::from_partial(assignment.iter().copied().map(Some).collect())
    }

    pub fn from_partial(assignment: Vec<Option<usize>>) -> Result<Self> {
        let n = assignment.len();
        let mut used = vec![false; n];
        for physical in assignment.iter().flatten() {
            if *physical >= n {
                return Err(Error::InvalidMapping(format!(
                    "physical qubit {physical} out of range for {n} qubits"
                )));
            }
            if std::mem::replace(&mut used[*physical], true) {
                return Err(Error::InvalidMapping(format!(
                    "physical qubit {physical} assigned twice"
                )));
            }
        }
        Ok(Self { assignment })
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn get(&self, logical: usize) -> Option<usize> {
        self.assignment.get(logical).copied().flatten()
    }

    pub fn is_mapped(&self, logical: usize) -> bool {
        self.get(logical).is_some()
    }

    pub fn is_used(&self, physical: usize) -> bool {
        self.assignment.contains(&Some(physical))
    }

    pub fn assigned_count(&self) -> usize {
        self.assignment.iter().flatten().count()
    }

    pub fn is_complete(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    /// Records `logical → physical`, refusing anything that would break injectivity.
    pub fn assign(&mut self, logical: usize, physical: usize) -> Result<()> {
        let n = self.len();
        if logical >= n || physical >= n {
            return Err(Error::InvalidMapping(format!(
                "({logical} -> {physical}) out of range for {n} qubits"
            )));
        }
        if self.is_mapped(logical) {
            return Err(Error::InvalidMapping(format!(
                "logical qubit {logical} already mapped"
            )));
        }
        if self.is_used(physical) {
            return Err(Error::InvalidMapping(format!(
                "physical qubit {physical} already used"
            )));
        }
        self.assignment[logical] = Some(physical);
        Ok(())
    }

    /// The bijection as a plain array, or an error while partial.
    pub fn to_permutation(&self) -> Result<Vec<usize>> {
        self.assignment
            .iter()
            .copied()
            .collect::<Option<Vec<_>>>()
            .ok_or(Error::IncompleteMapping {
                unmapped: self.len() - self.assigned_count(),
            })
    }
}

/// `{ {f(u), f(v)} : {u, v} ∈ E_I }`.
pub fn mapped_edges(mapping: &Mapping, ig: &InteractionGraph) -> Result<BTreeSet<Edge>> {
    if mapping.len() != ig.n_nodes() {
        return Err(Error::NodeCountMismatch {
            expected: ig.n_nodes(),
            found: mapping.len(),
        });
    }
    let f = mapping.to_permutation()?;
    Ok(ig
        .edges()
        .map(|(u, v)| normalize_edge(f[u], f[v]))
        .collect())
}

/// Number of mapped interaction edges with no coupling edge underneath.
pub fn mapping_cost(mapping: &Mapping, ig: &InteractionGraph, cg: &CouplingGraph) -> Result<usize> {
    if ig.n_nodes() != cg.n_nodes() {
        return Err(Error::NodeCountMismatch {
            expected: cg.n_nodes(),
            found: ig.n_nodes(),
        });
    }
    Ok(mapped_edges(mapping, ig)?.difference(cg.edge_set()).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Graph;

    #[test]
    fn identity_preserves_edges() {
        let ig = InteractionGraph::from_edges(4, [(0, 1), (2, 3), (1, 3)]).unwrap();
        assert_eq!(
            &mapped_edges(&Mapping::identity(4), &ig).unwrap(),
            ig.edge_set()
        );
    }

    #[test]
    fn relabeling() {
        let ig = InteractionGraph::from_edges(3, [(0, 2)]).unwrap();
        let m = Mapping::from_permutation(&[1, 0, 2]).unwrap();
        assert_eq!(mapped_edges(&m, &ig).unwrap(), BTreeSet::from([(1, 2)]));
    }

    #[test]
    fn triangle_stays_triangle() {
        let ig = InteractionGraph::new(Graph::complete(3).unwrap());
        let m = Mapping::from_permutation(&[2, 0, 1]).unwrap();
        assert_eq!(&mapped_edges(&m, &ig).unwrap(), ig.edge_set());
    }

    #[test]
    fn partial_mapping_is_rejected() {
        let ig = InteractionGraph::from_edges(2, [(0, 1)]).unwrap();
        let mut m = Mapping::empty(2);
        m.assign(0, 1).unwrap();
        assert_eq!(
            mapped_edges(&m, &ig).unwrap_err(),
            Error::IncompleteMapping { unmapped: 1 }
        );
    }

    #[test]
    fn star_to_itself_costs_nothing() {
        let cg = CouplingGraph::new(Graph::star(4).unwrap()).unwrap();
        let ig = InteractionGraph::from(&cg);
        assert_eq!(mapping_cost(&Mapping::identity(4), &ig, &cg).unwrap(), 0);
    }

    #[test]
    fn edgeless_interaction_costs_nothing() {
        let cg = CouplingGraph::new(Graph::line(4).unwrap()).unwrap();
        let ig = InteractionGraph::new(Graph::edgeless(4).unwrap());
        let m = Mapping::from_permutation(&[3, 1, 0, 2]).unwrap();
        assert_eq!(mapping_cost(&m, &ig, &cg).unwrap(), 0);
    }

    #[test]
    fn node_count_mismatch() {
        let cg = CouplingGraph::new(Graph::line(3).unwrap()).unwrap();
        let ig = InteractionGraph::new(Graph::edgeless(4).unwrap());
        assert!(matches!(
            mapping_cost(&Mapping::identity(4), &ig, &cg),
            Err(Error::NodeCountMismatch { .. })
        ));
    }

    #[test]
    fn injectivity_is_enforced() {
        let mut m = Mapping::empty(3);
        m.assign(0, 2).unwrap();
        assert!(m.assign(0, 1).is_err());
        assert!(m.assign(1, 2).is_err());
        assert!(Mapping::from_permutation(&[0, 0, 1]).is_err());
        assert_eq!(m.assigned_count(), 1);
    }

    #[test]
    fn serializes_as_assignment_list() {
        let m = Mapping::from_partial(vec![Some(1), None]).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(text, "[1,null]");
        assert_eq!(serde_json::from_str::<Mapping>(&text).unwrap(), m);
        assert!(serde_json::from_str::<Mapping>("[0,0]").is_err());
    }
}
