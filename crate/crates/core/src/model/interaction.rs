use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Circuit;

/// Two-qubit interactions of a circuit, in circuit order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInteractionCircuit")]
pub struct InteractionCircuit {
    n_qubits: usize,
    pairs: Vec<(usize, usize)>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInteractionCircuit {
    n_qubits: usize,
    pairs: Vec<(usize, usize)>,
}

impl TryFrom<RawInteractionCircuit> for InteractionCircuit {
    type Error = Error;

    fn try_from(raw: RawInteractionCircuit) -> Result<Self> {
        InteractionCircuit::new(raw.n_qubits, raw.pairs)
    }
}

impl InteractionCircuit {
    pub fn new(n_qubits: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if a == b || a >= n_qubits || b >= n_qubits {
                return Err(Error::InvalidCircuit(format!(
                    "interaction {i} ({a}, {b}) is not a pair of distinct qubits below {n_qubits}"
                )));
            }
        }
        Ok(Self { n_qubits, pairs })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn interaction_circuit_of(circuit: &Circuit) -> InteractionCircuit {
    let pairs = circuit
        .gates()
        .iter()
        .filter(|g| g.is_two_qubit())
        .map(|g| (g.operands()[0], g.operands()[1]))
        .collect();
    InteractionCircuit {
        n_qubits: circuit.n_qubits(),
        pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Gate;

    #[test]
    fn drops_single_qubit_gates() {
        let c = Circuit::new(
            2,
            vec![
                Gate::single("x", 0),
                Gate::two("cnot", 0, 1),
                Gate::single("measure", 1),
            ],
        )
        .unwrap();
        assert_eq!(interaction_circuit_of(&c).pairs(), &[(0, 1)]);
        let c = Circuit::new(1, vec![Gate::single("h", 0)]).unwrap();
        assert!(interaction_circuit_of(&c).is_empty());
    }

    #[test]
    fn keeps_circuit_order() {
        let c = Circuit::new(
            3,
            vec![
                Gate::two("cnot", 0, 1),
                Gate::two("cnot", 1, 2),
                Gate::two("cnot", 0, 2),
            ],
        )
        .unwrap();
        assert_eq!(
            interaction_circuit_of(&c).pairs(),
            &[(0, 1), (1, 2), (0, 2)]
        );
    }

    #[test]
    fn rejects_bad_pairs() {
        assert!(InteractionCircuit::new(2, vec![(0, 0)]).is_err());
        assert!(InteractionCircuit::new(2, vec![(0, 2)]).is_err());
    }
}
