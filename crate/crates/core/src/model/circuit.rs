use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gate names that act on two qubits. Every other name is treated as a
/// single-qubit operation by the random generators.
pub const TWO_QUBIT_GATES: &[&str] = &["cnot", "cx", "cz", "swap"];

/// Number of operands a gate with this name takes.
pub fn gate_arity(name: &str) -> usize {
    if TWO_QUBIT_GATES.contains(&name) {
        2
    } else {
        1
    }
}

/// A named operation on one or two qubits. For two-qubit gates the first
/// operand is the control and the second the target.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGate")]
pub struct Gate {
    name: String,
    operands: Vec<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGate {
    name: String,
    operands: Vec<usize>,
}

impl TryFrom<RawGate> for Gate {
    type Error = Error;

    fn try_from(raw: RawGate) -> Result<Self> {
        Gate::new(raw.name, raw.operands)
    }
}

impl Gate {
    pub fn new(name: impl Into<String>, operands: impl Into<Vec<usize>>) -> Result<Self> {
        let name = name.into();
        let operands = operands.into();
        if name.is_empty() {
            return Err(Error::InvalidGate("empty gate name".into()));
        }
        match operands.as_slice() {
            [_] => {}
            [a, b] if a != b => {}
            [a, _] => {
                return Err(Error::InvalidGate(format!(
                    "`{name}` acts twice on qubit {a}"
                )))
            }
            _ => {
                return Err(Error::InvalidGate(format!(
                    "`{name}` has {} operands, expected 1 or 2",
                    operands.len()
                )))
            }
        }
        Ok(Self { name, operands })
    }

    pub fn single(name: impl Into<String>, qubit: usize) -> Self {
        Self::new(name, vec![qubit]).expect("single-qubit gate is always valid")
    }

    /// Panics when `control == target`.
    pub fn two(name: impl Into<String>, control: usize, target: usize) -> Self {
        Self::new(name, vec![control, target]).expect("operands must be distinct")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn operands(&self) -> &[usize] {
        &self.operands
    }

    pub fn is_two_qubit(&self) -> bool {
        self.operands.len() == 2
    }

    pub fn acts_on(&self, qubit: usize) -> bool {
        self.operands.contains(&qubit)
    }

    pub fn shares_qubit(&self, other: &Gate) -> bool {
        self.operands.iter().any(|q| other.acts_on(*q))
    }
}

/// An ordered gate list over `n_qubits` logical qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Self> {
        Circuit::new(raw.n_qubits, raw.gates)
    }
}

impl Circuit {
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidCircuit(
                "circuit needs at least one qubit".into(),
            ));
        }
        for (i, gate) in gates.iter().enumerate() {
            if let Some(q) = gate.operands().iter().find(|&&q| q >= n_qubits) {
                return Err(Error::InvalidCircuit(format!(
                    "gate {i} (`{}`) uses qubit {q} but the circuit has {n_qubits}",
                    gate.name()
                )));
            }
        }
        Ok(Self { n_qubits, gates })
    }

    pub fn empty(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, Vec::new())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Same gates over a (possibly) larger register.
    pub fn widened(&self, n_qubits: usize) -> Result<Self> {
        if n_qubits < self.n_qubits {
            return Err(Error::InvalidCircuit(format!(
                "cannot shrink a {}-qubit circuit to {n_qubits} qubits",
                self.n_qubits
            )));
        }
        Ok(Self {
            n_qubits,
            gates: self.gates.clone(),
        })
    }
}
