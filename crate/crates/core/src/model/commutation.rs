use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{Circuit, Gate};

/// How a gate touches one of its qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Control,
    Target,
    Single,
}

impl Role {
    pub fn of(gate: &Gate, qubit: usize) -> Option<Role> {
        match gate.operands() {
            [q] if *q == qubit => Some(Role::Single),
            [c, _] if *c == qubit => Some(Role::Control),
            [_, t] if *t == qubit => Some(Role::Target),
            _ => None,
        }
    }
}

/// One side of a commutation rule: a gate name and the role of the shared qubit.
pub type RuleSide = (String, Role);

/// Pairs of (gate, role) that commute when they meet on a shared qubit.
///
/// Two gates commute when they act on disjoint qubits, or when every qubit
/// they share is covered by a rule. Rules are unordered, so the relation is
/// symmetric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutationRules {
    rules: BTreeSet<(RuleSide, RuleSide)>,
    /// A gate always commutes with an identical copy of itself.
    #[serde(default)]
    identical_gates_commute: bool,
}

impl CommutationRules {
    /// No rules at all: every pair sharing a qubit is ordered.
    pub fn empty() -> Self {
        Self {
            rules: BTreeSet::new(),
            identical_gates_commute: false,
        }
    }

    pub fn standard() -> Self {
        Self::empty()
            .with_rule("x", Role::Single, "cnot", Role::Target)
            .with_rule("z", Role::Single, "cnot", Role::Control)
            .with_rule("z", Role::Single, "z", Role::Single)
            .with_rule("cnot", Role::Control, "cnot", Role::Control)
            .with_identical_gates_commuting(true)
    }

    pub fn with_rule(
        mut self,
        first: &str,
        first_role: Role,
        second: &str,
        second_role: Role,
    ) -> Self {
        self.insert(first, first_role, second, second_role);
        self
    }

    pub fn with_identical_gates_commuting(mut self, on: bool) -> Self {
        self.identical_gates_commute = on;
        self
    }

    pub fn insert(&mut self, first: &str, first_role: Role, second: &str, second_role: Role) {
        self.rules.insert(ordered(
            (first.to_string(), first_role),
            (second.to_string(), second_role),
        ));
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty() && !self.identical_gates_commute
    }

    pub fn rules(&self) -> impl Iterator<Item = &(RuleSide, RuleSide)> {
        self.rules.iter()
    }

    pub fn commutes(&self, g: &Gate, h: &Gate) -> bool {
        let shared: Vec<usize> = g
            .operands()
            .iter()
            .copied()
            .filter(|q| h.acts_on(*q))
            .collect();
        if shared.is_empty() {
            return true;
        }
        if self.identical_gates_commute && g == h {
            return true;
        }
        shared.into_iter().all(|q| {
            let a = (g.name().to_string(), Role::of(g, q).expect("g acts on q"));
            let b = (h.name().to_string(), Role::of(h, q).expect("h acts on q"));
            self.rules.contains(&ordered(a, b))
        })
    }
}

impl Default for CommutationRules {
    fn default() -> Self {
        Self::standard()
    }
}

fn ordered(a: RuleSide, b: RuleSide) -> (RuleSide, RuleSide) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Ordering constraints between gates: `h → g` when `h` comes first in
/// the circuit, they share a qubit and do not commute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependencyDag {
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
}

impl DependencyDag {
    pub fn len(&self) -> usize {
        self.successors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.successors.is_empty()
    }

    /// Gates that must finish after `gate` starts running; all have larger indices.
    pub fn successors(&self, gate: usize) -> &[usize] {
        &self.successors[gate]
    }

    pub fn predecessors(&self, gate: usize) -> &[usize] {
        &self.predecessors[gate]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors[from].contains(&to)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(h, succ)| succ.iter().map(move |&g| (h, g)))
    }
}

pub fn dependency_dag(circuit: &Circuit, rules: &CommutationRules) -> DependencyDag {
    let gates = circuit.gates();
    let n = gates.len();
    let mut successors = vec![Vec::new(); n];
    let mut predecessors = vec![Vec::new(); n];
    for h in 0..n {
        for g in h + 1..n {
            if gates[h].shares_qubit(&gates[g]) && !rules.commutes(&gates[h], &gates[g]) {
                successors[h].push(g);
                predecessors[g].push(h);
            }
        }
    }
    DependencyDag {
        successors,
        predecessors,
    }
}
