use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Circuit, CommutationRules, MachineProperties};

/// Start cycle for every gate of a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    circuit: Circuit,
    props: MachineProperties,
    start_cycle: Vec<u32>,
    durations: Vec<u32>,
}

impl Schedule {
    pub fn new(circuit: Circuit, props: MachineProperties, start_cycle: Vec<u32>) -> Result<Self> {
        if start_cycle.len() != circuit.len() {
            return Err(Error::InvalidParameter(format!(
                "{} start cycles for {} gates",
                start_cycle.len(),
                circuit.len()
            )));
        }
        let durations = circuit
            .gates()
            .iter()
            .map(|g| props.duration(g.name()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            circuit,
            props,
            start_cycle,
            durations,
        })
    }

    /// One gate after another in circuit order. Always valid.
    pub fn serial(circuit: Circuit, props: MachineProperties) -> Result<Self> {
        let mut t = 0;
        let mut starts = Vec::with_capacity(circuit.len());
        for gate in circuit.gates() {
            starts.push(t);
            t += props.duration(gate.name())?;
        }
        Self::new(circuit, props, starts)
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn props(&self) -> &MachineProperties {
        &self.props
    }

    pub fn start_cycles(&self) -> &[u32] {
        &self.start_cycle
    }

    pub fn start(&self, gate: usize) -> u32 {
        self.start_cycle[gate]
    }

    pub fn duration(&self, gate: usize) -> u32 {
        self.durations[gate]
    }

    pub fn end(&self, gate: usize) -> u32 {
        self.start_cycle[gate] + self.durations[gate]
    }

    pub fn makespan(&self) -> u32 {
        (0..self.start_cycle.len())
            .map(|g| self.end(g))
            .max()
            .unwrap_or(0)
    }

    fn overlaps(&self, a: usize, b: usize) -> bool {
        self.start(a) < self.end(b) && self.start(b) < self.end(a)
    }

    pub fn validate(&self, rules: &CommutationRules) -> ScheduleReport {
        let gates = self.circuit.gates();
        let mut violations = Vec::new();
        for i in 0..gates.len() {
            for j in i + 1..gates.len() {
                let (gi, gj) = (&gates[i], &gates[j]);
                if let Some(&qubit) = gi.operands().iter().find(|q| gj.acts_on(**q)) {
                    if self.overlaps(i, j) {
                        violations.push(Violation::QubitOverlap {
                            first: i,
                            second: j,
                            qubit,
                        });
                    }
                    if self.start(j) < self.start(i) && !rules.commutes(gi, gj) {
                        violations.push(Violation::Order {
                            first: i,
                            second: j,
                        });
                    }
                }
                if let Some(class) = self.props.exclusion_class(gi.name()) {
                    if self.props.exclusion_classes[class].contains(gj.name())
                        && self.overlaps(i, j)
                    {
                        violations.push(Violation::Exclusion {
                            first: i,
                            second: j,
                            class,
                        });
                    }
                }
            }
        }
        ScheduleReport { violations }
    }

    /// `gate_index start_cycle` per line.
    pub fn to_lines(&self) -> String {
        self.start_cycle
            .iter()
            .enumerate()
            .map(|(i, s)| format!("{i} {s}\n"))
            .collect()
    }
}

impl Serialize for Schedule {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Schedule", 2)?;
        s.serialize_field("start_cycles", &self.start_cycle)?;
        s.serialize_field("makespan", &self.makespan())?;
        s.end()
    }
}

pub fn is_valid_schedule(schedule: &Schedule, rules: &CommutationRules) -> ScheduleReport {
    schedule.validate(rules)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Two gates on a common qubit run in overlapping cycles.
    QubitOverlap {
        first: usize,
        second: usize,
        qubit: usize,
    },
    /// A non-commuting pair executes against circuit order.
    Order { first: usize, second: usize },
    /// Two gates of one exclusion class overlap.
    Exclusion {
        first: usize,
        second: usize,
        class: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::QubitOverlap {
                first,
                second,
                qubit,
            } => {
                write!(f, "gates {first} and {second} overlap on qubit {qubit}")
            }
            Violation::Order { first, second } => {
                write!(f, "gate {second} starts before non-commuting gate {first}")
            }
            Violation::Exclusion {
                first,
                second,
                class,
            } => {
                write!(
                    f,
                    "gates {first} and {second} overlap within exclusion class {class}"
                )
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ScheduleReport {
    pub violations: Vec<Violation>,
}

impl ScheduleReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Gate, Role};

    fn x_cnot() -> Circuit {
        Circuit::new(
            2,
            vec![
                Gate::single("x", 1),
                Gate::two("cnot", 0, 1),
                Gate::single("measure", 0),
                Gate::single("measure", 1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn empty_circuit_is_valid() {
        let s = Schedule::new(
            Circuit::empty(1).unwrap(),
            MachineProperties::with_defaults(1),
            vec![],
        )
        .unwrap();
        assert!(s.validate(&CommutationRules::empty()).is_valid());
        assert_eq!(s.makespan(), 0);
    }

    #[test]
    fn reversed_noncommuting_pair() {
        let c = Circuit::new(1, vec![Gate::single("x", 0), Gate::single("h", 0)]).unwrap();
        let s = Schedule::new(c, MachineProperties::with_defaults(1), vec![1, 0]).unwrap();
        let report = s.validate(&CommutationRules::empty());
        assert_eq!(
            report.violations,
            vec![Violation::Order {
                first: 0,
                second: 1
            }]
        );
    }

    #[test]
    fn commuting_x_after_cnot_is_valid() {
        let rules = CommutationRules::empty().with_rule("x", Role::Single, "cnot", Role::Target);
        // cnot [0,2), measure q0 [2,6), x on q1 [5,6), measure q1 [6,10)
        let s = Schedule::new(
            x_cnot(),
            MachineProperties::with_defaults(2),
            vec![5, 0, 2, 6],
        )
        .unwrap();
        assert!(s.validate(&rules).is_valid(), "{:?}", s.validate(&rules));
        assert_eq!(s.makespan(), 10);
        // Same timing without the rule reorders X past the CNOT.
        let report = s.validate(&CommutationRules::empty());
        assert_eq!(
            report.violations,
            vec![Violation::Order {
                first: 0,
                second: 1
            }]
        );
    }

    #[test]
    fn overlapping_measurements_are_excluded() {
        let s = Schedule::new(
            x_cnot(),
            MachineProperties::with_defaults(2),
            vec![0, 1, 3, 3],
        )
        .unwrap();
        let report = s.validate(&CommutationRules::empty());
        assert!(report.violations.contains(&Violation::Exclusion {
            first: 2,
            second: 3,
            class: 0
        }));
    }

    #[test]
    fn qubit_overlap_detected() {
        let c = Circuit::new(2, vec![Gate::two("cnot", 0, 1), Gate::single("x", 1)]).unwrap();
        let s = Schedule::new(c, MachineProperties::with_defaults(2), vec![0, 1]).unwrap();
        assert_eq!(
            s.validate(&CommutationRules::standard()).violations,
            vec![Violation::QubitOverlap {
                first: 0,
                second: 1,
                qubit: 1
            }]
        );
    }

    #[test]
    fn serial_schedule() {
        let s = Schedule::serial(x_cnot(), MachineProperties::with_defaults(2)).unwrap();
        assert_eq!(s.start_cycles(), &[0, 1, 3, 7]);
        assert_eq!(s.makespan(), 11);
        assert!(s.validate(&CommutationRules::empty()).is_valid());
        assert_eq!(s.to_lines(), "0 0\n1 1\n2 3\n3 7\n");
    }

    #[test]
    fn unknown_gate_duration() {
        let c = Circuit::new(1, vec![Gate::single("foo", 0)]).unwrap();
        assert!(Schedule::new(c, MachineProperties::with_defaults(1), vec![0]).is_err());
    }
}
