use web_time::Instant;

use super::{alap_schedule, OracleLimits, OracleResult};
use crate::envs::scheduling::schedule_from_reverse;
use crate::error::{Error, Result};
use crate::model::{
    dependency_dag, Circuit, CommutationRules, DependencyDag, MachineProperties, Schedule,
};

pub fn optimal_schedule(
    circuit: &Circuit,
    props: &MachineProperties,
    rules: &CommutationRules,
) -> Result<OracleResult<Schedule>> {
    optimal_schedule_with(circuit, props, rules, &OracleLimits::default())
}

/// Branch and bound over the same decisions the scheduling environment
/// offers: at each reverse cycle place some subset of the legal gates, then
/// advance. ALAP (with the same rules) seeds the incumbent.
pub fn optimal_schedule_with(
    circuit: &Circuit,
    props: &MachineProperties,
    rules: &CommutationRules,
    limits: &OracleLimits,
) -> Result<OracleResult<Schedule>> {
    if circuit.len() > limits.schedule_gates {
        return Err(Error::OracleBound {
            problem: "schedule gate count",
            limit: limits.schedule_gates,
            found: circuit.len(),
        });
    }
    let started = Instant::now();
    let incumbent = alap_schedule(circuit, props, Some(rules))?;
    let dag = dependency_dag(circuit, rules);
    let durations: Vec<u32> = (0..circuit.len()).map(|g| incumbent.duration(g)).collect();
    let mut search = Search::new(circuit, props, &dag, durations, incumbent.makespan() + 1);
    if circuit.is_empty() {
        search.best = 0;
        search.best_reverse = Some(Vec::new());
    } else {
        search.explore(0, 0, 0);
    }
    let reverse = search
        .best_reverse
        .expect("ALAP's own decisions lie in the search tree");
    let witness = schedule_from_reverse(circuit, props, &reverse, &search.durations);
    Ok(OracleResult {
        objective: u64::from(search.best),
        witness,
        nodes_explored: search.explored,
        elapsed: started.elapsed(),
    })
}

struct Search<'a> {
    circuit: &'a Circuit,
    dag: &'a DependencyDag,
    durations: Vec<u32>,
    classes: Vec<Option<usize>>,
    /// Longest duration chain from a gate through its predecessors.
    tail: Vec<u32>,
    reverse: Vec<Option<u32>>,
    qubit_free: Vec<u32>,
    class_free: Vec<u32>,
    best: u32,
    best_reverse: Option<Vec<u32>>,
    explored: u64,
}

impl<'a> Search<'a> {
    fn new(
        circuit: &'a Circuit,
        props: &MachineProperties,
        dag: &'a DependencyDag,
        durations: Vec<u32>,
        bound: u32,
    ) -> Self {
        let n = circuit.len();
        let mut tail = vec![0; n];
        for g in 0..n {
            let longest = dag
                .predecessors(g)
                .iter()
                .map(|&p| tail[p])
                .max()
                .unwrap_or(0);
            tail[g] = durations[g] + longest;
        }
        Self {
            circuit,
            dag,
            classes: circuit
                .gates()
                .iter()
                .map(|g| props.exclusion_class(g.name()))
                .collect(),
            durations,
            tail,
            reverse: vec![None; n],
            qubit_free: vec![0; circuit.n_qubits()],
            class_free: vec![0; props.exclusion_classes.len()],
            best: bound,
            best_reverse: None,
            explored: 0,
        }
    }

    fn is_legal(&self, g: usize, r: u32) -> bool {
        self.reverse[g].is_none()
            && self
                .dag
                .successors(g)
                .iter()
                .all(|&s| self.reverse[s].is_some())
            && self.circuit.gates()[g]
                .operands()
                .iter()
                .all(|&q| self.qubit_free[q] <= r)
            && self.classes[g].is_none_or(|c| self.class_free[c] <= r)
    }

    fn lower_bound(&self, r: u32) -> u32 {
        let gates = self.circuit.gates();
        let mut bound = 0;
        let mut qubit_load = self
            .qubit_free
            .iter()
            .map(|&t| t.max(r))
            .collect::<Vec<_>>();
        let mut class_load = self
            .class_free
            .iter()
            .map(|&t| t.max(r))
            .collect::<Vec<_>>();
        for (g, gate) in gates.iter().enumerate() {
            match self.reverse[g] {
                Some(start) => bound = bound.max(start + self.durations[g]),
                None => {
                    let ready = gate
                        .operands()
                        .iter()
                        .map(|&q| self.qubit_free[q])
                        .chain(self.classes[g].map(|c| self.class_free[c]))
                        .fold(r, u32::max);
                    bound = bound.max(ready + self.tail[g]);
                    for &q in gate.operands() {
                        qubit_load[q] += self.durations[g];
                    }
                    if let Some(c) = self.classes[g] {
                        class_load[c] += self.durations[g];
                    }
                }
            }
        }
        qubit_load
            .into_iter()
            .chain(class_load)
            .fold(bound, u32::max)
    }

    fn explore(&mut self, r: u32, first: usize, placed: usize) {
        self.explored += 1;
        if placed == self.reverse.len() {
            let makespan = (0..self.reverse.len())
                .map(|g| self.reverse[g].unwrap() + self.durations[g])
                .max()
                .unwrap_or(0);
            if makespan < self.best {
                self.best = makespan;
                self.best_reverse = Some(self.reverse.iter().map(|s| s.unwrap()).collect());
            }
            return;
        }
        if self.lower_bound(r) >= self.best {
            return;
        }
        for g in first..self.reverse.len() {
            if !self.is_legal(g, r) {
                continue;
            }
            let end = r + self.durations[g];
            let operands = self.circuit.gates()[g].operands();
            let saved_qubits: Vec<u32> = operands.iter().map(|&q| self.qubit_free[q]).collect();
            let saved_class = self.classes[g].map(|c| self.class_free[c]);
            self.reverse[g] = Some(r);
            for &q in operands {
                self.qubit_free[q] = end;
            }
            if let Some(c) = self.classes[g] {
                self.class_free[c] = end;
            }

            self.explore(r, g + 1, placed + 1);

            self.reverse[g] = None;
            for (&q, &t) in operands.iter().zip(&saved_qubits) {
                self.qubit_free[q] = t;
            }
            if let (Some(c), Some(t)) = (self.classes[g], saved_class) {
                self.class_free[c] = t;
            }
        }
        // Idling before the first placement only shifts the schedule.
        if placed > 0 {
            self.explore(r + 1, 0, placed);
        }
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
    fn commutation_beats_alap() {
        let props = MachineProperties::with_defaults(2);
        let rules = CommutationRules::empty().with_rule("x", Role::Single, "cnot", Role::Target);
        let opt = optimal_schedule(&x_cnot(), &props, &rules).unwrap();
        let alap = alap_schedule(&x_cnot(), &props, None).unwrap();
        assert_eq!(opt.objective, 10);
        assert_eq!(alap.makespan(), 11);
        assert!(opt.witness.validate(&rules).is_valid());
        assert_eq!(u64::from(opt.witness.makespan()), opt.objective);
    }

    #[test]
    fn single_gate() {
        let props = MachineProperties::with_defaults(1);
        let c = Circuit::new(1, vec![Gate::single("measure", 0)]).unwrap();
        assert_eq!(
            optimal_schedule(&c, &props, &CommutationRules::standard())
                .unwrap()
                .objective,
            4
        );
    }

    #[test]
    fn chain_is_serial() {
        let props = MachineProperties::with_defaults(1);
        let c = Circuit::new(
            1,
            vec![
                Gate::single("h", 0),
                Gate::single("x", 0),
                Gate::single("y", 0),
                Gate::single("measure", 0),
            ],
        )
        .unwrap();
        let r = optimal_schedule(&c, &props, &CommutationRules::empty()).unwrap();
        assert_eq!(r.objective, 7);
    }

    #[test]
    fn empty_circuit() {
        let props = MachineProperties::with_defaults(1);
        let r = optimal_schedule(
            &Circuit::empty(1).unwrap(),
            &props,
            &CommutationRules::empty(),
        )
        .unwrap();
        assert_eq!(r.objective, 0);
    }

    #[test]
    fn bound() {
        let props = MachineProperties::with_defaults(1);
        let c = Circuit::new(1, vec![Gate::single("x", 0); 7]).unwrap();
        assert!(matches!(
            optimal_schedule(&c, &props, &CommutationRules::empty()),
            Err(Error::OracleBound { .. })
        ));
    }
}
