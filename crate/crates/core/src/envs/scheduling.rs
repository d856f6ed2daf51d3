//! Gate scheduling, back to front.
//!
//! The agent starts at the end of the circuit at reverse cycle 0. Action
//! `i < g_max` places gate `i` at the current reverse cycle; action `g_max`
//! moves one cycle further back. A gate may be placed once every gate that
//! must run after it (its dependency-DAG successors) has been placed, and
//! its qubits and exclusion class are free. Reverse cycles become forward
//! start cycles in [`Scheduling::finalize_schedule`].

use serde::{Deserialize, Serialize};

use crate::env::{Env, Observation, Task, Transition};
use crate::error::{Error, Result};
use crate::model::{
    dependency_dag, gate_arity, Circuit, CommutationRules, DependencyDag, Gate, MachineProperties,
    Schedule,
};
use crate::rng::RngStream;

pub const DEFAULT_GATE_SET: &[&str] = &["x", "y", "z", "h", "cnot", "measure"];
pub const DEFAULT_G_MAX: usize = 20;

/// Draws `1..=max_gates` gates uniformly from the feasible part of `gate_set`.
pub fn generate_random_circuit(
    rng: &mut RngStream,
    n_qubits: usize,
    max_gates: usize,
    gate_set: &[String],
) -> Result<Circuit> {
    if gate_set.is_empty() {
        return Err(Error::InvalidParameter("gate set is empty".into()));
    }
    if max_gates == 0 {
        return Err(Error::InvalidParameter(
            "max_gates must be at least 1".into(),
        ));
    }
    let feasible: Vec<&String> = gate_set
        .iter()
        .filter(|name| gate_arity(name) <= n_qubits)
        .collect();
    if feasible.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no gate in the set fits on {n_qubits} qubit(s)"
        )));
    }
    let count = rng.between(1, max_gates);
    let gates = (0..count)
        .map(|_| {
            let name = feasible[rng.below(feasible.len())].clone();
            let a = rng.below(n_qubits);
            if gate_arity(&name) == 2 {
                let b = (a + 1 + rng.below(n_qubits - 1)) % n_qubits;
                Gate::two(name, a, b)
            } else {
                Gate::single(name, a)
            }
        })
        .collect();
    Circuit::new(n_qubits, gates)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchedulingRewards {
    pub illegal: f64,
    pub advance: f64,
    pub schedule: f64,
}

impl Default for SchedulingRewards {
    fn default() -> Self {
        Self {
            illegal: -5.0,
            advance: -1.0,
            schedule: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchedulingObservation {
    pub legal_mask: Vec<u8>,
    pub scheduled_flags: Vec<u8>,
    /// `(gate type id, qubit 0, qubit 1)` per slot; id 0 and qubit `n` mark padding.
    pub gate_encoding: Vec<[usize; 3]>,
    /// Unplaced dependency-DAG successors per gate.
    pub blockers_remaining: Vec<usize>,
    /// Cycles until each qubit is free again.
    pub qubit_busy: Vec<u32>,
    /// Cycles until each exclusion class is free again.
    pub class_busy: Vec<u32>,
}

impl SchedulingObservation {
    pub fn advance_action(&self) -> usize {
        self.legal_mask.len()
    }
}

impl Observation for SchedulingObservation {
    fn key(&self) -> Vec<i64> {
        let mut key = Vec::with_capacity(self.legal_mask.len() * 6 + 4);
        key.extend(self.legal_mask.iter().map(|&v| v as i64));
        key.extend(self.scheduled_flags.iter().map(|&v| v as i64));
        key.extend(self.gate_encoding.iter().flatten().map(|&v| v as i64));
        key.extend(self.blockers_remaining.iter().map(|&v| v as i64));
        key.extend(self.qubit_busy.iter().map(|&v| v as i64));
        key.extend(self.class_busy.iter().map(|&v| v as i64));
        key
    }
}

#[derive(Debug, Clone)]
pub struct Scheduling {
    props: MachineProperties,
    rules: CommutationRules,
    rewards: SchedulingRewards,
    max_gates: usize,
    gate_set: Vec<String>,
    g_max: usize,
    circuit: Circuit,
    dag: DependencyDag,
    durations: Vec<u32>,
    classes: Vec<Option<usize>>,
    reverse_cycle: u32,
    assigned: Vec<Option<u32>>,
    qubit_busy_until: Vec<u32>,
    class_busy_until: Vec<u32>,
}

pub type SchedulingEnv = Env<Scheduling>;

impl Scheduling {
    pub fn new(props: MachineProperties, rules: CommutationRules) -> Result<Self> {
        props.validate()?;
        let circuit = Circuit::empty(props.n_qubits)?;
        let gate_set = DEFAULT_GATE_SET
            .iter()
            .filter(|name| props.durations.contains_key(**name))
            .map(|name| name.to_string())
            .collect();
        Ok(Self {
            dag: dependency_dag(&circuit, &rules),
            qubit_busy_until: vec![0; props.n_qubits],
            class_busy_until: vec![0; props.exclusion_classes.len()],
            circuit,
            props,
            rules,
            rewards: SchedulingRewards::default(),
            max_gates: 5,
            gate_set,
            g_max: DEFAULT_G_MAX,
            durations: Vec::new(),
            classes: Vec::new(),
            reverse_cycle: 0,
            assigned: Vec::new(),
        })
    }

    pub fn with_max_gates(mut self, max_gates: usize) -> Result<Self> {
        if max_gates == 0 || max_gates > self.g_max {
            return Err(Error::InvalidParameter(format!(
                "max_gates must lie in 1..={}",
                self.g_max
            )));
        }
        self.max_gates = max_gates;
        Ok(self)
    }

    pub fn with_gate_set<S: AsRef<str>>(mut self, gate_set: &[S]) -> Result<Self> {
        if gate_set.is_empty() {
            return Err(Error::InvalidParameter("gate set is empty".into()));
        }
        let mut names = Vec::with_capacity(gate_set.len());
        for name in gate_set {
            let name = name.as_ref();
            self.props.duration(name)?;
            names.push(name.to_string());
        }
        self.gate_set = names;
        Ok(self)
    }

    /// Fixed number of gate slots in observations and actions.
    pub fn with_g_max(mut self, g_max: usize) -> Result<Self> {
        if g_max == 0 || g_max < self.max_gates {
            return Err(Error::InvalidParameter(format!(
                "g_max must be at least max_gates ({})",
                self.max_gates
            )));
        }
        self.g_max = g_max;
        Ok(self)
    }

    /// Sets both bounds at once, for when the order of the single setters
    /// would trip their cross-check.
    pub fn with_sizes(mut self, max_gates: usize, g_max: usize) -> Result<Self> {
        if max_gates == 0 || max_gates > g_max {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= max_gates ({max_gates}) <= g_max ({g_max})"
            )));
        }
        self.max_gates = max_gates;
        self.g_max = g_max;
        Ok(self)
    }

    pub fn with_rewards(mut self, rewards: SchedulingRewards) -> Self {
        self.rewards = rewards;
        self
    }

    pub fn into_env(self, seed: u64) -> SchedulingEnv {
        Env::new(self, seed)
    }

    pub fn props(&self) -> &MachineProperties {
        &self.props
    }

    pub fn rules(&self) -> &CommutationRules {
        &self.rules
    }

    pub fn rewards(&self) -> &SchedulingRewards {
        &self.rewards
    }

    pub fn max_gates(&self) -> usize {
        self.max_gates
    }

    pub fn gate_set(&self) -> &[String] {
        &self.gate_set
    }

    pub fn g_max(&self) -> usize {
        self.g_max
    }

    pub fn advance_action(&self) -> usize {
        self.g_max
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn reverse_cycle(&self) -> u32 {
        self.reverse_cycle
    }

    pub fn reverse_starts(&self) -> &[Option<u32>] {
        &self.assigned
    }

    pub fn is_legal(&self, gate: usize) -> bool {
        if gate >= self.circuit.len() || self.assigned[gate].is_some() {
            return false;
        }
        if self
            .dag
            .successors(gate)
            .iter()
            .any(|&s| self.assigned[s].is_none())
        {
            return false;
        }
        let r = self.reverse_cycle;
        let qubits_free = self.circuit.gates()[gate]
            .operands()
            .iter()
            .all(|&q| r >= self.qubit_busy_until[q]);
        let class_free = self.classes[gate].is_none_or(|c| r >= self.class_busy_until[c]);
        qubits_free && class_free
    }

    /// Legality of each real gate at the current cycle.
    pub fn legal_gates(&self) -> Vec<bool> {
        (0..self.circuit.len()).map(|g| self.is_legal(g)).collect()
    }

    /// Converts reverse starts to forward ones once every gate is placed.
    pub fn finalize_schedule(&self) -> Result<Schedule> {
        let reverse: Vec<u32> = self
            .assigned
            .iter()
            .copied()
            .collect::<Option<_>>()
            .ok_or(Error::NotTerminated)?;
        Ok(schedule_from_reverse(
            &self.circuit,
            &self.props,
            &reverse,
            &self.durations,
        ))
    }
}

/// `start = M - reverse_start - duration` with `M` the reverse makespan.
pub(crate) fn schedule_from_reverse(
    circuit: &Circuit,
    props: &MachineProperties,
    reverse: &[u32],
    durations: &[u32],
) -> Schedule {
    let makespan = reverse
        .iter()
        .zip(durations)
        .map(|(r, d)| r + d)
        .max()
        .unwrap_or(0);
    let starts = reverse
        .iter()
        .zip(durations)
        .map(|(r, d)| makespan - r - d)
        .collect();
    Schedule::new(circuit.clone(), props.clone(), starts).expect("durations were checked at load")
}

impl Task for Scheduling {
    type Observation = SchedulingObservation;
    type Instance = Circuit;

    fn action_count(&self) -> usize {
        self.g_max + 1
    }

    fn generate(&self, rng: &mut RngStream) -> Result<Circuit> {
        generate_random_circuit(rng, self.props.n_qubits, self.max_gates, &self.gate_set)
    }

    fn load(&mut self, instance: Circuit) -> Result<()> {
        let n = self.props.n_qubits;
        if instance.n_qubits() > n {
            return Err(Error::IncompatibleInstance(format!(
                "circuit uses {} qubits, machine has {n}",
                instance.n_qubits()
            )));
        }
        if instance.len() > self.g_max {
            return Err(Error::IncompatibleInstance(format!(
                "circuit has {} gates, observation holds {}",
                instance.len(),
                self.g_max
            )));
        }
        let durations = instance
            .gates()
            .iter()
            .map(|g| self.props.duration(g.name()))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::IncompatibleInstance(e.to_string()))?;
        let circuit = instance.widened(n)?;
        self.classes = circuit
            .gates()
            .iter()
            .map(|g| self.props.exclusion_class(g.name()))
            .collect();
        self.dag = dependency_dag(&circuit, &self.rules);
        self.assigned = vec![None; circuit.len()];
        self.durations = durations;
        self.circuit = circuit;
        self.reverse_cycle = 0;
        self.qubit_busy_until = vec![0; n];
        self.class_busy_until = vec![0; self.props.exclusion_classes.len()];
        Ok(())
    }

    fn instance(&self) -> &Circuit {
        &self.circuit
    }

    fn apply(&mut self, action: usize) -> Transition {
        if action == self.g_max {
            self.reverse_cycle += 1;
            return Transition::legal(self.rewards.advance);
        }
        if !self.is_legal(action) {
            return Transition::illegal(self.rewards.illegal);
        }
        let r = self.reverse_cycle;
        let end = r + self.durations[action];
        self.assigned[action] = Some(r);
        for &q in self.circuit.gates()[action].operands() {
            self.qubit_busy_until[q] = end;
        }
        if let Some(c) = self.classes[action] {
            self.class_busy_until[c] = end;
        }
        Transition::legal(self.rewards.schedule)
    }

    fn observe(&self) -> SchedulingObservation {
        let n = self.props.n_qubits;
        let g = self.circuit.len();
        let mut legal_mask = vec![0; self.g_max];
        let mut scheduled_flags = vec![0; self.g_max];
        let mut gate_encoding = vec![[0, n, n]; self.g_max];
        let mut blockers_remaining = vec![0; self.g_max];
        for (i, gate) in self.circuit.gates().iter().enumerate() {
            legal_mask[i] = self.is_legal(i) as u8;
            scheduled_flags[i] = self.assigned[i].is_some() as u8;
            let ops = gate.operands();
            gate_encoding[i] = [
                self.props.gate_type_id(gate.name()).unwrap_or(0),
                ops[0],
                ops.get(1).copied().unwrap_or(n),
            ];
            blockers_remaining[i] = self
                .dag
                .successors(i)
                .iter()
                .filter(|&&s| self.assigned[s].is_none())
                .count();
        }
        debug_assert!(g <= self.g_max);
        let r = self.reverse_cycle;
        SchedulingObservation {
            legal_mask,
            scheduled_flags,
            gate_encoding,
            blockers_remaining,
            qubit_busy: self
                .qubit_busy_until
                .iter()
                .map(|&t| t.saturating_sub(r))
                .collect(),
            class_busy: self
                .class_busy_until
                .iter()
                .map(|&t| t.saturating_sub(r))
                .collect(),
        }
    }

    fn is_complete(&self) -> bool {
        self.assigned.iter().all(Option::is_some)
    }

    fn step_budget(&self) -> usize {
        let total: u32 = self.durations.iter().sum();
        4 * (total as usize + self.circuit.len())
    }

    fn action_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.g_max + 1];
        for (i, legal) in self.legal_gates().into_iter().enumerate() {
            mask[i] = legal;
        }
        mask[self.g_max] = true;
        mask
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Role;

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

    fn x_cnot_env() -> SchedulingEnv {
        let rules = CommutationRules::empty().with_rule("x", Role::Single, "cnot", Role::Target);
        Scheduling::new(MachineProperties::with_defaults(2), rules)
            .unwrap()
            .into_env(0)
    }

    #[test]
    fn last_layer_is_legal_first() {
        let mut env = x_cnot_env();
        let obs = env.reset(None, Some(x_cnot())).unwrap();
        assert_eq!(&obs.legal_mask[..4], &[0, 0, 1, 1]);
        assert!(obs.legal_mask[4..].iter().all(|&m| m == 0));
        assert_eq!(&obs.blockers_remaining[..4], &[1, 2, 0, 0]);
    }

    #[test]
    fn x_and_cnot_become_legal_together() {
        let mut env = x_cnot_env();
        env.reset(None, Some(x_cnot())).unwrap();
        let adv = env.task().advance_action();
        env.step(3).unwrap();
        for _ in 0..4 {
            env.step(adv).unwrap();
        }
        env.step(2).unwrap();
        for _ in 0..4 {
            env.step(adv).unwrap();
        }
        assert_eq!(env.task().legal_gates(), vec![true, true, false, false]);
    }

    #[test]
    fn rewards_follow_the_scheme() {
        let mut env = x_cnot_env();
        env.reset(None, Some(x_cnot())).unwrap();
        assert_eq!(env.step(2).unwrap().reward, 0.0);
        let again = env.step(2).unwrap();
        assert_eq!(again.reward, -5.0);
        assert_eq!(again.info["illegal_action"], true);
        assert_eq!(env.step(env.task().advance_action()).unwrap().reward, -1.0);
        assert_eq!(env.step(25).unwrap().reward, -5.0);
        // padded slot
        assert_eq!(env.step(7).unwrap().reward, -5.0);
    }

    #[test]
    fn all_assigned_gives_empty_mask() {
        let mut env = x_cnot_env();
        env.reset(None, Some(x_cnot())).unwrap();
        let adv = env.task().advance_action();
        let mut last = None;
        for a in [3, adv, adv, adv, adv, 2, 0, adv, adv, adv, adv, 1] {
            last = Some(env.step(a).unwrap());
        }
        let last = last.unwrap();
        assert!(last.terminated);
        assert!(last.observation.legal_mask.iter().all(|&m| m == 0));
        let schedule = env.task().finalize_schedule().unwrap();
        assert_eq!(schedule.makespan(), 10);
        assert_eq!(schedule.start_cycles(), &[5, 0, 2, 6]);
        assert!(schedule.validate(env.task().rules()).is_valid());
    }

    #[test]
    fn single_gate_schedule() {
        let mut env = x_cnot_env();
        let c = Circuit::new(2, vec![Gate::two("cnot", 0, 1)]).unwrap();
        env.reset(None, Some(c)).unwrap();
        assert!(env.step(0).unwrap().terminated);
        let s = env.task().finalize_schedule().unwrap();
        assert_eq!(s.start_cycles(), &[0]);
        assert_eq!(s.makespan(), 2);
    }

    #[test]
    fn finalize_before_end_fails() {
        let mut env = x_cnot_env();
        env.reset(None, Some(x_cnot())).unwrap();
        assert!(matches!(
            env.task().finalize_schedule(),
            Err(Error::NotTerminated)
        ));
    }

    #[test]
    fn incompatible_instances() {
        let mut env = x_cnot_env();
        let wide = Circuit::new(3, vec![Gate::single("x", 2)]).unwrap();
        assert!(matches!(
            env.reset(None, Some(wide)),
            Err(Error::IncompatibleInstance(_))
        ));
        let odd = Circuit::new(2, vec![Gate::single("toffoli", 0)]).unwrap();
        assert!(matches!(
            env.reset(None, Some(odd)),
            Err(Error::IncompatibleInstance(_))
        ));
        let long = Circuit::new(1, vec![Gate::single("x", 0); 21]).unwrap();
        assert!(matches!(
            env.reset(None, Some(long)),
            Err(Error::IncompatibleInstance(_))
        ));
        let narrow = Circuit::new(1, vec![Gate::single("x", 0)]).unwrap();
        let obs = env.reset(None, Some(narrow)).unwrap();
        assert_eq!(obs.qubit_busy.len(), 2);
    }

    #[test]
    fn busy_horizons_are_observed() {
        let mut env = x_cnot_env();
        env.reset(None, Some(x_cnot())).unwrap();
        let obs = env.step(3).unwrap().observation;
        assert_eq!(obs.qubit_busy, vec![0, 4]);
        assert_eq!(obs.class_busy, vec![4]);
        let obs = env.step(env.task().advance_action()).unwrap().observation;
        assert_eq!(obs.qubit_busy, vec![0, 3]);
    }

    #[test]
    fn generator_respects_bounds() {
        let mut rng = RngStream::new(2);
        let set: Vec<String> = ["x", "cnot"].iter().map(|s| s.to_string()).collect();
        for _ in 0..200 {
            let c = generate_random_circuit(&mut rng, 1, 3, &set).unwrap();
            assert!((1..=3).contains(&c.len()));
            assert!(c.gates().iter().all(|g| g.name() == "x"));
            let one = generate_random_circuit(&mut rng, 2, 1, &set).unwrap();
            assert_eq!(one.len(), 1);
        }
        assert!(generate_random_circuit(&mut rng, 2, 3, &[]).is_err());
        let only_cnot = vec!["cnot".to_string()];
        assert!(generate_random_circuit(&mut rng, 1, 3, &only_cnot).is_err());
    }

    #[test]
    fn builder_validation() {
        let base = || {
            Scheduling::new(
                MachineProperties::with_defaults(2),
                CommutationRules::standard(),
            )
            .unwrap()
        };
        assert!(base().with_gate_set(&["nope"]).is_err());
        assert!(base().with_gate_set::<&str>(&[]).is_err());
        assert!(base().with_max_gates(0).is_err());
        assert!(base().with_max_gates(21).is_err());
        assert!(base().with_max_gates(8).unwrap().with_g_max(5).is_err());
        assert_eq!(base().with_g_max(5).unwrap().action_count(), 6);
    }
}
