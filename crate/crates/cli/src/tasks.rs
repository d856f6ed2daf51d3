//! Per-environment glue: instance files, baseline policies, objectives,
//! oracles and rendering.

use serde_json::{json, Value};

use qcenv::agents::{GreedyScheduling, MaskedRandom};
use qcenv::env::{Policy, Task};
use qcenv::envs::mapping::InitialMapping;
use qcenv::envs::routing::{unexecutable_ops, Routing, RoutingInstance};
use qcenv::envs::scheduling::Scheduling;
use qcenv::formats::{parse_circuit, parse_graph, write_circuit, write_graph};
use qcenv::model::{interaction_circuit_of, Circuit, Gate, InteractionCircuit, InteractionGraph};
use qcenv::oracles::{optimal_mapping, optimal_routing, optimal_schedule};
use qcenv::render::{gantt_svg, gantt_text, graph_dot, mapping_dot};
use qcenv::rng::RngStream;
use qcenv::Error;

use crate::config::{AgentKind, EnvKind, RunConfig};
use crate::error::{CliError, CliResult};

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotReset
            | Error::EpisodeOver
            | Error::NotTerminated
            | Error::OracleBound { .. }
            | Error::IncompleteMapping { .. } => CliError::runtime(e),
            _ => CliError::config(e),
        }
    }
}

pub type BoxedPolicy<O> = Box<dyn Policy<O>>;

pub trait CliTask: Task + Sized {
    const KIND: EnvKind;

    fn build(config: &RunConfig) -> CliResult<Self>;

    fn parse_instance(&self, text: &str) -> CliResult<Self::Instance>;

    fn format_instance(instance: &Self::Instance) -> String;

    fn greedy() -> Option<BoxedPolicy<Self::Observation>> {
        None
    }

    /// Objective lines for a finished (or cut off) episode.
    fn objective(&self, terminated: bool) -> Vec<String>;

    /// Oracle optimum on the current instance as a JSON record.
    fn oracle(&self, config: &RunConfig) -> CliResult<Value>;

    /// One-line summary of the oracle optimum, or why there is none.
    fn oracle_line(&self, config: &RunConfig) -> String {
        match self.oracle(config) {
            Ok(v) => format!(
                "oracle {} {}",
                v["objective_name"].as_str().unwrap_or("objective"),
                v["objective"]
            ),
            Err(e) => format!("oracle skipped: {e}"),
        }
    }

    /// Renders the state reached after replaying a trace.
    fn render_state(&self, format: &str) -> CliResult<String>;
}

pub fn baseline<T: CliTask>(agent: AgentKind, seed: u64) -> CliResult<BoxedPolicy<T::Observation>> {
    match agent {
        AgentKind::Random => Ok(Box::new(MaskedRandom::from_rng(
            RngStream::new(seed).derive(2),
        ))),
        AgentKind::Greedy => T::greedy()
            .ok_or_else(|| CliError::config("agent `greedy` is only defined for env scheduling")),
        AgentKind::Q => Err(CliError::config(
            "agent `q` needs a trained policy file (--policy)",
        )),
    }
}

fn unknown_format(format: &str, allowed: &str) -> CliError {
    CliError::config(format!("unknown format `{format}` (expected {allowed})"))
}

fn oracle_record<W: serde::Serialize>(
    name: &str,
    result: &qcenv::oracles::OracleResult<W>,
) -> Value {
    let mut v = serde_json::to_value(result).expect("oracle result serializes");
    v["objective_name"] = json!(name);
    v
}

impl CliTask for InitialMapping {
    const KIND: EnvKind = EnvKind::Mapping;

    fn build(config: &RunConfig) -> CliResult<Self> {
        config.mapping_task()
    }

    fn parse_instance(&self, text: &str) -> CliResult<InteractionGraph> {
        Ok(InteractionGraph::new(parse_graph(text)?))
    }

    fn format_instance(instance: &InteractionGraph) -> String {
        write_graph(instance)
    }

    fn objective(&self, terminated: bool) -> Vec<String> {
        if !terminated {
            return vec![format!(
                "cost unavailable: {} of {} qubits mapped",
                self.mapping().assigned_count(),
                self.n()
            )];
        }
        match self.episode_cost() {
            Ok(cost) => vec![format!("cost {cost}")],
            Err(e) => vec![format!("cost unavailable: {e}")],
        }
    }

    fn oracle(&self, _config: &RunConfig) -> CliResult<Value> {
        let result = optimal_mapping(self.interaction(), self.coupling())?;
        Ok(oracle_record("cost", &result))
    }

    fn render_state(&self, format: &str) -> CliResult<String> {
        match format {
            "dot" => Ok(mapping_dot(
                self.interaction(),
                self.coupling(),
                self.mapping(),
            )),
            other => Err(unknown_format(other, "dot")),
        }
    }
}

/// Two-qubit gates of a circuit file as an interaction circuit on `n` qubits.
pub fn interaction_circuit_from(circuit: &Circuit, n: usize) -> CliResult<InteractionCircuit> {
    if circuit.n_qubits() > n {
        return Err(CliError::config(format!(
            "circuit uses {} qubits, coupling graph has {n}",
            circuit.n_qubits()
        )));
    }
    Ok(InteractionCircuit::new(
        n,
        interaction_circuit_of(circuit).pairs().to_vec(),
    )?)
}

impl CliTask for Routing {
    const KIND: EnvKind = EnvKind::Routing;

    fn build(config: &RunConfig) -> CliResult<Self> {
        config.routing_task()
    }

    fn parse_instance(&self, text: &str) -> CliResult<RoutingInstance> {
        let circuit = parse_circuit(text)?;
        Ok(interaction_circuit_from(&circuit, self.n())?.into())
    }

    fn format_instance(instance: &RoutingInstance) -> String {
        let c = &instance.circuit;
        let gates = c
            .pairs()
            .iter()
            .map(|&(a, b)| Gate::two("cnot", a, b))
            .collect();
        write_circuit(&Circuit::new(c.n_qubits(), gates).expect("pairs are valid"))
    }

    fn objective(&self, terminated: bool) -> Vec<String> {
        let mut lines = vec![format!("swaps {}", self.swaps().len())];
        if terminated {
            let ops = self.routed_output().expect("terminated episode has output");
            let bad = unexecutable_ops(&ops, self.coupling());
            lines.push(if bad.is_empty() {
                "routed output executable".into()
            } else {
                format!("routed output has {} unexecutable ops", bad.len())
            });
        } else {
            lines.push(format!(
                "episode cut off at interaction {} of {}",
                self.position(),
                self.instance().circuit.len()
            ));
        }
        lines
    }

    fn oracle(&self, _config: &RunConfig) -> CliResult<Value> {
        let instance = self.instance();
        let result = optimal_routing(
            &instance.circuit,
            self.coupling(),
            instance.start_placement.as_deref(),
        )?;
        Ok(oracle_record("swaps", &result))
    }

    fn render_state(&self, format: &str) -> CliResult<String> {
        match format {
            "text" => Ok(write_circuit(&self.routed_circuit()?)),
            "dot" => Ok(graph_dot(self.coupling(), "coupling")),
            other => Err(unknown_format(other, "text | dot")),
        }
    }
}

pub fn render_schedule(schedule: &qcenv::model::Schedule, format: &str) -> CliResult<String> {
    match format {
        "text" => Ok(gantt_text(schedule)),
        "svg" => Ok(gantt_svg(schedule)),
        "lines" => Ok(schedule.to_lines()),
        "json" => Ok(serde_json::to_string(schedule).expect("schedule serializes") + "\n"),
        other => Err(unknown_format(other, "text | svg | lines | json")),
    }
}

impl CliTask for Scheduling {
    const KIND: EnvKind = EnvKind::Scheduling;

    fn build(config: &RunConfig) -> CliResult<Self> {
        config.scheduling_task()
    }

    fn parse_instance(&self, text: &str) -> CliResult<Circuit> {
        Ok(parse_circuit(text)?)
    }

    fn format_instance(instance: &Circuit) -> String {
        write_circuit(instance)
    }

    fn greedy() -> Option<BoxedPolicy<Self::Observation>> {
        Some(Box::new(GreedyScheduling))
    }

    fn objective(&self, terminated: bool) -> Vec<String> {
        if !terminated {
            let placed = self.reverse_starts().iter().filter(|s| s.is_some()).count();
            return vec![format!(
                "makespan unavailable: {placed} of {} gates placed",
                self.circuit().len()
            )];
        }
        let schedule = self
            .finalize_schedule()
            .expect("terminated episode is complete");
        let report = schedule.validate(self.rules());
        let validity = if report.is_valid() {
            "valid".to_string()
        } else {
            format!("{} violations", report.violations.len())
        };
        vec![
            format!("makespan {} ({validity})", schedule.makespan()),
            format!("start cycles {:?}", schedule.start_cycles()),
        ]
    }

    fn oracle(&self, _config: &RunConfig) -> CliResult<Value> {
        let result = optimal_schedule(self.circuit(), self.props(), self.rules())?;
        Ok(oracle_record("makespan", &result))
    }

    fn render_state(&self, format: &str) -> CliResult<String> {
        render_schedule(&self.finalize_schedule()?, format)
    }
}
