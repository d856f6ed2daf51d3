//! Run configuration: JSON file merged with command-line flags.

use std::path::Path;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use qcenv::agents::QLearningParams;
use qcenv::envs::mapping::{InitialMapping, MappingRewards};
use qcenv::envs::routing::{Routing, RoutingRewards};
use qcenv::envs::scheduling::{Scheduling, SchedulingRewards, DEFAULT_GATE_SET, DEFAULT_G_MAX};
use qcenv::formats::{graph_shorthand, parse_graph};
use qcenv::model::{CommutationRules, CouplingGraph, Graph, MachineProperties};

use crate::error::{CliError, CliResult};

pub const CONFIG_KEYS: &str = "\
Config file keys (JSON). Flags override the file; unknown keys are rejected.

  env                      mapping | routing | scheduling          [--env]
  seeds                    list of seeds                           [--seed, --seeds]
  episodes                 training episodes                       [--episodes]
  agent                    q | random | greedy                     [--agent]
  rolling_window           CSV rolling-mean window                 [--window]
  q_learning.alpha                                                 [--alpha]
  q_learning.gamma                                                 [--gamma]
  q_learning.epsilon_start                                         [--epsilon-start]
  q_learning.epsilon_end                                           [--epsilon-end]
  q_learning.anneal_fraction                                       [--anneal-fraction]

  env = mapping
  mapping.edge_probability      G(n, p) edge probability          [--edge-probability]
  mapping.connection_graph      graph spec (see below)             [--coupling]
  mapping.reward.on_coupling
  mapping.reward.penalty_weight
  mapping.reward.illegal
  mapping.reward.completion_bonus

  env = routing
  routing.connection_graph      graph spec (see below)             [--coupling]
  routing.circuit_length_range  [min, max]                         [--length-range]
  routing.window_size           interactions in the observation    [--window-size]
  routing.reward.advance
  routing.reward.swap
  routing.reward.illegal

  env = scheduling
  scheduling.n_qubits                                              [--qubits]
  scheduling.max_gates          generator upper bound              [--max-gates]
  scheduling.gate_set           generator gate names               [--gate-set]
  scheduling.g_max              gate slots in the observation      [--g-max]
  scheduling.machine_properties {n_qubits, durations, exclusion_classes}
  scheduling.commutation_rules  \"standard\" | \"none\" | {rules, identical_gates_commute}
                                                                   [--rules]
  scheduling.reward.illegal
  scheduling.reward.advance
  scheduling.reward.schedule

Graph specs: star:N, line:N, complete:N, edges:N:0-1,1-2,...,
a path to a graph file, or {\"nodes\": N, \"edges\": [[a, b], ...]}.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    Mapping,
    Routing,
    Scheduling,
}

impl std::fmt::Display for EnvKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnvKind::Mapping => "mapping",
            EnvKind::Routing => "routing",
            EnvKind::Scheduling => "scheduling",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Q,
    Random,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Text(String),
    Inline {
        nodes: usize,
        edges: Vec<(usize, usize)>,
    },
}

impl GraphSpec {
    pub fn build(&self, key: &str) -> CliResult<CouplingGraph> {
        let graph = match self {
            GraphSpec::Inline { nodes, edges } => Graph::new(*nodes, edges.iter().copied()),
            GraphSpec::Text(text) => parse_graph_spec(text, key)?,
        }
        .map_err(|e| CliError::config(format!("{key}: {e}")))?;
        CouplingGraph::new(graph).map_err(|e| CliError::config(format!("{key}: {e}")))
    }
}

fn parse_graph_spec(text: &str, key: &str) -> CliResult<qcenv::Result<Graph>> {
    if let Some(graph) = graph_shorthand(text) {
        return Ok(graph);
    }
    let contents = std::fs::read_to_string(text)
        .map_err(|e| CliError::config(format!("{key}: cannot read graph file `{text}`: {e}")))?;
    Ok(parse_graph(&contents))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RulesSpec {
    Preset(String),
    Custom(CommutationRules),
}

impl RulesSpec {
    pub fn build(&self) -> CliResult<CommutationRules> {
        match self {
            RulesSpec::Custom(rules) => Ok(rules.clone()),
            RulesSpec::Preset(name) => match name.as_str() {
                "standard" => Ok(CommutationRules::standard()),
                "none" => Ok(CommutationRules::empty()),
                other => Err(CliError::config(format!(
                    "scheduling.commutation_rules: unknown preset `{other}` (standard | none)"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MappingConfig {
    pub edge_probability: f64,
    pub connection_graph: GraphSpec,
    pub reward: MappingRewards,
}

impl Default for MappingConfig {
    fn default() -> Self {
        Self {
            edge_probability: 0.5,
            connection_graph: GraphSpec::Text("star:4".into()),
            reward: MappingRewards::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RoutingConfig {
    pub connection_graph: GraphSpec,
    pub circuit_length_range: (usize, usize),
    pub window_size: usize,
    pub reward: RoutingRewards,
}

impl Default for RoutingConfig {
    fn default() -> Self {
        Self {
            connection_graph: GraphSpec::Text("line:3".into()),
            circuit_length_range: (1, 10),
            window_size: 4,
            reward: RoutingRewards::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchedulingConfig {
    pub n_qubits: Option<usize>,
    pub max_gates: usize,
    pub gate_set: Vec<String>,
    pub g_max: usize,
    pub machine_properties: Option<MachineProperties>,
    pub commutation_rules: RulesSpec,
    pub reward: SchedulingRewards,
}

impl Default for SchedulingConfig {
    fn default() -> Self {
        Self {
            n_qubits: None,
            max_gates: 5,
            gate_set: DEFAULT_GATE_SET.iter().map(|s| s.to_string()).collect(),
            g_max: DEFAULT_G_MAX,
            machine_properties: None,
            commutation_rules: RulesSpec::Preset("standard".into()),
            reward: SchedulingRewards::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub env: EnvKind,
    pub seeds: Vec<u64>,
    pub episodes: usize,
    pub agent: AgentKind,
    pub rolling_window: usize,
    pub q_learning: QLearningParams,
    pub mapping: MappingConfig,
    pub routing: RoutingConfig,
    pub scheduling: SchedulingConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            env: EnvKind::Scheduling,
            seeds: vec![0],
            episodes: 1000,
            agent: AgentKind::Q,
            rolling_window: 100,
            q_learning: QLearningParams::default(),
            mapping: MappingConfig::default(),
            routing: RoutingConfig::default(),
            scheduling: SchedulingConfig::default(),
        }
    }
}

fn comma_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("`{s}` is not valid here")))
        .collect()
}

fn length_range(text: &str) -> Result<(usize, usize), String> {
    match comma_list::<usize>(text)?.as_slice() {
        [min, max] => Ok((*min, *max)),
        _ => Err("expected `min,max`".into()),
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON config file; flags given on the command line take precedence
    #[arg(long, value_name = "FILE")]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub env: Option<EnvKind>,
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Comma-separated seeds, run one after another
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub seeds: Option<Vec<u64>>,
    #[arg(long)]
    pub episodes: Option<usize>,
    #[arg(long, value_enum)]
    pub agent: Option<AgentKind>,
    /// Rolling-mean window of the training CSV
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub epsilon_start: Option<f64>,
    #[arg(long)]
    pub epsilon_end: Option<f64>,
    #[arg(long)]
    pub anneal_fraction: Option<f64>,
    #[arg(long)]
    pub edge_probability: Option<f64>,
    /// Coupling graph spec for mapping and routing
    #[arg(long, value_name = "GRAPH")]
    pub coupling: Option<String>,
    /// Routing circuit length range as `min,max`
    #[arg(long, value_parser = length_range)]
    pub length_range: Option<(usize, usize)>,
    #[arg(long)]
    pub window_size: Option<usize>,
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long)]
    pub max_gates: Option<usize>,
    /// Comma-separated gate names for the circuit generator
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub gate_set: Option<Vec<String>>,
    #[arg(long)]
    pub g_max: Option<usize>,
    /// Commutation rule preset: standard | none
    #[arg(long)]
    pub rules: Option<String>,
}

pub fn load_config_file(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config `{}`: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("config `{}`: {e}", path.display())))
}

impl ConfigArgs {
    /// File (if any), then flags, then defaults filled in and checked.
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut c = match &self.config {
            Some(path) => load_config_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($flag:expr => $field:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v;
                }
            };
        }
        set!(self.env => c.env);
        set!(self.seed.map(|s| vec![s]) => c.seeds);
        set!(self.seeds => c.seeds);
        set!(self.episodes => c.episodes);
        set!(self.agent => c.agent);
        set!(self.window => c.rolling_window);
        set!(self.alpha => c.q_learning.alpha);
        set!(self.gamma => c.q_learning.gamma);
        set!(self.epsilon_start => c.q_learning.epsilon_start);
        set!(self.epsilon_end => c.q_learning.epsilon_end);
        set!(self.anneal_fraction => c.q_learning.anneal_fraction);
        set!(self.edge_probability => c.mapping.edge_probability);
        if let Some(spec) = &self.coupling {
            c.mapping.connection_graph = GraphSpec::Text(spec.clone());
            c.routing.connection_graph = GraphSpec::Text(spec.clone());
        }
        set!(self.length_range => c.routing.circuit_length_range);
        set!(self.window_size => c.routing.window_size);
        set!(self.qubits.map(Some) => c.scheduling.n_qubits);
        set!(self.max_gates => c.scheduling.max_gates);
        set!(self.gate_set => c.scheduling.gate_set);
        set!(self.g_max => c.scheduling.g_max);
        set!(self.rules.clone().map(RulesSpec::Preset) => c.scheduling.commutation_rules);
        c.materialize()?;
        Ok(c)
    }
}

impl RunConfig {
    fn materialize(&mut self) -> CliResult<()> {
        if self.seeds.is_empty() {
            return Err(CliError::config("seeds: at least one seed is required"));
        }
        if self.rolling_window == 0 {
            return Err(CliError::config("rolling_window must be positive"));
        }
        self.q_learning
            .validate()
            .map_err(|e| CliError::config(format!("q_learning: {e}")))?;
        let s = &mut self.scheduling;
        let n = match (s.n_qubits, &s.machine_properties) {
            (Some(n), Some(props)) if props.n_qubits != n => {
                return Err(CliError::config(format!(
                    "scheduling.n_qubits = {n} disagrees with scheduling.machine_properties.n_qubits = {}",
                    props.n_qubits
                )))
            }
            (Some(n), _) => n,
            (None, Some(props)) => props.n_qubits,
            (None, None) => 2,
        };
        s.n_qubits = Some(n);
        if s.machine_properties.is_none() {
            s.machine_properties = Some(MachineProperties::with_defaults(n));
        }
        if let RulesSpec::Preset(_) = s.commutation_rules {
            s.commutation_rules.build()?;
        }
        // Catch bad values for the selected environment up front.
        match self.env {
            EnvKind::Mapping => drop(self.mapping_task()?),
            EnvKind::Routing => drop(self.routing_task()?),
            EnvKind::Scheduling => drop(self.scheduling_task()?),
        }
        Ok(())
    }

    pub fn mapping_task(&self) -> CliResult<InitialMapping> {
        let m = &self.mapping;
        let coupling = m.connection_graph.build("mapping.connection_graph")?;
        Ok(InitialMapping::new(m.edge_probability, coupling)
            .map_err(|e| CliError::config(format!("mapping.edge_probability: {e}")))?
            .with_rewards(m.reward))
    }

    pub fn routing_task(&self) -> CliResult<Routing> {
        let r = &self.routing;
        let coupling = r.connection_graph.build("routing.connection_graph")?;
        let (min, max) = r.circuit_length_range;
        Ok(Routing::new(coupling)
            .map_err(|e| CliError::config(format!("routing.connection_graph: {e}")))?
            .with_window_size(r.window_size)
            .map_err(|e| CliError::config(format!("routing.window_size: {e}")))?
            .with_length_range(min, max)
            .map_err(|e| CliError::config(format!("routing.circuit_length_range: {e}")))?
            .with_rewards(r.reward))
    }

    pub fn scheduling_props(&self) -> MachineProperties {
        self.scheduling
            .machine_properties
            .clone()
            .expect("materialized config carries machine properties")
    }

    pub fn scheduling_rules(&self) -> CliResult<CommutationRules> {
        self.scheduling.commutation_rules.build()
    }

    pub fn scheduling_task(&self) -> CliResult<Scheduling> {
        let s = &self.scheduling;
        Scheduling::new(self.scheduling_props(), self.scheduling_rules()?)
            .map_err(|e| CliError::config(format!("scheduling.machine_properties: {e}")))?
            .with_sizes(s.max_gates, s.g_max)
            .map_err(|e| CliError::config(format!("scheduling.max_gates / scheduling.g_max: {e}")))?
            .with_gate_set(&s.gate_set)
            .map_err(|e| CliError::config(format!("scheduling.gate_set: {e}")))
            .map(|t| t.with_rewards(s.reward))
    }

    pub fn to_pretty_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
