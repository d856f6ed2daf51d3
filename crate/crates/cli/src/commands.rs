use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::{json, Value};

use qcenv::agents::{q_learning_train, QPolicy, QTable, TrainingLog};
use qcenv::env::{run_episode, run_script, Env, Task};
use qcenv::envs::{InitialMapping, Routing, Scheduling};
use qcenv::formats::parse_circuit;
use qcenv::model::Schedule;
use qcenv::oracles::{alap_schedule, optimal_schedule};
use qcenv::render::graph_dot;

use crate::config::{AgentKind, ConfigArgs, EnvKind, RunConfig};
use crate::error::{CliError, CliResult};
use crate::tasks::{baseline, render_schedule, BoxedPolicy, CliTask};

/// Runs `$body` with `$T` bound to the task type of the configured env.
macro_rules! dispatch {
    ($kind:expr, $T:ident => $body:expr) => {
        match $kind {
            EnvKind::Mapping => {
                type $T = InitialMapping;
                $body
            }
            EnvKind::Routing => {
                type $T = Routing;
                $body
            }
            EnvKind::Scheduling => {
                type $T = Scheduling;
                $body
            }
        }
    };
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read `{}`: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text)
        .map_err(|e| CliError::runtime(format!("cannot write `{}`: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            match stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
            {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    Err(CliError::runtime(format!("cannot write to stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

fn single_seed(config: &RunConfig) -> CliResult<u64> {
    match config.seeds.as_slice() {
        [seed] => Ok(*seed),
        _ => Err(CliError::config("this command takes exactly one seed")),
    }
}

fn load_instance<T: CliTask>(task: &T, path: Option<&Path>) -> CliResult<Option<T::Instance>> {
    path.map(|p| task.parse_instance(&read_file(p)?))
        .transpose()
}

/// Resets with `instance` if given, otherwise draws one from `seed`.
fn start<T: CliTask>(env: &mut Env<T>, seed: u64, instance: Option<T::Instance>) -> CliResult<()> {
    env.reset(Some(seed), instance)?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Instances per seed
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Directory for `s<seed>-<i>.txt` files; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn gen(args: &GenArgs) -> CliResult<()> {
    let config = args.config.resolve()?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("cannot create `{}`: {e}", dir.display())))?;
    }
    dispatch!(config.env, T => {
        for &seed in &config.seeds {
            let mut env = Env::new(T::build(&config)?, seed);
            for i in 0..args.count {
                env.reset((i == 0).then_some(seed), None)?;
                let text = T::format_instance(env.task().instance());
                match &args.out {
                    Some(dir) => write_file(&dir.join(format!("s{seed}-{i}.txt")), &text)?,
                    None => emit(None, &format!("# seed {seed} instance {i}\n{text}"))?,
                }
            }
        }
    });
    Ok(())
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Train on this instance every episode instead of random ones
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Output directory for config.json and per-seed CSV and policy files
    #[arg(long, default_value = "train-out")]
    pub out: PathBuf,
}

fn train_seed<T: CliTask>(
    config: &RunConfig,
    seed: u64,
    instance: Option<&T::Instance>,
) -> CliResult<(TrainingLog, Value)> {
    let mut env = Env::new(T::build(config)?, seed);
    match config.agent {
        AgentKind::Q => {
            let (policy, log) = q_learning_train(
                &mut env,
                config.episodes,
                &config.q_learning,
                seed,
                instance,
            )?;
            let table: Value =
                serde_json::from_str(&policy.table.to_json()).expect("table is JSON");
            Ok((log, json!({ "agent": "q", "env": T::KIND, "table": table })))
        }
        agent => {
            let mut policy = baseline::<T>(agent, seed)?;
            let mut log = TrainingLog::default();
            for episode in 0..config.episodes {
                let trace = run_episode(
                    &mut env,
                    policy.as_mut(),
                    (episode == 0).then_some(seed),
                    instance.cloned(),
                )?;
                log.push(trace.len(), trace.total_reward());
            }
            Ok((log, json!({ "agent": agent, "env": T::KIND, "seed": seed })))
        }
    }
}

pub fn train(args: &TrainArgs) -> CliResult<()> {
    let config = args.config.resolve()?;
    if config.agent == AgentKind::Greedy && config.env != EnvKind::Scheduling {
        return Err(CliError::config(
            "agent `greedy` is only defined for env scheduling",
        ));
    }
    emit(None, &(config.to_pretty_json() + "\n"))?;
    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::runtime(format!("cannot create `{}`: {e}", args.out.display())))?;
    write_file(
        &args.out.join("config.json"),
        &(config.to_pretty_json() + "\n"),
    )?;
    dispatch!(config.env, T => {
        let instance = load_instance(&T::build(&config)?, args.instance.as_deref())?;
        for &seed in &config.seeds {
            let (log, policy) = train_seed::<T>(&config, seed, instance.as_ref())?;
            write_file(&args.out.join(format!("seed-{seed}.csv")), &log.to_csv(config.rolling_window))?;
            write_file(
                &args.out.join(format!("seed-{seed}.policy.json")),
                &(serde_json::to_string(&policy).expect("policy serializes") + "\n"),
            )?;
            let w = config.rolling_window.min(log.len());
            let (first_len, first_reward) = log.mean_over(0..w);
            let (last_len, last_reward) = log.mean_over(log.len() - w..log.len());
            emit(None, &format!(
                "seed {seed}: {} episodes; first {w}: length {first_len:.3} reward {first_reward:.3}; last {w}: length {last_len:.3} reward {last_reward:.3}\n",
                log.len()
            ))?;
        }
    });
    Ok(())
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Policy file written by `train`; without it `--agent random|greedy` is used
    #[arg(long)]
    pub policy: Option<PathBuf>,
    /// Instance file; a seeded random instance when absent
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

fn load_policy<T: CliTask>(path: &Path) -> CliResult<BoxedPolicy<T::Observation>> {
    let text = read_file(path)?;
    let file: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("policy `{}`: {e}", path.display())))?;
    let env: EnvKind = serde_json::from_value(file["env"].clone())
        .map_err(|e| CliError::config(format!("policy `{}`: env: {e}", path.display())))?;
    if env != T::KIND {
        return Err(CliError::config(format!(
            "policy `{}` was trained on env {env}, not {}",
            path.display(),
            T::KIND
        )));
    }
    let agent: AgentKind = serde_json::from_value(file["agent"].clone())
        .map_err(|e| CliError::config(format!("policy `{}`: agent: {e}", path.display())))?;
    match agent {
        AgentKind::Q => {
            let table = QTable::from_json(&file["table"].to_string())?;
            Ok(Box::new(QPolicy { table }))
        }
        other => baseline::<T>(other, file["seed"].as_u64().unwrap_or(0)),
    }
}

fn eval_env<T: CliTask>(config: &RunConfig, args: &EvalArgs, seed: u64) -> CliResult<String> {
    let mut env = Env::new(T::build(config)?, seed);
    if env.action_count() == 0 {
        return Err(CliError::config("environment has no actions"));
    }
    let instance = load_instance(env.task(), args.instance.as_deref())?;
    let mut policy = match &args.policy {
        Some(path) => load_policy::<T>(path)?,
        None => baseline::<T>(config.agent, seed)?,
    };
    let trace = run_episode(&mut env, policy.as_mut(), Some(seed), instance)?;
    let mut out = String::new();
    writeln!(out, "env {} seed {seed}", T::KIND).unwrap();
    writeln!(
        out,
        "steps {} total_reward {:?} terminated {} truncated {}",
        trace.len(),
        trace.total_reward(),
        trace.terminated(),
        trace.truncated()
    )
    .unwrap();
    writeln!(
        out,
        "actions {:?}",
        trace.steps.iter().map(|s| s.action).collect::<Vec<_>>()
    )
    .unwrap();
    for line in env
        .task()
        .objective(trace.terminated() || env.task().is_complete())
    {
        writeln!(out, "{line}").unwrap();
    }
    writeln!(out, "{}", env.task().oracle_line(config)).unwrap();
    Ok(out)
}

pub fn eval(args: &EvalArgs) -> CliResult<()> {
    let config = args.config.resolve()?;
    let seed = single_seed(&config)?;
    let report = dispatch!(config.env, T => eval_env::<T>(&config, args, seed)?);
    emit(None, &report)
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub instance: Option<PathBuf>,
}

fn oracle_env<T: CliTask>(
    config: &RunConfig,
    instance: Option<&Path>,
    seed: u64,
) -> CliResult<Value> {
    let mut env = Env::new(T::build(config)?, seed);
    let instance = load_instance(env.task(), instance)?;
    start(&mut env, seed, instance)?;
    let result = env.task().oracle(config)?;
    Ok(json!({
        "env": T::KIND,
        "instance": serde_json::to_value(env.task().instance()).expect("instance serializes"),
        "result": result,
    }))
}

pub fn oracle(args: &OracleArgs) -> CliResult<()> {
    let config = args.config.resolve()?;
    let seed = single_seed(&config)?;
    let record =
        dispatch!(config.env, T => oracle_env::<T>(&config, args.instance.as_deref(), seed)?);
    emit(
        None,
        &(serde_json::to_string_pretty(&record).expect("record serializes") + "\n"),
    )
}

#[derive(Debug, Args)]
pub struct AlapArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Circuit file
    #[arg(long)]
    pub instance: PathBuf,
    /// Respect the configured commutation rules (default: ignore them)
    #[arg(long)]
    pub with_rules: bool,
    /// lines | text | svg | json
    #[arg(long, default_value = "lines")]
    pub format: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn alap(args: &AlapArgs) -> CliResult<()> {
    let config = args.config.resolve()?;
    let circuit = parse_circuit(&read_file(&args.instance)?)?;
    let props = config.scheduling_props();
    if circuit.n_qubits() > props.n_qubits {
        return Err(CliError::config(format!(
            "circuit uses {} qubits, machine has {}",
            circuit.n_qubits(),
            props.n_qubits
        )));
    }
    let rules = config.scheduling_rules()?;
    let schedule = alap_schedule(&circuit, &props, args.with_rules.then_some(&rules))?;
    emit(
        args.out.as_deref(),
        &render_schedule(&schedule, &args.format)?,
    )
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Instance file to draw
    #[arg(long, conflicts_with = "trace")]
    pub instance: Option<PathBuf>,
    /// Trace file to replay; the final state is drawn
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Mapping env: comma-separated physical qubit per logical qubit
    #[arg(long)]
    pub mapping: Option<String>,
    /// Scheduling env: alap | alap-rules | optimal | serial
    #[arg(long, default_value = "alap")]
    pub schedule: String,
    /// dot (mapping, routing), text | svg | lines | json (scheduling), text (routing trace)
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Header instance and action column of a trace file.
fn read_trace(path: &Path) -> CliResult<(Value, Vec<usize>)> {
    let text = read_file(path)?;
    let mut lines = text.lines();
    let bad = |why: String| CliError::config(format!("trace `{}`: {why}", path.display()));
    let header: Value = serde_json::from_str(lines.next().ok_or_else(|| bad("empty file".into()))?)
        .map_err(|e| bad(format!("header: {e}")))?;
    let actions = lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.split_whitespace()
                .nth(1)
                .and_then(|a| a.parse().ok())
                .ok_or_else(|| bad(format!("line {} has no action", i + 2)))
        })
        .collect::<CliResult<_>>()?;
    Ok((header["instance"].clone(), actions))
}

fn render_trace<T: CliTask>(config: &RunConfig, path: &Path, format: &str) -> CliResult<String> {
    let (instance, actions) = read_trace(path)?;
    let instance: T::Instance = serde_json::from_value(instance)
        .map_err(|e| CliError::config(format!("trace `{}`: instance: {e}", path.display())))?;
    let mut env = Env::new(T::build(config)?, 0);
    run_script(&mut env, None, Some(instance), &actions)?;
    env.task().render_state(format)
}

fn parse_mapping(text: &str) -> CliResult<qcenv::model::Mapping> {
    let values = text
        .split(',')
        .map(|v| v.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::config(format!("--mapping: `{text}` is not a list of qubits")))?;
    Ok(qcenv::model::Mapping::from_permutation(&values)?)
}

fn render_schedule_instance(
    config: &RunConfig,
    path: &Path,
    which: &str,
    format: &str,
) -> CliResult<String> {
    let circuit = parse_circuit(&read_file(path)?)?;
    let props = config.scheduling_props();
    let rules = config.scheduling_rules()?;
    let schedule = match which {
        "alap" => alap_schedule(&circuit, &props, None)?,
        "alap-rules" => alap_schedule(&circuit, &props, Some(&rules))?,
        "optimal" => optimal_schedule(&circuit, &props, &rules)?.witness,
        "serial" => Schedule::serial(circuit, props)?,
        other => {
            return Err(CliError::config(format!(
                "unknown schedule `{other}` (alap | alap-rules | optimal | serial)"
            )))
        }
    };
    render_schedule(&schedule, format)
}

pub fn render(args: &RenderArgs) -> CliResult<()> {
    let config = args.config.resolve()?;
    let default_format = match (config.env, &args.trace) {
        (EnvKind::Scheduling, _) | (EnvKind::Routing, Some(_)) => "text",
        _ => "dot",
    };
    let format = args.format.as_deref().unwrap_or(default_format);
    let text = if let Some(trace) = &args.trace {
        dispatch!(config.env, T => render_trace::<T>(&config, trace, format)?)
    } else {
        match config.env {
            EnvKind::Mapping => {
                let task = config.mapping_task()?;
                if format != "dot" {
                    return Err(CliError::config(format!(
                        "unknown format `{format}` (expected dot)"
                    )));
                }
                match &args.instance {
                    Some(path) => {
                        let ig = task.parse_instance(&read_file(path)?)?;
                        let mapping = match &args.mapping {
                            Some(m) => parse_mapping(m)?,
                            None => qcenv::model::Mapping::empty(task.n()),
                        };
                        if ig.n_nodes() != task.n() || mapping.len() != task.n() {
                            return Err(CliError::config(format!(
                                "instance and mapping must cover the coupling graph's {} qubits",
                                task.n()
                            )));
                        }
                        qcenv::render::mapping_dot(&ig, task.coupling(), &mapping)
                    }
                    None => graph_dot(task.coupling(), "coupling"),
                }
            }
            EnvKind::Routing => {
                let task = config.routing_task()?;
                if format != "dot" {
                    return Err(CliError::config(format!(
                        "unknown format `{format}` (expected dot)"
                    )));
                }
                match &args.instance {
                    Some(path) => {
                        let instance = task.parse_instance(&read_file(path)?)?;
                        let pairs = instance.circuit.pairs().iter().copied();
                        let graph = qcenv::model::Graph::new(task.n(), pairs)?;
                        graph_dot(&graph, "interaction")
                    }
                    None => graph_dot(task.coupling(), "coupling"),
                }
            }
            EnvKind::Scheduling => {
                let path = args.instance.as_deref().ok_or_else(|| {
                    CliError::config("scheduling render needs --instance or --trace")
                })?;
                render_schedule_instance(&config, path, &args.schedule, format)?
            }
        }
    };
    emit(args.out.as_deref(), &text)
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Comma-separated action codes
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub actions: Vec<usize>,
    /// Instance file; a seeded random instance when absent
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Append the observation to every step line
    #[arg(long)]
    pub observations: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn trace_env<T: CliTask>(config: &RunConfig, args: &TraceArgs, seed: u64) -> CliResult<String> {
    let mut env = Env::new(T::build(config)?, seed);
    let instance = load_instance(env.task(), args.instance.as_deref())?;
    let trace = run_script(&mut env, Some(seed), instance, &args.actions)?;
    Ok(trace.to_text(args.observations))
}

pub fn trace(args: &TraceArgs) -> CliResult<()> {
    let config = args.config.resolve()?;
    let seed = single_seed(&config)?;
    let text = dispatch!(config.env, T => trace_env::<T>(&config, args, seed)?);
    emit(args.out.as_deref(), &text)
}
