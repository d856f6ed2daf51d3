//! Browser bindings for the demo page in `www/`. Every export takes plain
//! strings and numbers and returns a JSON string. The `*_json` functions
//! hold the logic so it can be tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qcenv::agents::MaskedRandom;
use qcenv::env::{run_episode, run_script};
use qcenv::envs::mapping::generate_interaction_graph;
use qcenv::envs::routing::{Routing, RoutingInstance};
use qcenv::formats::{graph_shorthand, parse_circuit, parse_graph, write_circuit};
use qcenv::model::{
    interaction_circuit_of, mapped_edges, CommutationRules, CouplingGraph, InteractionCircuit,
    MachineProperties,
};
use qcenv::oracles::{alap_schedule, optimal_mapping, optimal_routing, optimal_schedule};
use qcenv::render::{gantt_svg, gantt_text, graph_svg};
use qcenv::rng::RngStream;

fn coupling_from(spec: &str) -> Result<CouplingGraph, String> {
    let spec = spec.trim();
    let graph = match graph_shorthand(spec) {
        Some(g) => g,
        None => parse_graph(spec),
    }
    .map_err(|e| e.to_string())?;
    CouplingGraph::new(graph).map_err(|e| e.to_string())
}

fn rules_from(name: &str) -> Result<CommutationRules, String> {
    match name {
        "standard" => Ok(CommutationRules::standard()),
        "none" => Ok(CommutationRules::empty()),
        other => Err(format!(
            "unknown rule set `{other}` (expected standard or none)"
        )),
    }
}

/// ALAP and optimal schedules of a circuit, each with a Gantt chart.
pub fn schedule_json(circuit: &str, rules: &str) -> Result<Value, String> {
    let circuit = parse_circuit(circuit).map_err(|e| e.to_string())?;
    let rules = rules_from(rules)?;
    let props = MachineProperties::with_defaults(circuit.n_qubits());
    let alap = alap_schedule(&circuit, &props, None).map_err(|e| e.to_string())?;
    let alap_rules = alap_schedule(&circuit, &props, Some(&rules)).map_err(|e| e.to_string())?;
    let optimal = match optimal_schedule(&circuit, &props, &rules) {
        Ok(best) => json!({
            "makespan": best.objective,
            "start_cycles": best.witness.start_cycles(),
            "svg": gantt_svg(&best.witness),
            "text": gantt_text(&best.witness),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let summary = |s: &qcenv::model::Schedule| {
        json!({
            "makespan": s.makespan(),
            "start_cycles": s.start_cycles(),
            "svg": gantt_svg(s),
            "text": gantt_text(s),
        })
    };
    Ok(json!({
        "alap": summary(&alap),
        "alap_with_rules": summary(&alap_rules),
        "optimal": optimal,
    }))
}

/// Draws a random interaction graph on the coupling graph's qubits and maps
/// it optimally.
pub fn map_json(coupling: &str, edge_probability: f64, seed: u32) -> Result<Value, String> {
    let cg = coupling_from(coupling)?;
    let n = cg.n_nodes();
    let mut rng = RngStream::new(u64::from(seed));
    let ig =
        generate_interaction_graph(&mut rng, n, edge_probability).map_err(|e| e.to_string())?;
    let best = optimal_mapping(&ig, &cg).map_err(|e| e.to_string())?;
    let used: Vec<(usize, usize)> = mapped_edges(&best.witness, &ig)
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter(|&(a, b)| cg.has_edge(a, b))
        .collect();
    let placement = best.witness.to_permutation().map_err(|e| e.to_string())?;
    let mut labels: Vec<String> = (0..n).map(|p| format!("p{p}")).collect();
    for (l, &p) in placement.iter().enumerate() {
        labels[p] = format!("q{l}");
    }
    let names: Vec<String> = (0..n).map(|l| format!("q{l}")).collect();
    Ok(json!({
        "interaction_edges": ig.edges().collect::<Vec<_>>(),
        "placement": placement,
        "cost": best.objective,
        "interaction_svg": graph_svg(ig.graph(), &names, &[]),
        "coupling_svg": graph_svg(cg.graph(), &labels, &used),
    }))
}

/// Routes the two-qubit gates of a circuit on a coupling graph, optimally
/// and with a seeded masked-random policy.
pub fn route_json(circuit: &str, coupling: &str, seed: u32) -> Result<Value, String> {
    let circuit = parse_circuit(circuit).map_err(|e| e.to_string())?;
    let cg = coupling_from(coupling)?;
    let n = cg.n_nodes();
    if circuit.n_qubits() > n {
        return Err(format!(
            "circuit uses {} qubits, coupling graph has {n}",
            circuit.n_qubits()
        ));
    }
    let ic = InteractionCircuit::new(n, interaction_circuit_of(&circuit).pairs().to_vec())
        .map_err(|e| e.to_string())?;
    let task = Routing::new(cg.clone()).map_err(|e| e.to_string())?;

    let mut env = task.clone().into_env(0);
    let mut policy = MaskedRandom::new(u64::from(seed));
    let trace = run_episode(
        &mut env,
        &mut policy,
        None,
        Some(RoutingInstance::from(ic.clone())),
    )
    .map_err(|e| e.to_string())?;
    let random = if trace.terminated() || ic.is_empty() {
        json!({ "swaps": env.task().swaps().len(), "steps": trace.len() })
    } else {
        json!({ "error": "episode truncated" })
    };

    let optimal = match optimal_routing(&ic, &cg, None) {
        Ok(best) => {
            let mut env = task.into_env(0);
            run_script(&mut env, None, Some(ic.into()), &best.witness.actions)
                .map_err(|e| e.to_string())?;
            let routed = env.task().routed_circuit().map_err(|e| e.to_string())?;
            json!({ "swaps": best.objective, "routed": write_circuit(&routed) })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(json!({
        "optimal": optimal,
        "random": random,
        "coupling_svg": graph_svg(cg.graph(), &[], &[]),
    }))
}

fn to_js(result: Result<Value, String>) -> Result<String, JsError> {
    result.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn schedule(circuit: &str, rules: &str) -> Result<String, JsError> {
    to_js(schedule_json(circuit, rules))
}

#[wasm_bindgen]
pub fn map(coupling: &str, edge_probability: f64, seed: u32) -> Result<String, JsError> {
    to_js(map_json(coupling, edge_probability, seed))
}

#[wasm_bindgen]
pub fn route(circuit: &str, coupling: &str, seed: u32) -> Result<String, JsError> {
    to_js(route_json(circuit, coupling, seed))
}
