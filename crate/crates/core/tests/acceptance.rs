//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::time::{Duration, Instant};

use itertools::Itertools;

use qcenv::agents::{q_learning_train, MaskedRandom, QLearningParams};
use qcenv::env::{run_episode, run_script, Env, Task};
use qcenv::envs::mapping::{generate_interaction_graph, InitialMapping};
use qcenv::envs::routing::{
    generate_interaction_circuit, replay_logical_pairs, unexecutable_ops, Routing, RoutingInstance,
};
use qcenv::envs::scheduling::Scheduling;
use qcenv::model::{
    is_valid_schedule, Circuit, CommutationRules, CouplingGraph, Gate, Graph, InteractionCircuit,
    MachineProperties,
};
use qcenv::oracles::{alap_schedule, optimal_mapping, optimal_routing, optimal_schedule};
use qcenv::rng::RngStream;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_coupling(rng: &mut RngStream, n: usize) -> CouplingGraph {
    let tree: Vec<(usize, usize)> = (1..n).map(|i| (i, rng.below(i))).collect();
    let extra = generate_interaction_graph(rng, n, 0.3).unwrap();
    CouplingGraph::from_edges(n, tree.into_iter().chain(extra.edges())).unwrap()
}

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

const WINDOW: usize = 500;
const POC_EPISODES: usize = 20_000;
const POC_LIMIT: Duration = Duration::from_secs(300);

fn proof_of_concept() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for seed in [1u64, 2, 3] {
        let task = Scheduling::new(
            MachineProperties::with_defaults(2),
            CommutationRules::standard(),
        )
        .unwrap()
        .with_max_gates(5)
        .unwrap();
        let mut env = task.into_env(seed);
        let started = Instant::now();
        let (_, log) = q_learning_train(
            &mut env,
            POC_EPISODES,
            &QLearningParams::default(),
            seed,
            None,
        )
        .map_err(|e| e.to_string())?;
        let elapsed = started.elapsed();
        let (first_len, first_reward) = log.mean_over(0..WINDOW);
        let (last_len, last_reward) = log.mean_over(POC_EPISODES - WINDOW..POC_EPISODES);
        let seed_ok = last_reward > first_reward && last_len < first_len && elapsed <= POC_LIMIT;
        ok &= seed_ok;
        lines.push(format!(
            "seed {seed}: reward {first_reward:.3} -> {last_reward:.3}, length {first_len:.3} -> {last_len:.3}, {:.1}s",
            elapsed.as_secs_f64()
        ));
    }
    check(ok, lines.join("; "))
}

fn x_cnot_endpoint() -> Outcome {
    let circuit = x_cnot();
    let props = MachineProperties::with_defaults(2);
    let rules = CommutationRules::standard();
    let alap = alap_schedule(&circuit, &props, None)
        .map_err(|e| e.to_string())?
        .makespan();
    let best = optimal_schedule(&circuit, &props, &rules).map_err(|e| e.to_string())?;

    let mut env = Scheduling::new(props, rules.clone()).unwrap().into_env(1);
    let (mut policy, _) = q_learning_train(
        &mut env,
        3000,
        &QLearningParams::default(),
        1,
        Some(&circuit),
    )
    .map_err(|e| e.to_string())?;
    let trace =
        run_episode(&mut env, &mut policy, None, Some(circuit)).map_err(|e| e.to_string())?;
    let learned = if trace.terminated() {
        let s = env.task().finalize_schedule().map_err(|e| e.to_string())?;
        is_valid_schedule(&s, &rules)
            .is_valid()
            .then_some(s.makespan())
    } else {
        None
    };
    check(
        u64::from(alap) == 11 && best.objective == 10 && learned == Some(10),
        format!(
            "alap {alap}, optimal {}, trained policy {learned:?}",
            best.objective
        ),
    )
}

/// Reference optimum: every bijection, counting interaction edges whose
/// image is not a coupling edge.
fn enumerate_mapping_cost(ig: &Graph, cg: &Graph) -> usize {
    let n = ig.n_nodes();
    (0..n)
        .permutations(n)
        .map(|p| {
            ig.edges()
                .filter(|&(a, b)| !cg.has_edge(p[a], p[b]))
                .count()
        })
        .min()
        .unwrap()
}

fn mapping_equivalence() -> Outcome {
    let mut rng = RngStream::new(500);
    for case in 0..50 {
        let n = rng.between(1, 6);
        let cg = random_coupling(&mut rng, n);
        let ig = generate_interaction_graph(&mut rng, n, 0.5).unwrap();
        let expected = enumerate_mapping_cost(ig.graph(), cg.graph());
        let got = optimal_mapping(&ig, &cg).map_err(|e| e.to_string())?;
        let p = got.witness.to_permutation().map_err(|e| e.to_string())?;
        let witness_cost = ig
            .graph()
            .edges()
            .filter(|&(a, b)| !cg.graph().has_edge(p[a], p[b]))
            .count();
        if got.objective != expected as u64 || witness_cost != expected {
            return Err(format!(
                "case {case} n={n}: oracle {} witness {witness_cost} enumeration {expected}",
                got.objective
            ));
        }
    }
    Ok("50 instances, objective and witness match enumeration".into())
}

fn routing_soundness() -> Outcome {
    let mut rng = RngStream::new(600);
    let mut episodes = 0;
    for case in 0..50 {
        let n = rng.between(2, 4);
        let length = rng.between(0, 6);
        let cg = random_coupling(&mut rng, n);
        let circuit = generate_interaction_circuit(&mut rng, n, length).unwrap();
        let mut start: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            start.swap(i, rng.below(i + 1));
        }
        let instance = RoutingInstance {
            circuit: circuit.clone(),
            start_placement: Some(start.clone()),
        };
        let best = optimal_routing(&circuit, &cg, Some(&start)).map_err(|e| e.to_string())?;
        let mut env = Routing::new(cg.clone()).unwrap().into_env(case);

        let mut traces = Vec::new();
        for seed in 0..3 {
            let mut policy = MaskedRandom::new(case * 10 + seed);
            traces.push(
                run_episode(&mut env, &mut policy, None, Some(instance.clone()))
                    .map(|t| (t, env.task().clone())),
            );
        }
        traces.push(
            run_script(
                &mut env,
                None,
                Some(instance.clone()),
                &best.witness.actions,
            )
            .map(|t| (t, env.task().clone())),
        );
        for result in traces {
            let (trace, task) = result.map_err(|e| e.to_string())?;
            if !(trace.terminated() || (circuit.is_empty() && trace.is_empty())) {
                continue;
            }
            episodes += 1;
            let ops = task.routed_output().map_err(|e| e.to_string())?;
            let bad = unexecutable_ops(&ops, &cg);
            let replayed: Vec<_> = replay_logical_pairs(&ops, &start)
                .into_iter()
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            let wanted: Vec<_> = circuit
                .pairs()
                .iter()
                .map(|&(a, b)| (a.min(b), a.max(b)))
                .collect();
            if !bad.is_empty() || replayed != wanted || (task.swaps().len() as u64) < best.objective
            {
                return Err(format!(
                    "case {case}: {} unexecutable, semantics {}, swaps {} vs optimal {}",
                    bad.len(),
                    replayed == wanted,
                    task.swaps().len(),
                    best.objective
                ));
            }
        }
    }
    Ok(format!("{episodes} terminated episodes on 50 instances"))
}

fn schedule_fuzz() -> Outcome {
    let mut invalid = 0;
    let mut unfinished = 0;
    for episode in 0..500u64 {
        let n = 1 + (episode % 3) as usize;
        let rules = CommutationRules::standard();
        let mut env: Env<Scheduling> =
            Scheduling::new(MachineProperties::with_defaults(n), rules.clone())
                .unwrap()
                .into_env(episode);
        let mut policy = MaskedRandom::new(episode);
        let trace =
            run_episode(&mut env, &mut policy, Some(episode), None).map_err(|e| e.to_string())?;
        if !trace.terminated() {
            unfinished += 1;
            continue;
        }
        let s = env.task().finalize_schedule().map_err(|e| e.to_string())?;
        if !is_valid_schedule(&s, &rules).is_valid() {
            invalid += 1;
        }
    }
    check(
        invalid == 0 && unfinished == 0,
        format!("500 episodes, {invalid} invalid, {unfinished} not terminated"),
    )
}

fn golden_trace<T: Task>(
    env: &mut Env<T>,
    seed: u64,
    instance: Option<T::Instance>,
    actions: &[usize],
) -> qcenv::Result<String> {
    Ok(run_script(env, Some(seed), instance, actions)?.to_text(true))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut identical = 0;
    for run in 0..2 {
        let star = CouplingGraph::new(Graph::star(4).unwrap()).unwrap();
        let line = CouplingGraph::new(Graph::line(3).unwrap()).unwrap();
        let routed = InteractionCircuit::new(3, vec![(0, 2), (0, 1)]).unwrap();
        let scheduling = Scheduling::new(
            MachineProperties::with_defaults(2),
            CommutationRules::standard(),
        )
        .unwrap();
        let texts = [
            golden_trace(
                &mut InitialMapping::new(0.5, star).unwrap().into_env(0),
                11,
                None,
                &[0, 5, 5, 10, 15],
            ),
            golden_trace(
                &mut Routing::new(line).unwrap().into_env(0),
                12,
                Some(routed.into()),
                &[0, 1, 0, 0],
            ),
            golden_trace(
                &mut scheduling.into_env(0),
                13,
                Some(x_cnot()),
                &[3, 20, 2, 2, 1],
            ),
        ];
        for (i, text) in texts.into_iter().enumerate() {
            let text = text.map_err(|e| e.to_string())?;
            std::fs::write(dir.path().join(format!("run{run}-{i}.trace")), text)
                .map_err(|e| e.to_string())?;
        }
    }
    for i in 0..3 {
        let a =
            std::fs::read(dir.path().join(format!("run0-{i}.trace"))).map_err(|e| e.to_string())?;
        let b =
            std::fs::read(dir.path().join(format!("run1-{i}.trace"))).map_err(|e| e.to_string())?;
        identical += usize::from(a == b && !a.is_empty());
    }
    check(
        identical == 3,
        format!("{identical} of 3 trace files byte-identical"),
    )
}

fn main() {
    let criteria: [Criterion; 6] = [
        ("proof-of-concept learning curve", proof_of_concept),
        ("commutation schedule endpoint", x_cnot_endpoint),
        ("mapping oracle equivalence", mapping_equivalence),
        ("routing soundness and optimality floor", routing_soundness),
        ("schedule validity fuzz", schedule_fuzz),
        ("golden trace determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let started = Instant::now();
        let outcome = run();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} ({detail}) [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} ({detail}) [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
