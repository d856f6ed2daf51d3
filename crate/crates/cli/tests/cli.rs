use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qcenv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcenv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = qcenv(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
    stdout(&out)
}

const X_CNOT: &str = "qubits 2\nx q[1]\ncnot q[0], q[1]\nmeasure q[0]\nmeasure q[1]\n";

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn train_writes_one_row_per_episode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&[
        "train",
        "--env",
        "scheduling",
        "--agent",
        "q",
        "--episodes",
        "20000",
        "--seed",
        "1",
        "--out",
        out,
    ]);
    let csv = std::fs::read_to_string(dir.path().join("seed-1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("episode,length,total_reward,rolling_length,rolling_reward")
    );
    assert_eq!(lines.count(), 20000);
    assert!(dir.path().join("seed-1.policy.json").exists());
    let config: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("config.json")).unwrap())
            .unwrap();
    assert_eq!(config["episodes"], 20000);
    assert_eq!(config["scheduling"]["max_gates"], 5);
    assert_eq!(config["scheduling"]["n_qubits"], 2);
}

#[test]
fn training_is_deterministic_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        ok(&[
            "train",
            "--env",
            "scheduling",
            "--episodes",
            "300",
            "--seeds",
            "4,5",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
    }
    for name in [
        "seed-4.csv",
        "seed-5.csv",
        "seed-4.policy.json",
        "config.json",
    ] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
    let x = std::fs::read(a.path().join("seed-4.csv")).unwrap();
    let y = std::fs::read(a.path().join("seed-5.csv")).unwrap();
    assert_ne!(x, y);
}

/// Dotted paths of every leaf in the echoed config. Free-form values
/// (machine properties, rule sets) count as leaves.
fn config_keys(value: &Value, prefix: &str, out: &mut Vec<String>) {
    match value {
        Value::Object(map) if !prefix.ends_with("machine_properties") => {
            for (k, v) in map {
                let path = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                config_keys(v, &path, out);
            }
        }
        _ => out.push(prefix.to_string()),
    }
}

#[test]
fn help_lists_every_config_key() {
    let dir = tempfile::tempdir().unwrap();
    let echoed = ok(&[
        "train",
        "--episodes",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let json_end = echoed.find("\n}\n").unwrap() + 2;
    let config: Value = serde_json::from_str(&echoed[..json_end]).unwrap();
    let mut keys = Vec::new();
    config_keys(&config, "", &mut keys);
    assert!(keys.len() > 25, "{keys:?}");
    for command in [
        vec!["--help"],
        vec!["train", "--help"],
        vec!["eval", "--help"],
        vec!["trace", "--help"],
    ] {
        let help = ok(&command);
        for key in &keys {
            assert!(
                help.contains(key.as_str()),
                "`{key}` missing from {command:?} help"
            );
        }
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "c.json",
        r#"{"episodes": 3, "scheduling": {"max_gates": 2}}"#,
    );
    let out = dir.path().join("run");
    ok(&[
        "train",
        "--config",
        &config,
        "--max-gates",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    let effective: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(effective["episodes"], 3);
    assert_eq!(effective["scheduling"]["max_gates"], 4);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_key = write(dir.path(), "c.json", r#"{"routing": {"window": 3}}"#);
    let out = qcenv(&["gen", "--config", &bad_key]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("window"), "{}", stderr(&out));

    let out = qcenv(&["gen", "--env", "mapping", "--edge-probability", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mapping.edge_probability"));

    assert_eq!(qcenv(&["gen", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(
        qcenv(&["gen", "--env", "routing", "--coupling", "edges:4:0-1"])
            .status
            .code(),
        Some(2)
    );

    let x_cnot = write(dir.path(), "x-cnot.txt", X_CNOT);
    let out = qcenv(&[
        "render",
        "--env",
        "scheduling",
        "--instance",
        &x_cnot,
        "--format",
        "png",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_3() {
    // Four legal assignments finish the episode; the fifth action has nothing to act on.
    let out = qcenv(&[
        "trace",
        "--env",
        "mapping",
        "--seed",
        "1",
        "--actions",
        "0,5,10,15,1",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));

    let dir = tempfile::tempdir().unwrap();
    let long: String = "qubits 1\n".to_string() + &"x q[0]\n".repeat(7);
    let path = write(dir.path(), "long.txt", &long);
    let out = qcenv(&["oracle", "--env", "scheduling", "--instance", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("bound"), "{}", stderr(&out));
}

#[test]
fn render_star_coupling_graph() {
    let dot = ok(&["render", "--env", "mapping", "--coupling", "star:4"]);
    let nodes = dot
        .lines()
        .filter(|l| l.trim().ends_with(';') && !l.contains("--"))
        .count();
    let edges = dot.lines().filter(|l| l.contains(" -- ")).count();
    assert_eq!((nodes, edges), (4, 3));
}

#[test]
fn render_x_cnot_alap_gantt() {
    let dir = tempfile::tempdir().unwrap();
    let x_cnot = write(dir.path(), "x-cnot.txt", X_CNOT);
    let text = ok(&["render", "--env", "scheduling", "--instance", &x_cnot]);
    let rows: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap())
        .collect();
    assert_eq!(rows.len(), 2);
    // X on q1 in cycle 0 then the CNOT from cycle 1: no shared cycle.
    assert_eq!(&rows[1][..3], "XCC");
    assert_eq!(rows[1].matches('X').count(), 1);
    assert!(text.contains("makespan 11"));

    let lines = ok(&["alap", "--instance", &x_cnot]);
    assert_eq!(lines, "0 0\n1 1\n2 3\n3 7\n");
}

#[test]
fn render_empty_schedule() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.txt", "qubits 2\n");
    let text = ok(&["render", "--env", "scheduling", "--instance", &empty]);
    assert!(text.contains("makespan 0"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn trace_files_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.trace");
    let b = dir.path().join("b.trace");
    for path in [&a, &b] {
        ok(&[
            "trace",
            "--env",
            "routing",
            "--seed",
            "9",
            "--actions",
            "1,0,2,0",
            "--observations",
            "--out",
            path.to_str().unwrap(),
        ]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn scripted_mapping_trace() {
    // Logical q maps to physical q: actions 0, 5, 10, 15 on 4 qubits.
    let text = ok(&[
        "trace",
        "--env",
        "mapping",
        "--seed",
        "2",
        "--actions",
        "0,0,5,10,15",
    ]);
    let lines: Vec<&str> = text.lines().collect();
    let header: Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(header["seed"], 2);
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[2], "1 0 -5.0 false false");
    assert!(lines[5].ends_with("true false"), "{}", lines[5]);
}

#[test]
fn eval_mapping_on_coupling_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(
        dir.path(),
        "star.txt",
        "nodes 4\nedge 0 1\nedge 0 2\nedge 0 3\n",
    );
    let report = ok(&[
        "eval",
        "--env",
        "mapping",
        "--agent",
        "random",
        "--instance",
        &graph,
    ]);
    assert!(report.contains("terminated true"), "{report}");
    assert!(report.lines().any(|l| l.starts_with("cost ")));
    assert!(report.contains("oracle cost 0"), "{report}");
}

#[test]
fn eval_routing_empty_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.txt", "qubits 3\n");
    let report = ok(&[
        "eval",
        "--env",
        "routing",
        "--agent",
        "random",
        "--instance",
        &empty,
    ]);
    assert!(report.contains("steps 0"), "{report}");
    assert!(report.contains("swaps 0"));
    assert!(report.contains("oracle swaps 0"));
}

#[test]
fn x_cnot_policy_trained_on_the_instance() {
    let dir = tempfile::tempdir().unwrap();
    let x_cnot = write(dir.path(), "x-cnot.txt", X_CNOT);
    let out = dir.path().join("run");
    ok(&[
        "train",
        "--env",
        "scheduling",
        "--instance",
        &x_cnot,
        "--episodes",
        "3000",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let policy = out.join("seed-1.policy.json");
    let report = ok(&[
        "eval",
        "--env",
        "scheduling",
        "--instance",
        &x_cnot,
        "--policy",
        policy.to_str().unwrap(),
    ]);
    assert!(report.contains("makespan 10 (valid)"), "{report}");
    assert!(report.contains("oracle makespan 10"), "{report}");

    // A policy file from another env is refused.
    let out = qcenv(&[
        "eval",
        "--env",
        "mapping",
        "--policy",
        policy.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn render_replays_trace() {
    let dir = tempfile::tempdir().unwrap();
    let x_cnot = write(dir.path(), "x-cnot.txt", X_CNOT);
    let trace = dir.path().join("t.trace");
    ok(&[
        "trace",
        "--env",
        "scheduling",
        "--instance",
        &x_cnot,
        "--seed",
        "0",
        "--actions",
        "3,20,20,20,20,2,0,20,20,20,20,1",
        "--out",
        trace.to_str().unwrap(),
    ]);
    let lines = ok(&[
        "render",
        "--env",
        "scheduling",
        "--trace",
        trace.to_str().unwrap(),
        "--format",
        "lines",
    ]);
    assert_eq!(lines, "0 5\n1 0\n2 2\n3 6\n");

    let mapping_trace = dir.path().join("m.trace");
    ok(&[
        "trace",
        "--env",
        "mapping",
        "--seed",
        "3",
        "--actions",
        "2,4",
        "--out",
        mapping_trace.to_str().unwrap(),
    ]);
    let dot = ok(&[
        "render",
        "--env",
        "mapping",
        "--trace",
        mapping_trace.to_str().unwrap(),
    ]);
    assert!(dot.contains("q0 -> p2"), "{dot}");
    assert!(dot.contains("q1 -> p0"), "{dot}");
}

#[test]
fn gen_is_seeded() {
    let a = ok(&["gen", "--env", "routing", "--seed", "5", "--count", "3"]);
    let b = ok(&["gen", "--env", "routing", "--seed", "5", "--count", "3"]);
    assert_eq!(a, b);
    assert_eq!(a.matches("# seed 5 instance").count(), 3);
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "gen",
        "--env",
        "scheduling",
        "--seeds",
        "1,2",
        "--count",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 4);
}

#[test]
fn oracle_reports_x_cnot_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let x_cnot = write(dir.path(), "x-cnot.txt", X_CNOT);
    let record: Value = serde_json::from_str(&ok(&[
        "oracle",
        "--env",
        "scheduling",
        "--instance",
        &x_cnot,
    ]))
    .unwrap();
    assert_eq!(record["result"]["objective"], 10);
    let none: Value = serde_json::from_str(&ok(&[
        "oracle",
        "--env",
        "scheduling",
        "--rules",
        "none",
        "--instance",
        &x_cnot,
    ]))
    .unwrap();
    assert_eq!(none["result"]["objective"], 11);
}
