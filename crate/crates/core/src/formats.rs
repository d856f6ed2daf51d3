//! Plain-text formats.
//!
//! Circuits use a small QASM-like subset, one gate per line:
//!
//! ```text
//! qubits 2
//! x q[1]          # comment
//! cnot q[0], q[1]
//! measure q[0]
//! ```
//!
//! Graphs use a `nodes <n>` header followed by `edge <u> <v>` lines, or one
//! of the shorthands `star:N`, `line:N`, `complete:N`, `edges:N:0-1,1-2`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Circuit, Gate, Graph};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str, keyword: &str) -> Result<usize> {
    let mut parts = line.split_whitespace();
    match (parts.next(), parts.next(), parts.next()) {
        (Some(k), Some(n), None) if k == keyword => n
            .parse()
            .map_err(|_| parse_err(line_no, format!("`{n}` is not a count"))),
        _ => Err(parse_err(
            line_no,
            format!("expected `{keyword} <n>` header"),
        )),
    }
}

fn parse_operand(line_no: usize, text: &str) -> Result<usize> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    compact
        .strip_prefix("q[")
        .and_then(|rest| rest.strip_suffix(']'))
        .and_then(|index| index.parse().ok())
        .ok_or_else(|| parse_err(line_no, format!("bad operand `{}`", text.trim())))
}

fn is_gate_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `qubits <n>` header"))?;
    let n_qubits = parse_header(header_line, header, "qubits")?;
    let mut gates = Vec::new();
    for (line_no, line) in lines {
        let (name, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        if !is_gate_name(name) {
            return Err(parse_err(
                line_no,
                format!("`{name}` is not a lowercase gate name"),
            ));
        }
        let operands = rest
            .split(',')
            .map(|op| parse_operand(line_no, op))
            .collect::<Result<Vec<_>>>()?;
        if let Some(&q) = operands.iter().find(|&&q| q >= n_qubits) {
            return Err(parse_err(
                line_no,
                format!("qubit {q} out of range for {n_qubits} qubits"),
            ));
        }
        let gate = Gate::new(name, operands).map_err(|e| parse_err(line_no, e.to_string()))?;
        gates.push(gate);
    }
    Circuit::new(n_qubits, gates).map_err(|e| parse_err(header_line, e.to_string()))
}

pub fn write_circuit(circuit: &Circuit) -> String {
    let mut out = format!("qubits {}\n", circuit.n_qubits());
    for gate in circuit.gates() {
        let operands: Vec<String> = gate.operands().iter().map(|q| format!("q[{q}]")).collect();
        writeln!(out, "{} {}", gate.name(), operands.join(", ")).unwrap();
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (header_line, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "missing `nodes <n>` header"))?;
    let n_nodes = parse_header(header_line, header, "nodes")?;
    let mut edges = Vec::new();
    for (line_no, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["edge", u, v] => {
                let u = u
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad node `{u}`")))?;
                let v = v
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad node `{v}`")))?;
                edges.push((u, v));
            }
            _ => return Err(parse_err(line_no, "expected `edge <u> <v>`")),
        }
    }
    Graph::new(n_nodes, edges).map_err(|e| parse_err(header_line, e.to_string()))
}

/// `None` when `spec` is not a shorthand.
pub fn graph_shorthand(spec: &str) -> Option<Result<Graph>> {
    let (kind, rest) = spec.split_once(':')?;
    let bad = |what: &str| Error::InvalidParameter(format!("graph `{spec}` has a bad {what}"));
    let count = |n: &str| n.trim().parse::<usize>().map_err(|_| bad("node count"));
    let graph = match kind {
        "star" => count(rest).and_then(Graph::star),
        "line" => count(rest).and_then(Graph::line),
        "complete" => count(rest).and_then(Graph::complete),
        "edges" => {
            let (n, list) = rest.split_once(':').unwrap_or((rest, ""));
            let node = |v: &str| v.trim().parse::<usize>().map_err(|_| bad("edge"));
            list.split(',')
                .filter(|e| !e.trim().is_empty())
                .map(|e| {
                    let (a, b) = e.split_once('-').ok_or_else(|| bad("edge"))?;
                    Ok((node(a)?, node(b)?))
                })
                .collect::<Result<Vec<_>>>()
                .and_then(|edges| Graph::new(count(n)?, edges))
        }
        _ => return None,
    };
    Some(graph)
}

pub fn write_graph(graph: &Graph) -> String {
    let mut out = format!("nodes {}\n", graph.n_nodes());
    for (u, v) in graph.edges() {
        writeln!(out, "edge {u} {v}").unwrap();
    }
    out
}
