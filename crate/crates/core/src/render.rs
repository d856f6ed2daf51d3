//! Text, DOT and SVG views of graphs, mappings and schedules.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::model::{CouplingGraph, Graph, InteractionGraph, Mapping, Schedule};

/// Undirected DOT graph, one line per node and per edge.
pub fn graph_dot(graph: &Graph, name: &str) -> String {
    let mut out = format!("graph {name} {{\n");
    for v in 0..graph.n_nodes() {
        writeln!(out, "  {v};").unwrap();
    }
    for (a, b) in graph.edges() {
        writeln!(out, "  {a} -- {b};").unwrap();
    }
    out.push_str("}\n");
    out
}

/// Interaction and coupling graphs side by side. Logical nodes are labelled
/// with the physical qubit they sit on; coupling edges that carry a mapped
/// interaction edge are drawn bold.
pub fn mapping_dot(
    interaction: &InteractionGraph,
    coupling: &CouplingGraph,
    mapping: &Mapping,
) -> String {
    let mut out = String::from("graph mapping {\n");
    out.push_str("  subgraph cluster_logical {\n    label=\"interaction\";\n");
    for l in 0..interaction.n_nodes() {
        let label = match mapping.get(l) {
            Some(p) => format!("q{l} -> p{p}"),
            None => format!("q{l}"),
        };
        writeln!(out, "    l{l} [label=\"{label}\"];").unwrap();
    }
    for (a, b) in interaction.edges() {
        writeln!(out, "    l{a} -- l{b};").unwrap();
    }
    out.push_str("  }\n  subgraph cluster_physical {\n    label=\"coupling\";\n");
    for p in 0..coupling.n_nodes() {
        writeln!(out, "    p{p} [label=\"p{p}\"];").unwrap();
    }
    for (a, b) in coupling.edges() {
        let used = interaction
            .edges()
            .any(|(x, y)| match (mapping.get(x), mapping.get(y)) {
                (Some(u), Some(v)) => (u.min(v), u.max(v)) == (a, b),
                _ => false,
            });
        let style = if used { " [penwidth=3]" } else { "" };
        writeln!(out, "    p{a} -- p{b}{style};").unwrap();
    }
    out.push_str("  }\n}\n");
    out
}

fn gate_symbol(name: &str) -> char {
    name.chars().next().map_or('?', |c| c.to_ascii_uppercase())
}

/// One row per qubit, one column per cycle. Busy cycles show the first
/// letter of the gate name, idle cycles `.`.
pub fn gantt_text(schedule: &Schedule) -> String {
    let n = schedule.circuit().n_qubits();
    let width = schedule.makespan() as usize;
    let mut rows = vec![vec!['.'; width]; n];
    for (i, gate) in schedule.circuit().gates().iter().enumerate() {
        for &q in gate.operands() {
            for t in schedule.start(i)..schedule.end(i) {
                rows[q][t as usize] = gate_symbol(gate.name());
            }
        }
    }
    let label_width = format!("q{}", n.saturating_sub(1)).len();
    let mut out = String::new();
    writeln!(out, "{:label_width$} makespan {width}", "").unwrap();
    for (q, row) in rows.iter().enumerate() {
        let line: String = row.iter().collect();
        writeln!(out, "{:<label_width$} {line}", format!("q{q}")).unwrap();
    }
    out
}

const CELL: f64 = 28.0;
const ROW: f64 = 34.0;
const MARGIN: f64 = 40.0;

fn svg_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Gantt chart. Two-qubit gates span their operand rows with a connector.
pub fn gantt_svg(schedule: &Schedule) -> String {
    let n = schedule.circuit().n_qubits();
    let makespan = schedule.makespan();
    let w = MARGIN * 2.0 + CELL * makespan.max(1) as f64;
    let h = MARGIN * 2.0 + ROW * n as f64;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"monospace\" font-size=\"12\">\n"
    );
    for q in 0..n {
        let y = MARGIN + ROW * q as f64 + ROW / 2.0;
        writeln!(
            out,
            "<text x=\"4\" y=\"{}\">q{q}</text><line x1=\"{MARGIN}\" y1=\"{y}\" x2=\"{}\" y2=\"{y}\" stroke=\"#bbb\"/>",
            y + 4.0,
            w - MARGIN
        )
        .unwrap();
    }
    for t in 0..=makespan {
        let x = MARGIN + CELL * t as f64;
        writeln!(
            out,
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\" fill=\"#888\">{t}</text>",
            MARGIN - 8.0
        )
        .unwrap();
    }
    for (i, gate) in schedule.circuit().gates().iter().enumerate() {
        let x = MARGIN + CELL * schedule.start(i) as f64;
        let bw = CELL * schedule.duration(i) as f64;
        let rows: Vec<f64> = gate
            .operands()
            .iter()
            .map(|&q| MARGIN + ROW * q as f64 + 4.0)
            .collect();
        if let [a, b] = rows[..] {
            let (top, bottom) = (a.min(b), a.max(b));
            writeln!(
                out,
                "<line x1=\"{0}\" y1=\"{top}\" x2=\"{0}\" y2=\"{1}\" stroke=\"#345\" stroke-width=\"2\"/>",
                x + bw / 2.0,
                bottom + ROW - 8.0
            )
            .unwrap();
        }
        for y in rows {
            writeln!(
                out,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{bw}\" height=\"{}\" rx=\"3\" fill=\"#8ab\" stroke=\"#345\"><title>{i}: {} @{}</title></rect>",
                ROW - 8.0,
                svg_escape(gate.name()),
                schedule.start(i)
            )
            .unwrap();
            writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
                x + bw / 2.0,
                y + ROW / 2.0,
                svg_escape(gate.name())
            )
            .unwrap();
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Nodes on a circle. `highlight` edges are drawn thick and coloured.
pub fn graph_svg(graph: &Graph, labels: &[String], highlight: &[(usize, usize)]) -> String {
    let n = graph.n_nodes();
    let size = 240.0;
    let c = size / 2.0;
    let r = if n > 1 { 85.0 } else { 0.0 };
    let pos = |v: usize| {
        let a = 2.0 * PI * v as f64 / n as f64 - PI / 2.0;
        (c + r * a.cos(), c + r * a.sin())
    };
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" viewBox=\"0 0 {size} {size}\" font-family=\"monospace\" font-size=\"12\">\n"
    );
    for (a, b) in graph.edges() {
        let ((x1, y1), (x2, y2)) = (pos(a), pos(b));
        let hot = highlight
            .iter()
            .any(|&(u, v)| (u.min(v), u.max(v)) == (a, b));
        let (stroke, width) = if hot { ("#c40", 4) } else { ("#555", 1) };
        writeln!(
            out,
            "<line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>"
        )
        .unwrap();
    }
    for v in 0..n {
        let (x, y) = pos(v);
        let label = labels.get(v).cloned().unwrap_or_else(|| v.to_string());
        writeln!(
            out,
            "<circle cx=\"{x:.1}\" cy=\"{y:.1}\" r=\"16\" fill=\"#eef\" stroke=\"#335\"/><text x=\"{x:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>",
            y + 4.0,
            svg_escape(&label)
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
