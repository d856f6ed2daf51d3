use crate::envs::scheduling::schedule_from_reverse;
use crate::error::Result;
use crate::model::{dependency_dag, Circuit, CommutationRules, MachineProperties, Schedule};

/// As-late-as-possible list scheduling.
///
/// Walks reverse cycles from the end of the circuit and, at each cycle,
/// places every ready gate whose qubits and exclusion class are free,
/// considering gates in reverse circuit order. Without `rules` every pair
/// of gates sharing a qubit keeps its circuit order.
pub fn alap_schedule(
    circuit: &Circuit,
    props: &MachineProperties,
    rules: Option<&CommutationRules>,
) -> Result<Schedule> {
    let empty = CommutationRules::empty();
    let dag = dependency_dag(circuit, rules.unwrap_or(&empty));
    let gates = circuit.gates();
    let durations = gates
        .iter()
        .map(|g| props.duration(g.name()))
        .collect::<Result<Vec<_>>>()?;
    let classes: Vec<Option<usize>> = gates
        .iter()
        .map(|g| props.exclusion_class(g.name()))
        .collect();

    let mut reverse: Vec<Option<u32>> = vec![None; gates.len()];
    let mut qubit_free = vec![0u32; circuit.n_qubits()];
    let mut class_free = vec![0u32; props.exclusion_classes.len()];
    let mut remaining = gates.len();
    let mut r = 0u32;
    while remaining > 0 {
        for g in (0..gates.len()).rev() {
            if reverse[g].is_some() {
                continue;
            }
            let ready = dag.successors(g).iter().all(|&s| reverse[s].is_some());
            let qubits = gates[g].operands().iter().all(|&q| qubit_free[q] <= r);
            let class = classes[g].is_none_or(|c| class_free[c] <= r);
            if ready && qubits && class {
                let end = r + durations[g];
                reverse[g] = Some(r);
                for &q in gates[g].operands() {
                    qubit_free[q] = end;
                }
                if let Some(c) = classes[g] {
                    class_free[c] = end;
                }
                remaining -= 1;
            }
        }
        r += 1;
    }
    let reverse: Vec<u32> = reverse
        .into_iter()
        .map(|r| r.expect("all placed"))
        .collect();
    Ok(schedule_from_reverse(circuit, props, &reverse, &durations))
}
