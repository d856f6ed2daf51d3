use web_time::Instant;

use super::{OracleLimits, OracleResult};
use crate::error::{Error, Result};
use crate::model::{CouplingGraph, InteractionGraph, Mapping};

/// Steps `perm` to its lexicographic successor; false after the last one.
fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = perm
        .iter()
        .rposition(|&v| v > perm[i])
        .expect("pivot has a larger element");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

pub fn optimal_mapping(ig: &InteractionGraph, cg: &CouplingGraph) -> Result<OracleResult<Mapping>> {
    optimal_mapping_with(ig, cg, &OracleLimits::default())
}

/// Tries all `n!` bijections in lexicographic order; ties go to the
/// lexicographically smallest assignment.
pub fn optimal_mapping_with(
    ig: &InteractionGraph,
    cg: &CouplingGraph,
    limits: &OracleLimits,
) -> Result<OracleResult<Mapping>> {
    let n = cg.n_nodes();
    if ig.n_nodes() != n {
        return Err(Error::NodeCountMismatch {
            expected: n,
            found: ig.n_nodes(),
        });
    }
    if n > limits.mapping_nodes {
        return Err(Error::OracleBound {
            problem: "mapping node count",
            limit: limits.mapping_nodes,
            found: n,
        });
    }
    let started = Instant::now();
    let edges: Vec<(usize, usize)> = ig.edges().collect();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (usize::MAX, perm.clone());
    let mut explored = 0u64;
    loop {
        explored += 1;
        let cost = edges
            .iter()
            .filter(|&&(u, v)| !cg.has_edge(perm[u], perm[v]))
            .count();
        if cost < best.0 {
            best = (cost, perm.clone());
            if cost == 0 {
                break;
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(OracleResult {
        objective: best.0 as u64,
        witness: Mapping::from_permutation(&best.1)?,
        nodes_explored: explored,
        elapsed: started.elapsed(),
    })
}
