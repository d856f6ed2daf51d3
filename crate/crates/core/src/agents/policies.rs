use crate::env::Policy;
use crate::envs::scheduling::SchedulingObservation;
use crate::rng::RngStream;

/// Lowest-index legal gate; advance only when nothing is legal.
pub fn greedy_scheduling_policy(observation: &SchedulingObservation) -> usize {
    observation
        .legal_mask
        .iter()
        .position(|&m| m == 1)
        .unwrap_or_else(|| observation.advance_action())
}

/// Uniform over legal actions, or over the whole action space when the
/// mask has no legal entry.
pub fn masked_random_policy(mask: &[bool], rng: &mut RngStream) -> usize {
    let legal: Vec<usize> = (0..mask.len()).filter(|&a| mask[a]).collect();
    if legal.is_empty() {
        rng.below(mask.len().max(1))
    } else {
        legal[rng.below(legal.len())]
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct GreedyScheduling;

impl Policy<SchedulingObservation> for GreedyScheduling {
    fn act(&mut self, observation: &SchedulingObservation, _mask: &[bool]) -> usize {
        greedy_scheduling_policy(observation)
    }
}

#[derive(Debug, Clone)]
pub struct MaskedRandom {
    rng: RngStream,
}

impl MaskedRandom {
    pub fn new(seed: u64) -> Self {
        Self::from_rng(RngStream::new(seed))
    }

    pub fn from_rng(rng: RngStream) -> Self {
        Self { rng }
    }
}

impl<O> Policy<O> for MaskedRandom {
    fn act(&mut self, _observation: &O, mask: &[bool]) -> usize {
        masked_random_policy(mask, &mut self.rng)
    }
}
