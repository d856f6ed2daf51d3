use std::fmt::Write as _;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub length: usize,
    pub total_reward: f64,
}

/// Per-episode learning curve.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrainingLog {
    pub records: Vec<EpisodeRecord>,
}

impl TrainingLog {
    pub fn push(&mut self, length: usize, total_reward: f64) {
        let episode = self.records.len();
        self.records.push(EpisodeRecord {
            episode,
            length,
            total_reward,
        });
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Mean (length, reward) over the `min(window, episode + 1)` records
    /// ending at `episode`.
    pub fn rolling_mean(&self, episode: usize, window: usize) -> (f64, f64) {
        let window = window.max(1);
        let from = (episode + 1).saturating_sub(window);
        mean(&self.records[from..=episode])
    }

    /// Mean (length, reward) over records `range`.
    pub fn mean_over(&self, range: std::ops::Range<usize>) -> (f64, f64) {
        mean(&self.records[range])
    }

    pub fn to_csv(&self, window: usize) -> String {
        let mut out = String::from("episode,length,total_reward,rolling_length,rolling_reward\n");
        for r in &self.records {
            let (len, reward) = self.rolling_mean(r.episode, window);
            writeln!(
                out,
                "{},{},{},{:.4},{:.4}",
                r.episode, r.length, r.total_reward, len, reward
            )
            .unwrap();
        }
        out
    }
}

fn mean(records: &[EpisodeRecord]) -> (f64, f64) {
    if records.is_empty() {
        return (0.0, 0.0);
    }
    let n = records.len() as f64;
    let length: f64 = records.iter().map(|r| r.length as f64).sum();
    let reward: f64 = records.iter().map(|r| r.total_reward).sum();
    (length / n, reward / n)
}
