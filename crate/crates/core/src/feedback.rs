//! Hitting-time samples and co-occurrence statistics extracted from
//! trajectories.
//!
//! A trajectory that reaches node `v` yields one sample of `v`'s hitting time:
//! the suffix length from the first visit of `v`. Only the first visit is
//! used; conditioning on later revisits would bias the sample.

use std::io::Write;

use crate::error::{Error, Result};
use crate::markov::{first_passage_probs, ChainInstance};
use crate::walk::Trajectory;

/// Suffix length from the first visit of `v`, or `None` if the trajectory
/// never reaches `v`.
pub fn extract_sample(traj: &Trajectory, v: usize) -> Option<f64> {
    traj.first_occurrence(v).map(|pos| traj.suffix_length(pos))
}

/// Ordered pairs `(i, j)` such that `i` is covered and `j` is visited after
/// the first visit of `i`.
///
/// Counting these estimates `q_ij`: by the Markov property the walk after the
/// first visit of `i` is a fresh walk from `i`.
pub fn pair_indicators(traj: &Trajectory, k: usize) -> Vec<(usize, usize)> {
    let (first, last) = occurrence_bounds(traj, k);
    let mut out = Vec::new();
    for (i, fi) in first.iter().enumerate() {
        let Some(fi) = *fi else { continue };
        for (j, lj) in last.iter().enumerate() {
            if j != i && lj.is_some_and(|lj| lj > fi) {
                out.push((i, j));
            }
        }
    }
    out
}

fn occurrence_bounds(traj: &Trajectory, k: usize) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut first = vec![None; k];
    let mut last = vec![None; k];
    for (pos, &v) in traj.visits().iter().enumerate() {
        if v < k {
            first[v].get_or_insert(pos);
            last[v] = Some(pos);
        }
    }
    (first, last)
}

/// Per-node counters for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackLedger {
    k: usize,
    /// Next epoch to be recorded (1-based).
    epoch: usize,
    plays: Vec<u64>,
    covers: Vec<u64>,
    /// Row-major `K x K`.
    pairs: Vec<u64>,
    sample_sum: Vec<f64>,
    last_samples: Vec<Option<f64>>,
}

impl FeedbackLedger {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            epoch: 1,
            plays: vec![0; k],
            covers: vec![0; k],
            pairs: vec![0; k * k],
            sample_sum: vec![0.0; k],
            last_samples: vec![None; k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The epoch the next trajectory must come from.
    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// `N_t(v) = 1 v #plays of v`.
    pub fn play_count(&self, v: usize) -> u64 {
        self.plays[v].max(1)
    }

    /// `N_t^+(v) = 1 v #trajectories covering v`.
    pub fn cover_count(&self, v: usize) -> u64 {
        self.covers[v].max(1)
    }

    pub fn raw_plays(&self, v: usize) -> u64 {
        self.plays[v]
    }

    pub fn raw_covers(&self, v: usize) -> u64 {
        self.covers[v]
    }

    pub fn pair_count(&self, i: usize, j: usize) -> u64 {
        self.pairs[i * self.k + j]
    }

    /// Mean of the extracted samples of `v`; `None` before the first one.
    pub fn mean_sample(&self, v: usize) -> Option<f64> {
        (self.covers[v] > 0).then(|| self.sample_sum[v] / self.covers[v] as f64)
    }

    /// Samples extracted from the most recently recorded trajectory.
    pub fn last_samples(&self) -> &[Option<f64>] {
        &self.last_samples
    }

    pub fn record(&mut self, traj: &Trajectory) -> Result<()> {
        if traj.epoch != self.epoch {
            return Err(Error::Sequencing {
                expected: self.epoch,
                got: traj.epoch,
            });
        }
        if let Some(&bad) = traj.visits().iter().find(|&&v| v >= self.k) {
            return Err(Error::param(
                "trajectory",
                format!("node {bad} not in [0, {})", self.k),
            ));
        }
        self.plays[traj.played()] += 1;
        for v in 0..self.k {
            let y = extract_sample(traj, v);
            if let Some(y) = y {
                self.covers[v] += 1;
                self.sample_sum[v] += y;
            }
            self.last_samples[v] = y;
        }
        for (i, j) in pair_indicators(traj, self.k) {
            self.pairs[i * self.k + j] += 1;
        }
        debug_assert!((0..self.k).all(|v| self.covers[v] >= self.plays[v]));
        self.epoch += 1;
        Ok(())
    }

    /// `q_hat_ij = #(i covered, then j) / N^+(i)`, row-major, diagonal 1.
    pub fn q_hat(&self) -> Vec<f64> {
        let k = self.k;
        let mut q = vec![0.0; k * k];
        for i in 0..k {
            let n = self.cover_count(i) as f64;
            for j in 0..k {
                q[i * k + j] = if i == j {
                    1.0
                } else {
                    self.pairs[i * k + j] as f64 / n
                };
            }
        }
        q
    }

    /// `p_hat_j = p_j + sum_{i != j} q_hat_ij p_i`.
    pub fn p_hat(&self, p: &[f64]) -> Vec<f64> {
        coverage_probability(p, &self.q_hat())
    }

    /// CSV snapshot: `v, N, N_plus, mean_y, q_0 .. q_{K-1}`.
    pub fn write_snapshot<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![
            "v".to_string(),
            "n".into(),
            "n_plus".into(),
            "mean_y".into(),
        ];
        header.extend((0..self.k).map(|j| format!("q_{j}")));
        w.write_record(&header)?;
        let q = self.q_hat();
        for v in 0..self.k {
            let mut row = vec![
                v.to_string(),
                self.play_count(v).to_string(),
                self.cover_count(v).to_string(),
                self.mean_sample(v).map_or(String::new(), |m| m.to_string()),
            ];
            row.extend(q[v * self.k..(v + 1) * self.k].iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Exact `q_ij = Pr(walk from i visits j)`, row-major, diagonal 1.
pub fn true_coverage(chain: &ChainInstance) -> Result<Vec<f64>> {
    let k = chain.k();
    let mut q = vec![0.0; k * k];
    for j in 0..k {
        let r = first_passage_probs(chain, j)?;
        for i in 0..k {
            q[i * k + j] = r[i];
        }
    }
    Ok(q)
}

/// `out_j = p_j + sum_{i != j} q_ij p_i` for a row-major coverage matrix.
pub fn coverage_probability(p: &[f64], q: &[f64]) -> Vec<f64> {
    let k = p.len();
    (0..k)
        .map(|j| {
            p[j] + (0..k)
                .filter(|&i| i != j)
                .map(|i| q[i * k + j] * p[i])
                .sum::<f64>()
        })
        .collect()
}

/// `p_tilde_j`: exact probability that node `j` is covered when the played
/// node is drawn from `p`.
pub fn p_tilde(chain: &ChainInstance, p: &[f64]) -> Result<Vec<f64>> {
    Ok(coverage_probability(p, &true_coverage(chain)?))
}
