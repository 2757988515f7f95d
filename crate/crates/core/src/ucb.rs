//! Optimistic index policy on trajectory-extracted hitting-time samples.
//!
//! Every covered node contributes a sample, so a node's estimate improves
//! whenever any walk passes through it. The `PlayedOnly` source restricts
//! samples to the played node and recovers ordinary UCB.

use crate::error::Result;
use crate::feedback::{extract_sample, FeedbackLedger};
use crate::policy::Policy;
use crate::walk::{SimRng, Trajectory};

/// Which samples feed a node's estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleSource {
    /// One sample per covering trajectory (`N^+` samples).
    Trajectory,
    /// Only the full length of walks started at the node (`N` samples).
    PlayedOnly,
}

/// Truncation level `xi_t = ceil(3 ln(t + 1) / ln(1 / rho)) + 1`.
///
/// A walk is longer than `xi_t` with probability at most
/// `rho^xi_t / (1 - rho) <= t^-3 / (1 - rho)`.
pub fn truncation_level(t: usize, rho: f64) -> u32 {
    let raw = crate::markov::ceil_tol(3.0 * ((t + 1) as f64).ln() / (1.0 / rho).ln());
    raw.max(0.0) as u32 + 1
}

/// Confidence width for a node with `n` samples at epoch `t`:
/// a Hoeffding term on samples truncated at `xi_t`, plus the truncation bias.
pub fn confidence(n: u64, t: usize, k: usize, rho: f64) -> f64 {
    let n = n.max(1) as f64;
    let t = t.max(1);
    let xi = truncation_level(t, rho);
    let log_term = (2.0 * k as f64 * (t as f64).powi(2)).ln();
    xi as f64 * (2.0 * log_term / n).sqrt() + rho.powi(xi as i32) / (1.0 - rho).powi(2)
}

#[derive(Debug, Clone)]
pub struct UcbState {
    k: usize,
    rho: f64,
    source: SampleSource,
    ledger: FeedbackLedger,
    samples: Vec<Vec<f64>>,
    raw_sum: Vec<f64>,
    clip_level: u32,
    clipped_sum: Vec<f64>,
    width_scale: f64,
}

impl UcbState {
    pub fn new(k: usize, rho: f64, source: SampleSource) -> Self {
        Self {
            k,
            rho,
            source,
            ledger: FeedbackLedger::new(k),
            samples: vec![Vec::new(); k],
            raw_sum: vec![0.0; k],
            clip_level: truncation_level(1, rho),
            clipped_sum: vec![0.0; k],
            width_scale: 1.0,
        }
    }

    /// Multiply every confidence width by `scale` (default 1).
    pub fn with_width_scale(mut self, scale: f64) -> Self {
        self.width_scale = scale;
        self
    }

    pub fn width_scale(&self) -> f64 {
        self.width_scale
    }

    pub fn ledger(&self) -> &FeedbackLedger {
        &self.ledger
    }

    /// Epoch about to be played (1-based).
    pub fn epoch(&self) -> usize {
        self.ledger.epoch()
    }

    pub fn source(&self) -> SampleSource {
        self.source
    }

    pub fn sample_count(&self, v: usize) -> u64 {
        self.samples[v].len() as u64
    }

    fn width_count(&self, v: usize) -> u64 {
        match self.source {
            SampleSource::Trajectory => self.ledger.cover_count(v),
            SampleSource::PlayedOnly => self.ledger.play_count(v),
        }
    }

    pub fn in_warm_up(&self) -> bool {
        (0..self.k).any(|v| self.ledger.raw_plays(v) == 0)
    }

    /// Mean of samples clipped to `[0, xi_t]`; zero for a node without samples.
    pub fn clipped_estimates(&self) -> Vec<f64> {
        (0..self.k)
            .map(|v| match self.samples[v].len() {
                0 => 0.0,
                n => self.clipped_sum[v] / n as f64,
            })
            .collect()
    }

    /// Unclipped sample means; zero for a node without samples.
    pub fn raw_estimates(&self) -> Vec<f64> {
        (0..self.k)
            .map(|v| match self.samples[v].len() {
                0 => 0.0,
                n => self.raw_sum[v] / n as f64,
            })
            .collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        let t = self.epoch();
        (0..self.k)
            .map(|v| self.width_scale * confidence(self.width_count(v), t, self.k, self.rho))
            .collect()
    }

    pub fn indices(&self) -> Vec<f64> {
        self.clipped_estimates()
            .into_iter()
            .zip(self.widths())
            .map(|(z, c)| z + c)
            .collect()
    }

    /// Warm-up plays unplayed nodes in id order; afterwards the argmax index,
    /// lowest id on ties.
    pub fn select(&self) -> usize {
        if let Some(v) = (0..self.k).find(|&v| self.ledger.raw_plays(v) == 0) {
            return v;
        }
        let idx = self.indices();
        let mut best = 0;
        for v in 1..self.k {
            if idx[v] > idx[best] {
                best = v;
            }
        }
        best
    }

    pub fn step(&mut self, traj: &Trajectory) -> Result<()> {
        self.ledger.record(traj)?;
        match self.source {
            SampleSource::Trajectory => {
                for v in 0..self.k {
                    if let Some(y) = extract_sample(traj, v) {
                        self.push_sample(v, y);
                    }
                }
            }
            SampleSource::PlayedOnly => self.push_sample(traj.played(), traj.length()),
        }
        self.refresh_clip();
        Ok(())
    }

    fn push_sample(&mut self, v: usize, y: f64) {
        self.samples[v].push(y);
        self.raw_sum[v] += y;
        self.clipped_sum[v] += y.min(self.clip_level as f64);
    }

    fn refresh_clip(&mut self) {
        let level = truncation_level(self.epoch(), self.rho);
        if level != self.clip_level {
            self.clip_level = level;
            for v in 0..self.k {
                self.clipped_sum[v] = self.samples[v].iter().map(|y| y.min(level as f64)).sum();
            }
        }
    }
}

impl Policy for UcbState {
    fn name(&self) -> String {
        match self.source {
            SampleSource::Trajectory => "trajectory-ucb".into(),
            SampleSource::PlayedOnly => "ucb".into(),
        }
    }

    fn select(&mut self, _rng: &mut SimRng) -> usize {
        UcbState::select(self)
    }

    fn observe(&mut self, traj: &Trajectory) -> Result<()> {
        self.step(traj)
    }

    fn estimates(&self) -> Option<Vec<f64>> {
        Some(self.raw_estimates())
    }

    fn diagnostic_names(&self) -> Vec<String> {
        (0..self.k)
            .map(|v| format!("index_{v}"))
            .chain((0..self.k).map(|v| format!("ztilde_{v}")))
            .collect()
    }

    fn pre_diagnostics(&self) -> Vec<f64> {
        let mut out = self.indices();
        out.extend(self.clipped_estimates());
        out
    }
}
