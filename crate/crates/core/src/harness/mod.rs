//! Seeded end-to-end runs with exact regret accounting.
//!
//! Regret is always measured in expected hitting times computed by the
//! linear solver, never in realized walk lengths; realized lengths are
//! logged alongside for reference.

mod config;
mod output;
mod plot;
mod repro;

pub use config::{Config, EstimatorKind, InstanceSpec, LengthSpec};
pub use output::{write_curves, write_run};
pub use plot::plot_csv;
pub use repro::{
    aggregate, reproduce_fig_adv, reproduce_fig_sto, Curve, FigAdv, FigAdvSettings, FigSto,
    FigStoSettings,
};

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::markov::{ChainInstance, HittingSolver};
use crate::policy::Policy;
use crate::walk::{sample_trajectory, stream_rng, LengthProcess, SimRng};

/// Stream purposes under one `(master, run)` pair.
const PLAY_STREAM: u64 = 0;
const LENGTH_STREAM: u64 = 1;
const SCHEDULE_STREAM: u64 = 2;

/// Identifies one run's randomness: run `run` under `master`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSeed {
    pub master: u64,
    pub run: u64,
}

impl RunSeed {
    pub fn new(master: u64, run: u64) -> Self {
        Self { master, run }
    }

    /// Drives policy randomization and walks.
    pub fn play_rng(&self) -> SimRng {
        stream_rng(self.master, self.run, PLAY_STREAM)
    }

    /// Drives per-epoch length draws of a stochastic length process.
    pub fn length_rng(&self) -> SimRng {
        stream_rng(self.master, self.run, LENGTH_STREAM)
    }

    /// Drives an oblivious schedule, drawn before the run starts.
    pub fn schedule_rng(&self) -> SimRng {
        stream_rng(self.master, self.run, SCHEDULE_STREAM)
    }

    /// `count` consecutive runs under one master seed.
    pub fn runs(master: u64, count: usize) -> Vec<RunSeed> {
        (0..count as u64)
            .map(|run| RunSeed { master, run })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRow {
    pub t: usize,
    pub played: usize,
    /// Realized walk length `L(P_t)`.
    pub realized: f64,
    /// Cumulative regret against the best fixed node so far.
    pub regret: f64,
    /// `max_v |estimate_v - mu_v|`, for policies that keep estimates.
    pub estimate_error: Option<f64>,
    pub diagnostics: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub policy: String,
    pub seed: RunSeed,
    pub k: usize,
    pub epochs: Vec<EpochRow>,
    /// Exact per-epoch expected hitting times `l_t`; a single entry when
    /// they do not change across epochs.
    pub expected: Vec<Vec<f64>>,
    /// Final regret against each fixed node.
    pub regret_per_node: Vec<f64>,
    pub diagnostic_names: Vec<String>,
    pub wall_time: Duration,
}

impl RunRecord {
    pub fn final_regret(&self) -> f64 {
        self.epochs.last().map_or(0.0, |r| r.regret)
    }

    pub fn horizon(&self) -> usize {
        self.epochs.len()
    }

    /// `l_t` for epoch `t` (1-based).
    pub fn expected_at(&self, t: usize) -> &[f64] {
        if self.expected.len() == 1 {
            &self.expected[0]
        } else {
            &self.expected[t - 1]
        }
    }

    pub fn plays(&self) -> Vec<usize> {
        self.epochs.iter().map(|r| r.played).collect()
    }
}

/// Cumulative regret against the best fixed node, recomputed from the
/// logged plays and per-epoch expected hitting times.
pub fn recompute_regret(plays: &[usize], expected: &dyn Fn(usize) -> Vec<f64>) -> Vec<f64> {
    let mut totals: Vec<f64> = Vec::new();
    let mut got = 0.0;
    plays
        .iter()
        .enumerate()
        .map(|(idx, &j)| {
            let l = expected(idx + 1);
            if totals.is_empty() {
                totals = vec![0.0; l.len()];
            }
            for (s, x) in totals.iter_mut().zip(&l) {
                *s += x;
            }
            got += l[j];
            totals.iter().copied().fold(f64::NEG_INFINITY, f64::max) - got
        })
        .collect()
}

struct Tally {
    totals: Vec<f64>,
    got: f64,
}

impl Tally {
    fn new(k: usize) -> Self {
        Self {
            totals: vec![0.0; k],
            got: 0.0,
        }
    }

    fn push(&mut self, l: &[f64], played: usize) -> f64 {
        for (s, x) in self.totals.iter_mut().zip(l) {
            *s += x;
        }
        self.got += l[played];
        self.totals
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
            - self.got
    }

    fn per_node(&self) -> Vec<f64> {
        self.totals.iter().map(|s| s - self.got).collect()
    }
}

fn check_process(chain: &ChainInstance, process: &LengthProcess) -> Result<()> {
    if process.k() != chain.k() {
        return Err(Error::Dimension {
            expected: chain.k(),
            got: process.k(),
        });
    }
    Ok(())
}

/// Stochastic run: lengths are drawn afresh each epoch from a stationary
/// law; regret uses the hitting times of the mean lengths.
pub fn run_stochastic(
    policy: &mut dyn Policy,
    chain: &ChainInstance,
    process: &LengthProcess,
    horizon: usize,
    seed: RunSeed,
) -> Result<RunRecord> {
    check_process(chain, process)?;
    if !process.is_stationary() {
        return Err(Error::param(
            "process",
            "stochastic runs need a stationary length law; use run_adversarial for schedules",
        ));
    }
    let solver = HittingSolver::new(chain)?;
    let mu = solver.hitting_times(chain, &process.expected(1)?)?;
    let start = Instant::now();
    let mut play_rng = seed.play_rng();
    let mut length_rng = seed.length_rng();
    let mut tally = Tally::new(chain.k());
    let mut epochs = Vec::with_capacity(horizon);
    for t in 1..=horizon {
        let mut diagnostics = policy.pre_diagnostics();
        let j = policy.select(&mut play_rng);
        let lengths = process.realize(t, &mut length_rng)?;
        let traj = sample_trajectory(chain, &lengths, j, t, &mut play_rng)?;
        policy.observe(&traj)?;
        diagnostics.extend(policy.post_diagnostics());
        let estimate_error = policy.estimates().map(|est| {
            est.iter()
                .zip(&mu)
                .map(|(e, m)| (e - m).abs())
                .fold(0.0, f64::max)
        });
        epochs.push(EpochRow {
            t,
            played: j,
            realized: traj.length(),
            regret: tally.push(&mu, j),
            estimate_error,
            diagnostics,
        });
    }
    Ok(RunRecord {
        policy: policy.name(),
        seed,
        k: chain.k(),
        epochs,
        expected: vec![mu],
        regret_per_node: tally.per_node(),
        diagnostic_names: policy.diagnostic_names(),
        wall_time: start.elapsed(),
    })
}

/// Adversarial run against an oblivious schedule with one entry per epoch.
/// `l_t` is solved exactly each epoch, reusing one factorization of `I - M`.
pub fn run_adversarial(
    policy: &mut dyn Policy,
    chain: &ChainInstance,
    schedule: &LengthProcess,
    horizon: usize,
    seed: RunSeed,
) -> Result<RunRecord> {
    check_process(chain, schedule)?;
    let LengthProcess::Schedule(epochs_lengths) = schedule else {
        return Err(Error::param(
            "schedule",
            "adversarial runs need an explicit schedule",
        ));
    };
    if epochs_lengths.len() != horizon {
        return Err(Error::param(
            "schedule",
            format!(
                "schedule has {} epochs, horizon is {horizon}",
                epochs_lengths.len()
            ),
        ));
    }
    let solver = HittingSolver::new(chain)?;
    let expected = epochs_lengths
        .iter()
        .map(|l| solver.hitting_times(chain, l))
        .collect::<Result<Vec<_>>>()?;
    let start = Instant::now();
    let mut play_rng = seed.play_rng();
    let mut tally = Tally::new(chain.k());
    let mut epochs = Vec::with_capacity(horizon);
    for (idx, lengths) in epochs_lengths.iter().enumerate() {
        let t = idx + 1;
        let mut diagnostics = policy.pre_diagnostics();
        let j = policy.select(&mut play_rng);
        let traj = sample_trajectory(chain, lengths, j, t, &mut play_rng)?;
        policy.observe(&traj)?;
        diagnostics.extend(policy.post_diagnostics());
        epochs.push(EpochRow {
            t,
            played: j,
            realized: traj.length(),
            regret: tally.push(&expected[idx], j),
            estimate_error: None,
            diagnostics,
        });
    }
    Ok(RunRecord {
        policy: policy.name(),
        seed,
        k: chain.k(),
        epochs,
        expected,
        regret_per_node: tally.per_node(),
        diagnostic_names: policy.diagnostic_names(),
        wall_time: start.elapsed(),
    })
}

/// Freeze `process` into a `horizon`-epoch schedule from the run's
/// schedule stream.
pub fn oblivious_schedule(
    process: &LengthProcess,
    horizon: usize,
    seed: RunSeed,
) -> Result<LengthProcess> {
    match process {
        LengthProcess::Schedule(_) => Ok(process.clone()),
        other => other.freeze(horizon, &mut seed.schedule_rng()),
    }
}

/// Run `job` for every seed in parallel; results keep seed order.
pub fn fan_out<F>(seeds: &[RunSeed], job: F) -> Result<Vec<RunRecord>>
where
    F: Fn(RunSeed) -> Result<RunRecord> + Sync,
{
    seeds.par_iter().map(|&s| job(s)).collect()
}
