//! Multi-seed reproductions of the nine-node experiments.

use crate::builtin;
use crate::error::{Error, Result};
use crate::exp3::{Estimator, Exp3State};
use crate::stats::mean_std;
use crate::ucb::{SampleSource, UcbState};
use crate::walk::exp_adv_length_process;

use super::{fan_out, oblivious_schedule, run_adversarial, run_stochastic, RunRecord, RunSeed};

/// Mean and one standard deviation across runs, per epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub t: Vec<usize>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Curve {
    /// Value at epoch `t` (1-based).
    pub fn mean_at(&self, t: usize) -> f64 {
        self.mean[t - 1]
    }

    pub fn std_at(&self, t: usize) -> f64 {
        self.std[t - 1]
    }
}

/// Aggregate one per-epoch quantity over runs of equal length. Epochs where
/// `value` is `None` for any run come out as NaN.
pub fn aggregate(
    records: &[RunRecord],
    value: impl Fn(&super::EpochRow) -> Option<f64>,
) -> Result<Curve> {
    let Some(first) = records.first() else {
        return Err(Error::param("records", "no runs to aggregate"));
    };
    let horizon = first.horizon();
    if records.iter().any(|r| r.horizon() != horizon) {
        return Err(Error::param("records", "runs have different horizons"));
    }
    let mut curve = Curve {
        t: Vec::with_capacity(horizon),
        mean: Vec::with_capacity(horizon),
        std: Vec::with_capacity(horizon),
    };
    let mut column = Vec::with_capacity(records.len());
    for i in 0..horizon {
        column.clear();
        column.extend(records.iter().filter_map(|r| value(&r.epochs[i])));
        let (m, s) = if column.len() == records.len() {
            mean_std(&column)
        } else {
            (f64::NAN, f64::NAN)
        };
        curve.t.push(i + 1);
        curve.mean.push(m);
        curve.std.push(s);
    }
    Ok(curve)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigAdvSettings {
    pub horizon: usize,
    pub runs: usize,
    pub master_seed: u64,
    pub eta: f64,
}

impl Default for FigAdvSettings {
    fn default() -> Self {
        Self {
            horizon: 30_000,
            runs: 10,
            master_seed: 2024,
            eta: 0.001,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FigAdv {
    /// Trajectory-feedback EXP3 with the covered-node estimator.
    pub trajectory: Curve,
    /// Standard EXP3, played node only.
    pub standard: Curve,
    pub trajectory_runs: Vec<RunRecord>,
    pub standard_runs: Vec<RunRecord>,
}

/// Both EXP3 variants on the nine-node ring against the clipped-Gaussian
/// schedule, one frozen schedule per run shared by the two variants.
pub fn reproduce_fig_adv(settings: &FigAdvSettings) -> Result<FigAdv> {
    let chain = builtin::exp9();
    let process = exp_adv_length_process(chain.k());
    let seeds = RunSeed::runs(settings.master_seed, settings.runs);
    let run = |estimator: Estimator| {
        fan_out(&seeds, |seed| {
            let schedule = oblivious_schedule(&process, settings.horizon, seed)?;
            let mut policy = Exp3State::new(chain.k(), settings.eta, estimator);
            run_adversarial(&mut policy, &chain, &schedule, settings.horizon, seed)
        })
    };
    let trajectory_runs = run(Estimator::Covered)?;
    let standard_runs = run(Estimator::PlayedOnly)?;
    Ok(FigAdv {
        trajectory: aggregate(&trajectory_runs, |r| Some(r.regret))?,
        standard: aggregate(&standard_runs, |r| Some(r.regret))?,
        trajectory_runs,
        standard_runs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigStoSettings {
    pub horizon: usize,
    pub runs: usize,
    pub master_seed: u64,
    /// Multiplier on the UCB confidence width; 1 is the unscaled index.
    pub width_scale: f64,
}

impl Default for FigStoSettings {
    fn default() -> Self {
        Self {
            horizon: 20_000,
            runs: 10,
            master_seed: 2024,
            width_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FigSto {
    pub regret: Curve,
    /// `max_v |estimate_v - mu_v|`.
    pub error: Curve,
    pub runs: Vec<RunRecord>,
}

/// Trajectory-feedback UCB on the nine-node ring with i.i.d.
/// clipped-Gaussian lengths.
pub fn reproduce_fig_sto(settings: &FigStoSettings) -> Result<FigSto> {
    let chain = builtin::exp9();
    let process = exp_adv_length_process(chain.k());
    let seeds = RunSeed::runs(settings.master_seed, settings.runs);
    let runs = fan_out(&seeds, |seed| {
        let mut policy = UcbState::new(chain.k(), chain.rho(), SampleSource::Trajectory)
            .with_width_scale(settings.width_scale);
        run_stochastic(&mut policy, &chain, &process, settings.horizon, seed)
    })?;
    Ok(FigSto {
        regret: aggregate(&runs, |r| Some(r.regret))?,
        error: aggregate(&runs, |r| r.estimate_error)?,
        runs,
    })
}
