//! Exponential weights with trajectory-wide importance-weighted estimates.
//!
//! Every epoch updates the cumulative score of every node: a covered node
//! contributes its extracted hitting-time sample, weighted by the estimated
//! probability that it is covered at all.

use rand::Rng;

use crate::error::{Error, Result};
use crate::feedback::{coverage_probability, FeedbackLedger};
use crate::markov::{b_param, hitting_centrality, kappa_from_centrality, ChainInstance};
use crate::policy::Policy;
use crate::walk::{SimRng, Trajectory};

/// How a trajectory is turned into per-node estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    /// `((Z - B) / B * 1[i covered] + beta) / p_hat_i`.
    Shifted { b: f64, beta: f64 },
    /// `Z * 1[i covered] / p_hat_i`, no shift and no implicit exploration.
    Covered,
    /// Standard EXP3: `Z * 1[i played] / p_i`.
    PlayedOnly,
}

impl Estimator {
    /// Estimates for all nodes given the extracted samples of one trajectory,
    /// the sampling distribution it was drawn under and a row-major coverage
    /// matrix (`q_hat` or the exact `q`).
    pub fn estimate(
        &self,
        samples: &[Option<f64>],
        played: usize,
        p: &[f64],
        q: &[f64],
    ) -> Vec<f64> {
        match *self {
            Estimator::Shifted { b, beta } => {
                let denom = coverage_probability(p, q);
                samples
                    .iter()
                    .zip(denom)
                    .map(|(z, d)| shifted_estimate(*z, b, beta, d))
                    .collect()
            }
            Estimator::Covered => {
                let denom = coverage_probability(p, q);
                samples
                    .iter()
                    .zip(denom)
                    .map(|(z, d)| z.map_or(0.0, |z| z / d))
                    .collect()
            }
            Estimator::PlayedOnly => samples
                .iter()
                .enumerate()
                .map(|(i, z)| match z {
                    Some(z) if i == played => z / p[i],
                    _ => 0.0,
                })
                .collect(),
        }
    }
}

/// `((z - b) / b * 1[covered] + beta) / denom`.
pub fn shifted_estimate(sample: Option<f64>, b: f64, beta: f64, denom: f64) -> f64 {
    let shifted = sample.map_or(0.0, |z| (z - b) / b);
    (shifted + beta) / denom
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exp3Params {
    pub eta: f64,
    pub beta: f64,
    pub b: u32,
    pub eps: f64,
}

/// `B` from the tail bound, `eta = beta = 1 / sqrt(kappa T)`.
///
/// Warns when `beta` exceeds the hitting centrality `alpha`; the analysis
/// assumes `beta <= alpha` but small horizons break it.
pub fn default_params(chain: &ChainInstance, horizon: usize, eps: f64) -> Result<Exp3Params> {
    if horizon == 0 {
        return Err(Error::param("horizon", "must be at least 1"));
    }
    if !(eps > 0.0 && eps <= 1.0 / horizon as f64) {
        return Err(Error::param(
            "eps",
            format!("{eps} not in (0, 1/T] for T = {horizon}"),
        ));
    }
    let b = b_param(chain.k(), horizon, chain.rho(), eps)?;
    let cen = hitting_centrality(chain)?;
    let kappa = kappa_from_centrality(&cen.per_node)?;
    let rate = 1.0 / (kappa * horizon as f64).sqrt();
    if rate > cen.min {
        log::warn!(
            "implicit exploration beta = {rate:.4} exceeds hitting centrality alpha = {:.4}",
            cen.min
        );
    }
    Ok(Exp3Params {
        eta: rate,
        beta: rate,
        b,
        eps,
    })
}

/// Numerically safe softmax of `eta * scores`.
pub fn softmax(scores: &[f64], eta: f64) -> Vec<f64> {
    let max = scores
        .iter()
        .map(|s| eta * s)
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = scores.iter().map(|s| (eta * s - max).exp()).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

#[derive(Debug, Clone)]
pub struct Exp3State {
    k: usize,
    eta: f64,
    estimator: Estimator,
    ledger: FeedbackLedger,
    s_hat: Vec<f64>,
    p: Vec<f64>,
    last_estimates: Vec<f64>,
}

impl Exp3State {
    pub fn new(k: usize, eta: f64, estimator: Estimator) -> Self {
        Self {
            k,
            eta,
            estimator,
            ledger: FeedbackLedger::new(k),
            s_hat: vec![0.0; k],
            p: vec![1.0 / k as f64; k],
            last_estimates: vec![0.0; k],
        }
    }

    /// The shifted estimator with the default parameters.
    pub fn with_defaults(chain: &ChainInstance, horizon: usize, eps: f64) -> Result<Self> {
        let p = default_params(chain, horizon, eps)?;
        Ok(Self::new(
            chain.k(),
            p.eta,
            Estimator::Shifted {
                b: p.b as f64,
                beta: p.beta,
            },
        ))
    }

    pub fn epoch(&self) -> usize {
        self.ledger.epoch()
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    pub fn ledger(&self) -> &FeedbackLedger {
        &self.ledger
    }

    /// `p_t`: uniform at `t = 1`, softmax of `eta * S_hat_{t-1}` afterwards.
    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn scores(&self) -> &[f64] {
        &self.s_hat
    }

    pub fn last_estimates(&self) -> &[f64] {
        &self.last_estimates
    }

    /// Nodes whose score moved in the last update.
    pub fn last_update_count(&self) -> usize {
        self.last_estimates.iter().filter(|&&z| z != 0.0).count()
    }

    /// Estimates for the current epoch's trajectory, using `p_t` and `q_hat`
    /// from strictly earlier epochs.
    pub fn loss_estimate(&self, traj: &Trajectory) -> Vec<f64> {
        let samples: Vec<Option<f64>> = (0..self.k)
            .map(|v| crate::feedback::extract_sample(traj, v))
            .collect();
        self.estimator
            .estimate(&samples, traj.played(), &self.p, &self.ledger.q_hat())
    }

    pub fn sample_node<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, &p) in self.p.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.k - 1
    }

    pub fn update(&mut self, traj: &Trajectory) -> Result<()> {
        let z = self.loss_estimate(traj);
        self.ledger.record(traj)?;
        for (s, dz) in self.s_hat.iter_mut().zip(&z) {
            *s += dz;
        }
        self.last_estimates = z;
        self.p = softmax(&self.s_hat, self.eta);
        Ok(())
    }
}

impl Policy for Exp3State {
    fn name(&self) -> String {
        match self.estimator {
            Estimator::Shifted { .. } => "trajectory-exp3".into(),
            Estimator::Covered => "trajectory-exp3-covered".into(),
            Estimator::PlayedOnly => "exp3".into(),
        }
    }

    fn select(&mut self, rng: &mut SimRng) -> usize {
        self.sample_node(rng)
    }

    fn observe(&mut self, traj: &Trajectory) -> Result<()> {
        self.update(traj)
    }

    fn diagnostic_names(&self) -> Vec<String> {
        (0..self.k)
            .map(|v| format!("p_{v}"))
            .chain((0..self.k).map(|v| format!("zhat_{v}")))
            .collect()
    }

    fn pre_diagnostics(&self) -> Vec<f64> {
        self.p.clone()
    }

    fn post_diagnostics(&self) -> Vec<f64> {
        self.last_estimates.clone()
    }
}
