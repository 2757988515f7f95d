//! Seeded simulation of random-walk trajectories and edge-length processes.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal as StatNormal};

use crate::error::{Error, Result};
use crate::markov::{ChainInstance, EdgeLengths};

/// Generator used for every simulation.
pub type SimRng = ChaCha8Rng;

/// Hard cap on walk steps. Exceeding it under a valid chain has probability
/// below `rho^(10^7)`.
pub const STEP_CAP: usize = 10_000_000;

/// An independent stream for `(run, purpose)` under a master seed.
///
/// ChaCha's 64-bit stream id splits one key into non-overlapping sequences,
/// so runs never share randomness.
pub fn stream_rng(master_seed: u64, run: u64, purpose: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(run.wrapping_mul(4).wrapping_add(purpose));
    rng
}

/// One random walk from the played node to absorption.
///
/// `visits` holds `X_0, ..., X_{H-1}` (all transient); the absorbing node is
/// the implicit terminal `X_H`. `lengths[k]` is the length of the edge leaving
/// `visits[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub epoch: usize,
    visits: Vec<usize>,
    lengths: Vec<f64>,
}

impl Trajectory {
    pub fn from_parts(epoch: usize, visits: Vec<usize>, lengths: Vec<f64>) -> Result<Self> {
        if visits.is_empty() || visits.len() != lengths.len() {
            return Err(Error::param(
                "trajectory",
                format!(
                    "need H >= 1 visits with one length each, got {} visits and {} lengths",
                    visits.len(),
                    lengths.len()
                ),
            ));
        }
        if let Some(&bad) = lengths.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Domain {
                value: bad,
                domain: "[0, 1] edge length",
            });
        }
        Ok(Self {
            epoch,
            visits,
            lengths,
        })
    }

    /// The node that was played, `X_0`.
    pub fn played(&self) -> usize {
        self.visits[0]
    }

    /// Number of edges traversed, `H >= 1`.
    pub fn hops(&self) -> usize {
        self.lengths.len()
    }

    pub fn visits(&self) -> &[usize] {
        &self.visits
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    /// Total edge length: the reward of the play.
    pub fn length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Length from position `pos` to absorption.
    pub fn suffix_length(&self, pos: usize) -> f64 {
        self.lengths[pos..].iter().sum()
    }

    pub fn first_occurrence(&self, v: usize) -> Option<usize> {
        self.visits.iter().position(|&x| x == v)
    }

    pub fn covers(&self, v: usize) -> bool {
        self.visits.contains(&v)
    }

    /// Space-separated node ids ending in `*`.
    pub fn node_string(&self) -> String {
        let mut s: Vec<String> = self.visits.iter().map(|v| v.to_string()).collect();
        s.push("*".into());
        s.join(" ")
    }
}

/// Length of a trajectory, `sum_k L_k`.
pub fn trajectory_length(traj: &Trajectory) -> f64 {
    traj.length()
}

/// Walk from `start` until absorption, drawing one uniform per step.
pub fn sample_trajectory<R: Rng + ?Sized>(
    chain: &ChainInstance,
    lengths: &EdgeLengths,
    start: usize,
    epoch: usize,
    rng: &mut R,
) -> Result<Trajectory> {
    let k = chain.k();
    if start >= k {
        return Err(Error::param(
            "start",
            format!("node {start} not in [0, {k})"),
        ));
    }
    if lengths.k() != k {
        return Err(Error::Dimension {
            expected: k,
            got: lengths.k(),
        });
    }
    let mut visits = vec![start];
    let mut steps = Vec::new();
    let mut at = start;
    loop {
        if steps.len() >= STEP_CAP {
            return Err(Error::StepCap {
                start,
                cap: STEP_CAP,
            });
        }
        let next = next_node(chain.row(at), rng.gen::<f64>());
        match next {
            Some(j) => {
                steps.push(lengths.get(at, j));
                visits.push(j);
                at = j;
            }
            None => {
                steps.push(lengths.absorbing(at));
                break;
            }
        }
    }
    Ok(Trajectory {
        epoch,
        visits,
        lengths: steps,
    })
}

/// `None` is the absorbing node.
#[inline]
fn next_node(row: &[f64], u: f64) -> Option<usize> {
    let mut acc = 0.0;
    for (j, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return Some(j);
        }
    }
    None
}

/// Edge-length law of the nine-node experiment: one Gaussian draw `W_t` per
/// epoch moves every absorbing edge together, with a fixed boost on one node.
#[derive(Debug, Clone, PartialEq)]
pub struct ClippedGaussian {
    pub k: usize,
    pub boosted: usize,
    pub boost: f64,
    pub mean: f64,
    /// Standard deviation, not variance.
    pub std: f64,
}

impl ClippedGaussian {
    pub fn lengths_for_draw(&self, w: f64) -> EdgeLengths {
        let mut l = EdgeLengths::unit(self.k);
        for i in 0..self.k {
            let shift = if i == self.boosted { self.boost } else { 0.0 };
            l.set(i, self.k, (w + shift).clamp(0.0, 1.0))
                .expect("clipped value in range");
        }
        l
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        Normal::new(self.mean, self.std)
            .expect("positive std")
            .sample(rng)
    }

    /// Per-edge means, using the closed form of `E[clip(X)]` for Gaussian `X`.
    pub fn expected(&self) -> EdgeLengths {
        let mut l = EdgeLengths::unit(self.k);
        for i in 0..self.k {
            let shift = if i == self.boosted { self.boost } else { 0.0 };
            l.set(i, self.k, clipped_normal_mean(self.mean + shift, self.std))
                .expect("mean of a [0,1] variable");
        }
        l
    }
}

/// `E[clip_[0,1](X)]` for `X ~ N(mean, std^2)`.
pub fn clipped_normal_mean(mean: f64, std: f64) -> f64 {
    let z = StatNormal::new(0.0, 1.0).expect("standard normal");
    let a = (0.0 - mean) / std;
    let b = (1.0 - mean) / std;
    let inside = mean * (z.cdf(b) - z.cdf(a)) - std * (z.pdf(b) - z.pdf(a));
    (inside + (1.0 - z.cdf(b))).clamp(0.0, 1.0)
}

/// Independent Bernoulli length on every edge, every epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliLengths {
    /// Row-major `K x (K+1)` success probabilities.
    means: EdgeLengths,
}

impl BernoulliLengths {
    pub fn means(&self) -> &EdgeLengths {
        &self.means
    }
}

/// How edge lengths evolve across epochs.
///
/// Every variant is oblivious: realized lengths never depend on the
/// policy's choices.
#[derive(Debug, Clone, PartialEq)]
pub enum LengthProcess {
    Fixed(EdgeLengths),
    ClippedGaussian(ClippedGaussian),
    Bernoulli(BernoulliLengths),
    /// Explicit per-epoch lengths, indexed from epoch 1.
    Schedule(Vec<EdgeLengths>),
}

/// The nine-node experiment's length law: `W_t ~ N(0.5, 0.1^2)`, absorbing
/// edge of node 0 gets `clip(W_t + 0.5)`, the others `clip(W_t)`, all
/// remaining edges have length 1.
pub fn exp_adv_length_process(k: usize) -> LengthProcess {
    LengthProcess::ClippedGaussian(ClippedGaussian {
        k,
        boosted: 0,
        boost: 0.5,
        mean: 0.5,
        std: 0.1,
    })
}

/// Independent Bernoulli lengths with the given per-edge means.
pub fn bernoulli_length_process(k: usize, means: Vec<f64>) -> Result<LengthProcess> {
    let means = EdgeLengths::new(k, means).map_err(|e| match e {
        Error::Domain { value, .. } => {
            Error::param("means", format!("Bernoulli mean {value} outside [0, 1]"))
        }
        other => other,
    })?;
    Ok(LengthProcess::Bernoulli(BernoulliLengths { means }))
}

impl LengthProcess {
    pub fn k(&self) -> usize {
        match self {
            LengthProcess::Fixed(l) => l.k(),
            LengthProcess::ClippedGaussian(g) => g.k,
            LengthProcess::Bernoulli(b) => b.means.k(),
            LengthProcess::Schedule(s) => s.first().map_or(0, EdgeLengths::k),
        }
    }

    /// True when every epoch shares one length law.
    pub fn is_stationary(&self) -> bool {
        !matches!(self, LengthProcess::Schedule(_))
    }

    /// Lengths in force at epoch `t` (1-based).
    pub fn realize<R: Rng + ?Sized>(&self, t: usize, rng: &mut R) -> Result<EdgeLengths> {
        match self {
            LengthProcess::Fixed(l) => Ok(l.clone()),
            LengthProcess::ClippedGaussian(g) => Ok(g.lengths_for_draw(g.draw(rng))),
            LengthProcess::Bernoulli(b) => {
                let data = b
                    .means
                    .as_slice()
                    .iter()
                    .map(|&p| if rng.gen::<f64>() < p { 1.0 } else { 0.0 })
                    .collect();
                EdgeLengths::new(b.means.k(), data)
            }
            LengthProcess::Schedule(s) => self.scheduled(s, t).cloned(),
        }
    }

    /// Expected lengths at epoch `t`.
    pub fn expected(&self, t: usize) -> Result<EdgeLengths> {
        match self {
            LengthProcess::Fixed(l) => Ok(l.clone()),
            LengthProcess::ClippedGaussian(g) => Ok(g.expected()),
            LengthProcess::Bernoulli(b) => Ok(b.means.clone()),
            LengthProcess::Schedule(s) => self.scheduled(s, t).cloned(),
        }
    }

    fn scheduled<'a>(&self, s: &'a [EdgeLengths], t: usize) -> Result<&'a EdgeLengths> {
        t.checked_sub(1).and_then(|i| s.get(i)).ok_or_else(|| {
            Error::param(
                "epoch",
                format!("epoch {t} outside schedule of {}", s.len()),
            )
        })
    }

    /// Freeze `horizon` epochs into an explicit schedule before any play.
    pub fn freeze<R: Rng + ?Sized>(&self, horizon: usize, rng: &mut R) -> Result<LengthProcess> {
        let epochs = (1..=horizon)
            .map(|t| self.realize(t, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(LengthProcess::Schedule(epochs))
    }
}

/// Writes `t,played,hops,length,nodes` rows.
pub struct TrajectoryLog<W: Write> {
    out: csv::Writer<W>,
}

impl<W: Write> TrajectoryLog<W> {
    pub fn new(inner: W) -> Result<Self> {
        let mut out = csv::Writer::from_writer(inner);
        out.write_record(["t", "played", "hops", "length", "nodes"])?;
        Ok(Self { out })
    }

    pub fn push(&mut self, traj: &Trajectory) -> Result<()> {
        self.out.write_record([
            traj.epoch.to_string(),
            traj.played().to_string(),
            traj.hops().to_string(),
            traj.length().to_string(),
            traj.node_string(),
        ])?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.out.flush()?;
        self.out.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}
