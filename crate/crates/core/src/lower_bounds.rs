//! Hard instances behind the regret lower bounds, with every closed-form
//! quantity of their analysis computed exactly.
//!
//! Two constructions are covered. The two-node pair swaps a small `eps` bump
//! between the self-loops of nodes 0 and 1, so each instance's optimal node
//! is the other's suboptimal one. The K-node family keeps uniform transitions
//! and instead raises the mean Bernoulli length of one absorbing edge.

use crate::builtin;
use crate::error::{Error, Result};
use crate::markov::{expected_hitting_times, ChainInstance, EdgeLengths, HittingSolver};
use crate::walk::{bernoulli_length_process, LengthProcess};

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..0.25).contains(&eps) {
        return Err(Error::param("eps", format!("{eps} not in [0, 1/4)")));
    }
    Ok(())
}

/// `J` (bump on node 1) and `J'` (bump on node 0), unit lengths.
#[derive(Debug, Clone)]
pub struct TwoNodePair {
    pub eps: f64,
    pub j: ChainInstance,
    pub j_prime: ChainInstance,
}

impl TwoNodePair {
    pub fn new(eps: f64) -> Result<Self> {
        check_eps(eps)?;
        Ok(Self {
            eps,
            j: builtin::fig1(eps),
            j_prime: builtin::fig1_prime(eps),
        })
    }
}

/// Exact optimality gap `|mu_0 - mu_1|` of `J`, from the linear solve.
pub fn two_node_gap(eps: f64) -> Result<f64> {
    let pair = TwoNodePair::new(eps)?;
    let mu = expected_hitting_times(&pair.j, &EdgeLengths::unit(2))?;
    Ok((mu[0] - mu[1]).abs())
}

/// `64 eps / (15 - 32 eps)`.
pub fn two_node_gap_closed_form(eps: f64) -> f64 {
    64.0 * eps / (15.0 - 32.0 * eps)
}

/// `sum_x p(x) ln(p(x) / q(x))`, with `0 ln 0 = 0`.
pub fn categorical_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &qi)| pi * (pi / qi).ln())
        .sum()
}

/// KL between Bernoulli(a) and Bernoulli(b).
pub fn bernoulli_kl(a: f64, b: f64) -> f64 {
    categorical_kl(&[a, 1.0 - a], &[b, 1.0 - b])
}

/// Law of the first step from `i`: transient nodes, then the absorbing node.
pub fn step_distribution(chain: &ChainInstance, i: usize) -> Vec<f64> {
    let mut d = chain.row(i).to_vec();
    d.push(chain.absorb(i));
    d
}

/// KL between the first-step laws from `node` under `J` and `J'`.
pub fn per_step_kl(eps: f64, node: usize) -> Result<f64> {
    let pair = TwoNodePair::new(eps)?;
    if node > 1 {
        return Err(Error::param("node", format!("{node} not in {{0, 1}}")));
    }
    Ok(categorical_kl(
        &step_distribution(&pair.j, node),
        &step_distribution(&pair.j_prime, node),
    ))
}

/// Whole-trajectory KL from each start node, `KL(Q_i || Q'_i)`.
///
/// The chain rule gives `d_i = c_i + sum_j m_ij d_j` with `c_i` the per-step
/// KL from `i` and `m` the transitions of `J`; the same system as hitting
/// times with `c` as step costs.
pub fn trajectory_kl(eps: f64) -> Result<(f64, f64)> {
    let pair = TwoNodePair::new(eps)?;
    let c = [per_step_kl(eps, 0)?, per_step_kl(eps, 1)?];
    let d = HittingSolver::new(&pair.j)?.solve(&c)?;
    Ok((d[0], d[1]))
}

/// Leading-order lower bound `(32/15) eps T exp(-(112/9) T eps^2)`.
pub fn regret_lb_value(eps: f64, horizon: f64) -> f64 {
    32.0 / 15.0 * eps * horizon * (-112.0 / 9.0 * horizon * eps * eps).exp()
}

/// `eps* = T^(-1/2) / 4` and the bound it yields.
pub fn minimax_choice(horizon: f64) -> (f64, f64) {
    let eps = 0.25 / horizon.sqrt();
    (eps, regret_lb_value(eps, horizon))
}

/// `K` nodes, every transition probability `p = 1/(2K)`, Bernoulli lengths.
///
/// Instance `k` (zero-based here) raises the mean of node `k`'s absorbing
/// edge to `1/2 + eps / (1 - Kp)`; the base instance has every mean at 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct KNodeFamily {
    pub k: usize,
    pub p: f64,
    pub eps: f64,
}

impl KNodeFamily {
    /// `eps = (1 / (4 sqrt 2)) ((K - 1) / K) sqrt(K / T)`.
    pub fn new(k: usize, horizon: usize) -> Result<Self> {
        if k == 0 || horizon == 0 {
            return Err(Error::param("family", "K and T must be positive"));
        }
        let kf = k as f64;
        let eps = (kf - 1.0) / kf * (kf / horizon as f64).sqrt() / (4.0 * 2f64.sqrt());
        Self::with_eps(k, eps)
    }

    pub fn with_eps(k: usize, eps: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k", "must be positive"));
        }
        let p = 1.0 / (2.0 * k as f64);
        let family = Self { k, p, eps };
        if !(eps >= 0.0 && family.bump() <= 0.5) {
            return Err(Error::param(
                "eps",
                format!("length mean 1/2 + {} leaves [0, 1]", family.bump()),
            ));
        }
        Ok(family)
    }

    /// `1 - Kp`, the absorbing probability of every node.
    pub fn absorb(&self) -> f64 {
        1.0 - self.k as f64 * self.p
    }

    /// `eps / (1 - Kp)`, the raise in the bumped edge's mean.
    pub fn bump(&self) -> f64 {
        self.eps / self.absorb()
    }

    pub fn chain(&self) -> ChainInstance {
        ChainInstance::new(
            self.k,
            vec![self.p; self.k * self.k],
            self.k as f64 * self.p,
        )
        .expect("uniform K-node chain is valid")
    }

    /// Mean edge lengths of instance `bumped` (`None` for the base instance).
    pub fn length_means(&self, bumped: Option<usize>) -> EdgeLengths {
        let mut l = EdgeLengths::constant(self.k, 0.5).expect("1/2 is a valid length");
        if let Some(b) = bumped {
            l.set(b, self.k, 0.5 + self.bump())
                .expect("bump checked at construction");
        }
        l
    }

    pub fn length_process(&self, bumped: Option<usize>) -> Result<LengthProcess> {
        bernoulli_length_process(self.k, self.length_means(bumped).as_slice().to_vec())
    }

    pub fn hitting_times(&self, bumped: Option<usize>) -> Result<Vec<f64>> {
        expected_hitting_times(&self.chain(), &self.length_means(bumped))
    }
}

/// Gap between the best and second-best hitting time in instance `bumped`.
pub fn k_node_gap(family: &KNodeFamily, bumped: usize) -> Result<f64> {
    let mut h = family.hitting_times(Some(bumped))?;
    h.sort_by(|a, b| b.total_cmp(a));
    Ok(match h.as_slice() {
        [first, second, ..] => first - second,
        _ => 0.0,
    })
}

/// `sqrt(K T) / (8 sqrt 2)`.
pub fn k_node_bound(k: usize, horizon: usize) -> f64 {
    ((k * horizon) as f64).sqrt() / (8.0 * 2f64.sqrt())
}

/// Exact KL between the laws of `(X_1, L_1)` from node `i` in the base
/// instance and in instance `bumped`.
///
/// Only the absorbing edge of `bumped` differs, so the divergence is
/// `(1 - Kp) KL(Bern(1/2) || Bern(1/2 + eps/(1-Kp)))` when `i == bumped`.
pub fn per_step_kl_knode(family: &KNodeFamily, i: usize, bumped: usize) -> f64 {
    if i != bumped {
        return 0.0;
    }
    family.absorb() * bernoulli_kl(0.5, 0.5 + family.bump())
}

/// One row of the lower-bound report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub eps: f64,
    pub gap_exact: f64,
    pub gap_leading: f64,
    pub step_kl_ratio: f64,
    pub trajectory_kl_ratio: f64,
    pub horizon: f64,
    pub regret_lb: f64,
}

pub fn report_row(eps: f64, horizon: f64) -> Result<ReportRow> {
    let e2 = eps * eps;
    let ratio = |x: f64| if eps > 0.0 { x / e2 } else { f64::NAN };
    Ok(ReportRow {
        eps,
        gap_exact: two_node_gap(eps)?,
        gap_leading: 64.0 * eps / 15.0,
        step_kl_ratio: ratio(per_step_kl(eps, 0)?),
        trajectory_kl_ratio: ratio(trajectory_kl(eps)?.0),
        horizon,
        regret_lb: regret_lb_value(eps, horizon),
    })
}
