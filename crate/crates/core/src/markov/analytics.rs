use nalgebra::{DMatrix, DVector, Dyn, LU};

use super::{ChainInstance, EdgeLengths};
use crate::error::{Error, Result};

/// LU factorization of `I - M`, reusable across right-hand sides.
///
/// Expected hitting times satisfy `mu = M mu + c`, where `c` holds the
/// expected one-step length out of each node.
#[derive(Debug, Clone)]
pub struct HittingSolver {
    k: usize,
    lu: LU<f64, Dyn, Dyn>,
}

impl HittingSolver {
    pub fn new(chain: &ChainInstance) -> Result<Self> {
        let k = chain.k();
        let a = DMatrix::from_fn(k, k, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - chain.m(i, j)
        });
        let lu = a.lu();
        if !lu.is_invertible() {
            return Err(Error::Singular);
        }
        Ok(Self { k, lu })
    }

    /// Solve `(I - M) x = rhs`.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.k {
            return Err(Error::Dimension {
                expected: self.k,
                got: rhs.len(),
            });
        }
        let b = DVector::from_column_slice(rhs);
        let x = self.lu.solve(&b).ok_or(Error::Singular)?;
        Ok(x.iter().copied().collect())
    }

    /// Expected hitting times under the given lengths.
    pub fn hitting_times(&self, chain: &ChainInstance, lengths: &EdgeLengths) -> Result<Vec<f64>> {
        self.solve(&lengths.step_costs(chain)?)
    }
}

/// `mu_i = E[length of a walk started at i]`, the exact solution of
/// `(I - M) mu = c`.
pub fn expected_hitting_times(chain: &ChainInstance, lengths: &EdgeLengths) -> Result<Vec<f64>> {
    HittingSolver::new(chain)?.hitting_times(chain, lengths)
}

/// Hitting times with every edge of length one, i.e. expected step counts.
pub fn unit_hitting_times(chain: &ChainInstance) -> Result<Vec<f64>> {
    HittingSolver::new(chain)?.solve(&vec![1.0; chain.k()])
}

/// `r_u = Pr(walk from u visits target before absorption)`, with `r_target = 1`.
pub fn first_passage_probs(chain: &ChainInstance, target: usize) -> Result<Vec<f64>> {
    let k = chain.k();
    if target >= k {
        return Err(Error::param(
            "target",
            format!("node {target} not in [0, {k})"),
        ));
    }
    let mut out = vec![0.0; k];
    out[target] = 1.0;
    if k == 1 {
        return Ok(out);
    }
    // Unknowns are r_u for u != target: r_u - sum_{j != target} m_uj r_j = m_u,target.
    let others: Vec<usize> = (0..k).filter(|&u| u != target).collect();
    let n = others.len();
    let a = DMatrix::from_fn(n, n, |r, c| {
        let id = if r == c { 1.0 } else { 0.0 };
        id - chain.m(others[r], others[c])
    });
    let b = DVector::from_iterator(n, others.iter().map(|&u| chain.m(u, target)));
    let x = a.lu().solve(&b).ok_or(Error::Singular)?;
    for (idx, &u) in others.iter().enumerate() {
        out[u] = if chain.reachable(u, target) {
            x[idx].clamp(0.0, 1.0)
        } else {
            0.0
        };
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Centrality {
    /// `alpha_v = min_{u != v} Pr(walk from u visits v)`.
    pub per_node: Vec<f64>,
    pub min: f64,
    /// Set for `K = 1`, where the minimum is vacuous and `alpha_1 = 1`.
    pub single_node: bool,
}

pub fn hitting_centrality(chain: &ChainInstance) -> Result<Centrality> {
    let k = chain.k();
    if k == 1 {
        return Ok(Centrality {
            per_node: vec![1.0],
            min: 1.0,
            single_node: true,
        });
    }
    let per_node = (0..k)
        .map(|v| {
            let r = first_passage_probs(chain, v)?;
            Ok((0..k)
                .filter(|&u| u != v)
                .map(|u| r[u])
                .fold(f64::INFINITY, f64::min))
        })
        .collect::<Result<Vec<f64>>>()?;
    let min = per_node.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Centrality {
        per_node,
        min,
        single_node: false,
    })
}

/// `f(x) = (1 - sqrt x) / (1 + sqrt x)` on `[0, 1]`.
pub fn f_curve(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            value: x,
            domain: "[0, 1]",
        });
    }
    let s = x.sqrt();
    Ok((1.0 - s) / (1.0 + s))
}

/// `kappa = 1 + sum_j f(alpha_j)`.
pub fn kappa_from_centrality(alphas: &[f64]) -> Result<f64> {
    alphas
        .iter()
        .try_fold(1.0, |acc, &a| Ok(acc + f_curve(a.clamp(0.0, 1.0))?))
}

pub fn kappa(chain: &ChainInstance) -> Result<f64> {
    kappa_from_centrality(&hitting_centrality(chain)?.per_node)
}

/// `rho^B / (1 - rho)`: bounds `Pr(Z > B)` for a walk whose rows keep
/// absorbing mass at least `1 - rho`.
pub fn tail_bound(rho: f64, b: u32) -> f64 {
    rho.powi(b as i32) / (1.0 - rho)
}

/// Smallest truncation level `B >= 1` with `K T rho^B / (1 - rho) <= eps`.
pub fn b_param(k: usize, horizon: usize, rho: f64, eps: f64) -> Result<u32> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::param("rho", format!("{rho} not in (0, 1)")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps", format!("{eps} not in (0, 1)")));
    }
    let kt = (k * horizon) as f64;
    let raw = ceil_tol((kt / ((1.0 - rho) * eps)).ln() / (1.0 / rho).ln());
    let mut b = if raw.is_finite() && raw > 1.0 {
        raw as u32
    } else {
        1
    };
    while kt * tail_bound(rho, b) > eps {
        b += 1;
    }
    Ok(b)
}

/// Ceiling that ignores rounding noise just above an integer, so that
/// `3 ln 2 / ln 2` rounds to 3.
pub fn ceil_tol(x: f64) -> f64 {
    (x - 1e-9 * x.abs().max(1.0)).ceil()
}

/// `x / (x + (1 - x) a) - x`: the gain in coverage probability of an arm
/// played with probability `x` when other arms reach it with probability `a`.
/// Its maximum over `x` is `f(a)`, attained at `sqrt(a) / (1 + sqrt(a))`.
pub fn coverage_gain(x: f64, a: f64) -> f64 {
    x / (x + (1.0 - x) * a) - x
}
