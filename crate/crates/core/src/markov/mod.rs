//! Absorbing Markov chains over `K` transient nodes.
//!
//! A chain is described by the sub-stochastic matrix `M` of transition
//! probabilities among transient nodes. Whatever mass a row does not spend on
//! transient nodes goes to the single absorbing node. Every row must keep at
//! least `1 - rho` of absorbing mass, which bounds walk lengths
//! geometrically.

mod analytics;
mod format;

pub use analytics::{
    b_param, ceil_tol, coverage_gain, expected_hitting_times, f_curve, first_passage_probs,
    hitting_centrality, kappa, kappa_from_centrality, tail_bound, unit_hitting_times, Centrality,
    HittingSolver,
};
pub use format::ChainFile;

use crate::error::{Error, Result};

/// Row sums may exceed `rho` by this much before the norm check fails.
const NORM_SLACK: f64 = 1e-12;

/// Outcome of checking a transition matrix against the chain assumptions.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub k: usize,
    /// `max_i sum_j m_ij`.
    pub inf_norm: f64,
    pub rho: f64,
    pub nonnegative: bool,
    /// `inf_norm <= rho < 1`.
    pub norm_ok: bool,
    pub primitive: bool,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.primitive
    }

    /// Passes every check except primitivity.
    pub fn passed_ignoring_primitivity(&self) -> bool {
        self.failures.is_empty()
    }

    fn describe(&self) -> String {
        let mut all = self.failures.clone();
        if !self.primitive {
            all.push("transition matrix is not primitive".into());
        }
        all.join("; ")
    }
}

/// Check a row-major `k x k` matrix against the chain assumptions.
///
/// Never fails; problems are listed in the report.
pub fn validate(k: usize, m: &[f64], rho: f64) -> ValidationReport {
    let mut failures = Vec::new();
    if k == 0 {
        failures.push("chain needs at least one transient node".to_string());
    }
    if m.len() != k * k {
        failures.push(format!(
            "expected {} matrix entries, got {}",
            k * k,
            m.len()
        ));
        return ValidationReport {
            k,
            inf_norm: f64::NAN,
            rho,
            nonnegative: false,
            norm_ok: false,
            primitive: false,
            failures,
        };
    }
    let nonnegative = m.iter().all(|&x| x.is_finite() && (0.0..=1.0).contains(&x));
    if !nonnegative {
        failures.push("entries must be finite and in [0, 1]".to_string());
    }
    let inf_norm = (0..k)
        .map(|i| m[i * k..(i + 1) * k].iter().sum::<f64>())
        .fold(0.0, f64::max);
    let norm_ok = rho.is_finite() && rho < 1.0 && inf_norm <= rho + NORM_SLACK;
    if !norm_ok {
        failures.push(format!(
            "infinity norm {inf_norm} must satisfy norm <= rho = {rho} < 1"
        ));
    }
    let primitive = k > 0 && is_primitive(k, m);
    ValidationReport {
        k,
        inf_norm,
        rho,
        nonnegative,
        norm_ok,
        primitive,
        failures,
    }
}

/// Some power `A^n` with `n >= K^2` is entrywise positive.
///
/// A primitive matrix has `A^n > 0` for every `n >= (K-1)^2 + 1`, so one
/// power by repeated squaring past `K^2` decides the question exactly.
fn is_primitive(k: usize, m: &[f64]) -> bool {
    let mut pow: Vec<bool> = m.iter().map(|&x| x > 0.0).collect();
    let target = (k * k).max(1);
    let mut exponent = 1usize;
    while exponent < target {
        pow = bool_square(k, &pow);
        exponent *= 2;
    }
    pow.iter().all(|&b| b)
}

fn bool_square(k: usize, a: &[bool]) -> Vec<bool> {
    let mut out = vec![false; k * k];
    for i in 0..k {
        for l in 0..k {
            if !a[i * k + l] {
                continue;
            }
            for j in 0..k {
                out[i * k + j] |= a[l * k + j];
            }
        }
    }
    out
}

/// The environment: transition probabilities among transient nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainInstance {
    k: usize,
    m: Vec<f64>,
    absorb: Vec<f64>,
    rho: f64,
    non_primitive_allowed: bool,
}

impl ChainInstance {
    /// Build a chain from a row-major `k x k` matrix, rejecting anything that
    /// fails [`validate`].
    pub fn new(k: usize, m: Vec<f64>, rho: f64) -> Result<Self> {
        let report = validate(k, &m, rho);
        if !report.passed() {
            return Err(Error::InvalidChain(report.describe()));
        }
        Ok(Self::assemble(k, m, rho, false))
    }

    /// Like [`ChainInstance::new`] but accepts reducible or periodic
    /// matrices. Used by constructions that check connectivity themselves.
    pub fn new_non_primitive(k: usize, m: Vec<f64>, rho: f64) -> Result<Self> {
        let report = validate(k, &m, rho);
        if !report.passed_ignoring_primitivity() {
            return Err(Error::InvalidChain(report.describe()));
        }
        Ok(Self::assemble(k, m, rho, true))
    }

    pub fn from_rows(rows: &[Vec<f64>], rho: f64) -> Result<Self> {
        let k = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != k) {
            return Err(Error::Dimension {
                expected: k,
                got: bad.len(),
            });
        }
        Self::new(k, rows.concat(), rho)
    }

    fn assemble(k: usize, m: Vec<f64>, rho: f64, non_primitive_allowed: bool) -> Self {
        let absorb = (0..k)
            .map(|i| (1.0 - m[i * k..(i + 1) * k].iter().sum::<f64>()).max(0.0))
            .collect();
        Self {
            k,
            m,
            absorb,
            rho,
            non_primitive_allowed,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    #[inline]
    pub fn m(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.k + j]
    }

    /// Row `i` of `M`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.m[i * self.k..(i + 1) * self.k]
    }

    /// Row-major entries of `M`.
    pub fn matrix(&self) -> &[f64] {
        &self.m
    }

    /// Probability of stepping from `i` straight to the absorbing node.
    #[inline]
    pub fn absorb(&self, i: usize) -> f64 {
        self.absorb[i]
    }

    pub fn non_primitive_allowed(&self) -> bool {
        self.non_primitive_allowed
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self.k, &self.m, self.rho)
    }

    /// Directed reachability in the transition digraph (paths of length >= 1).
    pub fn reachable(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.k];
        let mut stack: Vec<usize> = (0..self.k).filter(|&j| self.m(from, j) > 0.0).collect();
        while let Some(u) = stack.pop() {
            if seen[u] {
                continue;
            }
            seen[u] = true;
            if u == to {
                return true;
            }
            stack.extend((0..self.k).filter(|&j| self.m(u, j) > 0.0 && !seen[j]));
        }
        false
    }
}

/// Edge lengths for one epoch: a `K x (K+1)` matrix whose last column holds
/// the length of each node's edge into the absorbing node.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLengths {
    k: usize,
    data: Vec<f64>,
}

impl EdgeLengths {
    pub fn new(k: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != k * (k + 1) {
            return Err(Error::Dimension {
                expected: k * (k + 1),
                got: data.len(),
            });
        }
        if let Some(&bad) = data.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Domain {
                value: bad,
                domain: "[0, 1] edge length",
            });
        }
        Ok(Self { k, data })
    }

    pub fn constant(k: usize, value: f64) -> Result<Self> {
        Self::new(k, vec![value; k * (k + 1)])
    }

    pub fn unit(k: usize) -> Self {
        Self {
            k,
            data: vec![1.0; k * (k + 1)],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Column `k()` is the absorbing node.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * (self.k + 1) + j]
    }

    #[inline]
    pub fn absorbing(&self, i: usize) -> f64 {
        self.get(i, self.k)
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Domain {
                value,
                domain: "[0, 1] edge length",
            });
        }
        self.data[i * (self.k + 1) + j] = value;
        Ok(())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Expected length of one step from each node:
    /// `c_i = sum_j m_ij l_ij + m_i* l_i*`.
    pub fn step_costs(&self, chain: &ChainInstance) -> Result<Vec<f64>> {
        if chain.k() != self.k {
            return Err(Error::Dimension {
                expected: chain.k(),
                got: self.k,
            });
        }
        Ok((0..self.k)
            .map(|i| {
                let inner: f64 = (0..self.k).map(|j| chain.m(i, j) * self.get(i, j)).sum();
                inner + chain.absorb(i) * self.absorbing(i)
            })
            .collect())
    }
}
