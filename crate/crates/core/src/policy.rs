//! The interface the harness drives, plus two reference policies.

use rand::Rng;

use crate::error::Result;
use crate::walk::{SimRng, Trajectory};

/// A bandit policy over the transient nodes of a chain.
///
/// Each epoch the harness calls [`Policy::select`], draws the walk from the
/// chosen node and hands it back through [`Policy::observe`].
pub trait Policy: Send {
    fn name(&self) -> String;

    fn select(&mut self, rng: &mut SimRng) -> usize;

    fn observe(&mut self, traj: &Trajectory) -> Result<()>;

    /// Current hitting-time estimates, for policies that keep them.
    fn estimates(&self) -> Option<Vec<f64>> {
        None
    }

    /// Column names for [`Policy::pre_diagnostics`] and
    /// [`Policy::post_diagnostics`], in that order.
    fn diagnostic_names(&self) -> Vec<String> {
        Vec::new()
    }

    /// Values logged just before `select`.
    fn pre_diagnostics(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Values logged just after `observe`.
    fn post_diagnostics(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Always plays one node.
#[derive(Debug, Clone)]
pub struct FixedNode(pub usize);

impl Policy for FixedNode {
    fn name(&self) -> String {
        format!("fixed-{}", self.0)
    }

    fn select(&mut self, _rng: &mut SimRng) -> usize {
        self.0
    }

    fn observe(&mut self, _traj: &Trajectory) -> Result<()> {
        Ok(())
    }
}

/// Plays uniformly at random.
#[derive(Debug, Clone)]
pub struct UniformRandom(pub usize);

impl Policy for UniformRandom {
    fn name(&self) -> String {
        "uniform".into()
    }

    fn select(&mut self, rng: &mut SimRng) -> usize {
        rng.gen_range(0..self.0)
    }

    fn observe(&mut self, _traj: &Trajectory) -> Result<()> {
        Ok(())
    }
}
