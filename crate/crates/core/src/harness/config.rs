//! Run configuration read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::builtin;
use crate::error::{Error, Result};
use crate::exp3::{default_params, Estimator, Exp3State};
use crate::lower_bounds::KNodeFamily;
use crate::markov::{ChainFile, ChainInstance, EdgeLengths};
use crate::ucb::{SampleSource, UcbState};
use crate::walk::{exp_adv_length_process, LengthProcess};

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSpec {
    Fig1,
    Fig1Prime,
    Exp9,
    KNode,
    File(PathBuf),
}

impl InstanceSpec {
    pub fn parse(name: &str) -> Self {
        match name {
            "fig1" => Self::Fig1,
            "fig1-prime" => Self::Fig1Prime,
            "exp9" => Self::Exp9,
            "knode" => Self::KNode,
            path => Self::File(PathBuf::from(path)),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthSpec {
    /// Every edge has length 1.
    #[default]
    Unit,
    /// The nine-node clipped-Gaussian law.
    ExpAdv,
    /// Bernoulli lengths of the K-node hard family.
    Knode,
    /// Fixed lengths stored in the chain file.
    File,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    #[default]
    Shifted,
    Covered,
    /// Importance weighting on the played node only.
    Standard,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    /// `fig1`, `fig1-prime`, `exp9`, `knode`, or a chain file path.
    pub instance: String,
    pub horizon: usize,
    #[serde(default = "one")]
    pub runs: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub lengths: LengthSpec,
    /// Bump for `fig1`/`fig1-prime`; overrides the derived value for `knode`.
    pub eps: Option<f64>,
    /// Node count for `knode`.
    pub k: Option<usize>,
    /// Bumped node for `knode`; absent means the unbumped base instance.
    pub bumped: Option<usize>,
    #[serde(default)]
    pub estimator: EstimatorKind,
    pub eta: Option<f64>,
    pub beta: Option<f64>,
    pub b: Option<u32>,
    /// Truncation target for the default `B`; defaults to `1/T`.
    pub trunc_eps: Option<f64>,
    /// UCB: use only the played node's sample.
    #[serde(default)]
    pub played_only: bool,
    /// UCB: multiplier on the confidence width.
    pub width_scale: Option<f64>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn check(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn instance_spec(&self) -> InstanceSpec {
        InstanceSpec::parse(&self.instance)
    }

    fn knode_family(&self) -> Result<KNodeFamily> {
        let k = self.k.unwrap_or(4);
        match self.eps {
            Some(eps) => KNodeFamily::with_eps(k, eps),
            None => KNodeFamily::new(k, self.horizon),
        }
    }

    pub fn chain(&self) -> Result<ChainInstance> {
        Ok(self.setup()?.0)
    }

    /// Chain and length process described by the config.
    pub fn setup(&self) -> Result<(ChainInstance, LengthProcess)> {
        let eps = self.eps.unwrap_or(0.1);
        let (chain, stored) = match self.instance_spec() {
            InstanceSpec::Fig1 => (builtin::fig1(eps), None),
            InstanceSpec::Fig1Prime => (builtin::fig1_prime(eps), None),
            InstanceSpec::Exp9 => (builtin::exp9(), None),
            InstanceSpec::KNode => (self.knode_family()?.chain(), None),
            InstanceSpec::File(path) => ChainFile::load(path)?.build()?,
        };
        let k = chain.k();
        let process = match self.lengths {
            LengthSpec::Unit => LengthProcess::Fixed(EdgeLengths::unit(k)),
            LengthSpec::ExpAdv => exp_adv_length_process(k),
            LengthSpec::Knode => {
                if self.instance_spec() != InstanceSpec::KNode {
                    return Err(Error::Config(
                        "lengths = \"knode\" needs instance = \"knode\"".into(),
                    ));
                }
                self.knode_family()?.length_process(self.bumped)?
            }
            LengthSpec::File => LengthProcess::Fixed(stored.ok_or_else(|| {
                Error::Config("lengths = \"file\" needs a chain file with lengths".into())
            })?),
        };
        Ok((chain, process))
    }

    pub fn ucb(&self, chain: &ChainInstance) -> UcbState {
        let source = if self.played_only {
            SampleSource::PlayedOnly
        } else {
            SampleSource::Trajectory
        };
        UcbState::new(chain.k(), chain.rho(), source)
            .with_width_scale(self.width_scale.unwrap_or(1.0))
    }

    /// EXP3 policy; unset parameters take their defaults for this chain
    /// and horizon.
    pub fn exp3(&self, chain: &ChainInstance) -> Result<Exp3State> {
        let trunc_eps = self.trunc_eps.unwrap_or(1.0 / self.horizon as f64);
        let defaults = default_params(chain, self.horizon, trunc_eps)?;
        let eta = self.eta.unwrap_or(defaults.eta);
        let estimator = match self.estimator {
            EstimatorKind::Shifted => Estimator::Shifted {
                b: f64::from(self.b.unwrap_or(defaults.b)),
                beta: self.beta.unwrap_or(defaults.beta),
            },
            EstimatorKind::Covered => Estimator::Covered,
            EstimatorKind::Standard => Estimator::PlayedOnly,
        };
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::param(
                "eta",
                format!("{eta} is not a positive learning rate"),
            ));
        }
        Ok(Exp3State::new(chain.k(), eta, estimator))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = Config::parse("instance = \"fig1\"\nhorizon = 100\n").unwrap();
        assert_eq!(cfg.runs, 1);
        assert_eq!(cfg.lengths, LengthSpec::Unit);
        let (chain, process) = cfg.setup().unwrap();
        assert_eq!(chain.k(), 2);
        assert!((chain.rho() - 0.725).abs() < 1e-12);
        assert_eq!(process.k(), 2);
    }

    #[test]
    fn rejects_unknown_keys_and_zero_horizon() {
        assert!(Config::parse("instance = \"fig1\"\nhorizon = 10\nfoo = 1\n").is_err());
        assert!(Config::parse("instance = \"fig1\"\nhorizon = 0\n").is_err());
    }

    #[test]
    fn knode_lengths_need_knode_instance() {
        let cfg =
            Config::parse("instance = \"exp9\"\nhorizon = 10\nlengths = \"knode\"\n").unwrap();
        assert!(cfg.setup().is_err());
        let cfg = Config::parse(
            "instance = \"knode\"\nk = 3\nhorizon = 1000\nlengths = \"knode\"\nbumped = 1\n",
        )
        .unwrap();
        let (chain, process) = cfg.setup().unwrap();
        assert_eq!(chain.k(), 3);
        assert!(process.is_stationary());
    }

    #[test]
    fn exp3_overrides() {
        let cfg = Config::parse(
            "instance = \"exp9\"\nhorizon = 100\nestimator = \"covered\"\neta = 0.001\n",
        )
        .unwrap();
        let chain = cfg.chain().unwrap();
        let p = cfg.exp3(&chain).unwrap();
        assert_eq!(p.estimator(), Estimator::Covered);
        let bad = Config::parse("instance = \"exp9\"\nhorizon = 100\neta = -1.0\n").unwrap();
        assert!(bad.exp3(&chain).is_err());
    }
}
