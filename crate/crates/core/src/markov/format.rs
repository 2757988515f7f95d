use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ChainInstance, EdgeLengths};
use crate::error::{Error, Result};

/// On-disk chain description (TOML).
///
/// ```toml
/// k = 2
/// rho = 0.625
/// m = [0.5, 0.125, 0.125, 0.5]        # row-major K x K
/// lengths = [1, 1, 1, 1, 1, 1]        # optional, row-major K x (K + 1)
/// ```
///
/// Floats are written in shortest round-trip form, so a save/load cycle is
/// exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub k: usize,
    pub rho: f64,
    pub m: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub non_primitive_allowed: bool,
}

impl ChainFile {
    pub fn from_chain(chain: &ChainInstance, lengths: Option<&EdgeLengths>) -> Self {
        Self {
            k: chain.k(),
            rho: chain.rho(),
            m: chain.matrix().to_vec(),
            lengths: lengths.map(|l| l.as_slice().to_vec()),
            non_primitive_allowed: chain.non_primitive_allowed(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_toml()?)?;
        Ok(())
    }

    pub fn validation(&self) -> super::ValidationReport {
        super::validate(self.k, &self.m, self.rho)
    }

    pub fn build(&self) -> Result<(ChainInstance, Option<EdgeLengths>)> {
        let chain = if self.non_primitive_allowed {
            ChainInstance::new_non_primitive(self.k, self.m.clone(), self.rho)?
        } else {
            ChainInstance::new(self.k, self.m.clone(), self.rho)?
        };
        let lengths = self
            .lengths
            .as_ref()
            .map(|l| EdgeLengths::new(self.k, l.clone()))
            .transpose()?;
        Ok((chain, lengths))
    }
}
