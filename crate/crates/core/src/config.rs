//! Optional TOML run configuration: `[solver]`, `[comm]` and `[embedding]`
//! tables, each field optional. Command-line flags override the file.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::comm::CommConfig;
use crate::error::{Error, Result};
use crate::field::{PrimeField, P61};
use crate::framework::SolverConfig;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    pub prime: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig { prime: P61 }
    }
}

impl EmbeddingConfig {
    pub fn field(&self) -> Result<PrimeField> {
        PrimeField::new(self.prime).map_err(|e| Error::Config(format!("embedding.prime: {e}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub solver: SolverConfig,
    pub comm: CommConfig,
    pub embedding: EmbeddingConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |e: Error| Error::Config(e.to_string());
        self.solver.validate().map_err(cfg_err)?;
        let c = &self.comm;
        if !(c.stcut_c >= 0.0 && c.stcut_c.is_finite()) {
            return Err(Error::Config("comm.stcut_c must be a finite non-negative number".into()));
        }
        if !(c.sample_mult > 0.0 && c.sample_mult.is_finite()) {
            return Err(Error::Config("comm.sample_mult must be positive".into()));
        }
        self.embedding.field()?;
        Ok(())
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_config(&text)
}
