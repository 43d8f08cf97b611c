//! Run configuration shared by the command-line subcommands.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localization::KernelConfig;
use crate::numerics::Tolerance;
use crate::table::config_hash;
use crate::verify::DEFAULT_SEED;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub tolerance: Tolerance,
    pub kernel: KernelConfig,
    /// Radial cells on `[0, 2R]` for scattering profiles.
    pub cells: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            tolerance: Tolerance::default(),
            kernel: KernelConfig::default(),
            cells: 200,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(source: &str) -> Result<Self> {
        let config: RunConfig =
            toml::from_str(source).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn validate(&self) -> Result<()> {
        let t = &self.tolerance;
        if !(t.rel > 0.0) || !(t.abs >= 0.0) || t.max_refinements < 1 {
            return Err(Error::Config(format!(
                "tolerance needs rel > 0, abs ≥ 0, max_refinements ≥ 1 (got {t:?})"
            )));
        }
        if self.cells < 4 {
            return Err(Error::Config(format!("cells must be at least 4, got {}", self.cells)));
        }
        Ok(())
    }

    /// Hash of this configuration together with a description of the run.
    pub fn hash(&self, run: &str) -> String {
        let body = toml::to_string(self).expect("run configuration serialises");
        config_hash(&format!("{run}\n{body}"))
    }
}
