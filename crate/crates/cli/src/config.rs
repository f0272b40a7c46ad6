//! Optional TOML defaults, read from `--config` or `EULER_RIGIDITY_CONFIG`.
//!
//! ```toml
//! prime_limit = 1000000
//! level = 8
//! zeta_terms = 50
//! bernoulli_terms = 12
//! threads = 4
//! samples = 64
//! tol = 1e-8
//! ```
//!
//! Every key is optional. Command-line flags override the file, the file
//! overrides the built-in defaults.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::CliError;

pub const CONFIG_ENV: &str = "EULER_RIGIDITY_CONFIG";

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub prime_limit: Option<u64>,
    pub level: Option<u32>,
    pub zeta_terms: Option<usize>,
    pub bernoulli_terms: Option<usize>,
    pub threads: Option<usize>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::domain("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|msg| CliError::domain("config", format!("{}: {msg}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }
}
