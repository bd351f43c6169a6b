use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::check::CheckConfig;
use crate::game::GameConfig;

/// How much of a verdict a student sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum HintLevel {
    /// Statuses only; counterexamples show up as blob behaviour.
    #[default]
    Blobs,
    /// Statuses plus concrete witness values.
    Values,
}

/// Service configuration file (TOML). Keys are the camelCase field names; every key is
/// optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct ServiceConfig {
    pub address: String,
    /// Bearer tokens granting the teacher role.
    pub teacher_tokens: Vec<String>,
    pub store_dir: PathBuf,
    pub hint_level: HintLevel,
    /// Submissions checked with a solver at the same time.
    pub smt_concurrency: usize,
    pub check: CheckConfig,
    pub game: GameConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            address: "127.0.0.1:8080".into(),
            teacher_tokens: Vec::new(),
            store_dir: PathBuf::from("prepost-data"),
            hint_level: HintLevel::Blobs,
            smt_concurrency: 4,
            check: CheckConfig::default(),
            game: GameConfig::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Toml { path: PathBuf, source: toml::de::Error },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ServiceConfig {
    pub fn load(path: &Path) -> Result<ServiceConfig, ConfigFileError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io { path: path.into(), source })?;
        let cfg: ServiceConfig = toml::from_str(&text).map_err(|source| ConfigFileError::Toml { path: path.into(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigFileError> {
        self.check.eval.validate().map_err(|e| ConfigFileError::Invalid(e.to_string()))?;
        if self.smt_concurrency == 0 {
            return Err(ConfigFileError::Invalid("smtConcurrency must be at least 1".into()));
        }
        if self.game.tick_ms == 0 {
            return Err(ConfigFileError::Invalid("game.tickMs must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_toml_keeps_defaults() {
        let cfg: ServiceConfig = toml::from_str(
            r#"
            address = "0.0.0.0:9000"
            teacherTokens = ["t1"]
            hintLevel = "values"
            [check]
            trials = 500
            [check.eval]
            quantBound = 16
            [game]
            initialBudget = 250
            "#,
        )
        .unwrap();
        assert_eq!(cfg.address, "0.0.0.0:9000");
        assert_eq!(cfg.hint_level, HintLevel::Values);
        assert_eq!(cfg.check.trials, 500);
        assert_eq!(cfg.check.eval.quant_bound, 16);
        assert_eq!(cfg.check.eval.max_array_len, 8);
        assert_eq!(cfg.game.initial_budget, 250);
        assert_eq!(cfg.smt_concurrency, 4);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<ServiceConfig>("adress = \"x\"").is_err());
    }
}
