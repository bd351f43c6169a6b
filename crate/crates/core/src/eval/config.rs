use serde::{Deserialize, Serialize};

/// Knobs for random assignment generation and bounded evaluation.
///
/// Config-file keys (section `[eval]`): `quantBound`, `intRange`, `realRange`,
/// `maxArrayLen`, `nullProbability`, `realEqEpsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "camelCase")]
pub struct EvalConfig {
    /// Maximum number of indices a quantifier inspects.
    pub quant_bound: usize,
    pub int_range: (i64, i64),
    pub real_range: (f64, f64),
    pub max_array_len: usize,
    pub null_probability: f64,
    /// Tolerance for `==` / `!=` when either operand is real.
    pub real_eq_epsilon: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            quant_bound: 128,
            int_range: (-100, 100),
            real_range: (-100.0, 100.0),
            max_array_len: 8,
            null_probability: 0.1,
            real_eq_epsilon: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid eval config: {0}")]
pub struct ConfigError(pub String);

impl EvalConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.quant_bound < 1 {
            return Err(ConfigError("quant_bound must be at least 1".into()));
        }
        if self.int_range.0 > self.int_range.1 {
            return Err(ConfigError("int_range lower bound exceeds upper bound".into()));
        }
        if !(self.real_range.0 <= self.real_range.1) || !self.real_range.0.is_finite() || !self.real_range.1.is_finite() {
            return Err(ConfigError("real_range must be finite with lo <= hi".into()));
        }
        if !(0.0..=1.0).contains(&self.null_probability) {
            return Err(ConfigError("null_probability must lie in [0, 1]".into()));
        }
        if !(self.real_eq_epsilon >= 0.0) {
            return Err(ConfigError("real_eq_epsilon must be non-negative".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        EvalConfig::default().validate().unwrap();
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            EvalConfig { quant_bound: 0, ..Default::default() },
            EvalConfig { int_range: (3, 2), ..Default::default() },
            EvalConfig { real_range: (1.0, f64::NAN), ..Default::default() },
            EvalConfig { null_probability: 1.5, ..Default::default() },
            EvalConfig { real_eq_epsilon: -1.0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn partial_toml() {
        let c: EvalConfig = toml::from_str("quantBound = 4\nintRange = [-2, 2]").unwrap();
        assert_eq!(c.quant_bound, 4);
        assert_eq!(c.int_range, (-2, 2));
        assert_eq!(c.max_array_len, 8);
    }
}
