//! Endpoint and pipeline configuration.

use crate::error::{PipelineError, PipelineResult};
use serde::{Deserialize, Serialize};

/// Connection and decoding parameters for a chat-completion endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EndpointConfig {
    pub base_url: String,
    pub model_name: String,
    /// Name of the environment variable holding the API key. Empty means
    /// no credential is attached.
    pub api_key_env_var: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    pub max_retries: u32,
    pub request_timeout_secs: u64,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            base_url: "http://localhost:8000/v1".into(),
            model_name: "deepseek-r1".into(),
            api_key_env_var: "KPHINT_API_KEY".into(),
            temperature: 0.9,
            top_p: 0.9,
            max_tokens: 4096,
            max_retries: 2,
            request_timeout_secs: 120,
        }
    }
}

impl EndpointConfig {
    pub fn validate(&self) -> PipelineResult<()> {
        let bad = |message: String| PipelineError::Config { message };
        if self.base_url.is_empty() {
            return Err(bad("base_url is empty".into()));
        }
        if self.model_name.is_empty() {
            return Err(bad("model_name is empty".into()));
        }
        if !(self.temperature > 0.0 && self.temperature <= 1.0) {
            return Err(bad(format!(
                "temperature {} outside (0, 1]",
                self.temperature
            )));
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return Err(bad(format!("top_p {} outside (0, 1]", self.top_p)));
        }
        if self.max_tokens == 0 {
            return Err(bad("max_tokens is zero".into()));
        }
        if self.request_timeout_secs == 0 {
            return Err(bad("request_timeout_secs is zero".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        EndpointConfig::default().validate().unwrap();
    }

    #[test]
    fn unit_interval_bounds_are_half_open() {
        let mut cfg = EndpointConfig::default();
        cfg.temperature = 0.0;
        assert!(cfg.validate().is_err());
        cfg.temperature = 1.0;
        cfg.validate().unwrap();
        cfg.top_p = 1.5;
        assert!(cfg.validate().is_err());
    }
}
