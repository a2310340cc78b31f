use serde::{Deserialize, Serialize};

use crate::ClientError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TransportKind {
    #[default]
    Http,
    /// Offline endpoint answering `images=N`.
    MockEcho,
}

/// One chat-completions endpoint. The key itself never lives in config:
/// `api_key_env` names the environment variable holding it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointConfig {
    pub base_url: String,
    pub api_key_env: Option<String>,
    pub model_name: String,
    pub timeout_s: f64,
    pub max_retries: u32,
    pub max_concurrent_requests: usize,
    pub requests_per_minute: u32,
    pub temperature: f64,
    pub max_tokens: u32,
    pub backoff_base_ms: u64,
    pub backoff_max_ms: u64,
    pub transport: TransportKind,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            api_key_env: Some("OPENAI_API_KEY".into()),
            model_name: "gpt-4o".into(),
            timeout_s: 120.0,
            max_retries: 4,
            max_concurrent_requests: 4,
            requests_per_minute: 60,
            temperature: 0.0,
            max_tokens: 512,
            backoff_base_ms: 1000,
            backoff_max_ms: 30_000,
            transport: TransportKind::Http,
        }
    }
}

impl EndpointConfig {
    /// Offline echo endpoint with no pacing or backoff.
    pub fn mock() -> Self {
        Self {
            base_url: "mock://echo".into(),
            api_key_env: None,
            model_name: "mock".into(),
            requests_per_minute: u32::MAX,
            backoff_base_ms: 0,
            backoff_max_ms: 0,
            transport: TransportKind::MockEcho,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ClientError> {
        let bad = |m: String| Err(ClientError::Config(m));
        if !(self.timeout_s > 0.0 && self.timeout_s.is_finite()) {
            return bad(format!("timeout_s must be > 0, got {}", self.timeout_s));
        }
        if self.max_concurrent_requests == 0 {
            return bad("max_concurrent_requests must be ≥ 1".into());
        }
        if self.requests_per_minute == 0 {
            return bad("requests_per_minute must be ≥ 1".into());
        }
        if self.model_name.trim().is_empty() {
            return bad("model_name must not be empty".into());
        }
        if self.transport == TransportKind::Http && !self.base_url.starts_with("http") {
            return bad(format!("base_url {:?} is not an http(s) URL", self.base_url));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return bad("temperature must be ≥ 0".into());
        }
        Ok(())
    }

    /// Reads the key named by `api_key_env`, if any.
    pub fn resolve_api_key(&self) -> Result<Option<String>, ClientError> {
        match &self.api_key_env {
            None => Ok(None),
            Some(var) => std::env::var(var)
                .map(Some)
                .map_err(|_| ClientError::Config(format!("environment variable {var} is not set"))),
        }
    }

    pub fn completions_url(&self) -> String {
        format!("{}/chat/completions", self.base_url.trim_end_matches('/'))
    }
}
