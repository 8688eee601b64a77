//! Completion providers: the trait every planning operation calls through,
//! plus the remote chat-endpoint implementation.

use std::time::Duration;

use serde_json::{json, Value};

use super::PlannerError;

pub const LLM_API_KEY_VAR: &str = "LLM_API_KEY";

#[derive(Debug, Clone, Copy)]
pub struct Decoding {
    pub temperature: f32,
    pub max_tokens: u32,
}

impl Default for Decoding {
    fn default() -> Self {
        Self { temperature: 0.0, max_tokens: 800 }
    }
}

#[derive(Debug, Clone)]
pub struct Completion {
    pub text: String,
    pub prompt_tokens: Option<u64>,
    pub completion_tokens: Option<u64>,
}

impl Completion {
    pub fn text_only(text: impl Into<String>) -> Self {
        Self { text: text.into(), prompt_tokens: None, completion_tokens: None }
    }
}

/// A completion backend. `tag` names the operation issuing the prompt; the
/// scripted mock matches on it, remote providers ignore it. Implementations
/// must allow concurrent in-flight requests.
pub trait LlmProvider: Send + Sync {
    fn send(&self, tag: &str, prompt: &str, decoding: &Decoding) -> Result<Completion, PlannerError>;
}

#[derive(Debug, Clone)]
pub struct HttpChatConfig {
    pub base_url: String,
    pub model: String,
    pub timeout: Duration,
    pub retries: u32,
    pub backoff: Duration,
}

impl Default for HttpChatConfig {
    fn default() -> Self {
        Self {
            base_url: String::new(),
            model: String::new(),
            timeout: Duration::from_secs(60),
            retries: 2,
            backoff: Duration::from_millis(250),
        }
    }
}

/// Chat-endpoint client. POSTs `{"model", "messages", "temperature",
/// "max_tokens"}` and returns the first choice's message content.
pub struct HttpChatProvider {
    config: HttpChatConfig,
    client: reqwest::blocking::Client,
    api_key: Option<String>,
}

impl HttpChatProvider {
    pub fn new(config: HttpChatConfig) -> Result<Self, PlannerError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| PlannerError::Transport(e.to_string()))?;
        let api_key = std::env::var(LLM_API_KEY_VAR).ok().filter(|k| !k.is_empty());
        Ok(Self { config, client, api_key })
    }
}

impl LlmProvider for HttpChatProvider {
    fn send(
        &self,
        _tag: &str,
        prompt: &str,
        decoding: &Decoding,
    ) -> Result<Completion, PlannerError> {
        let body = json!({
            "model": self.config.model,
            "messages": [{ "role": "user", "content": prompt }],
            "temperature": decoding.temperature,
            "max_tokens": decoding.max_tokens,
        });
        let mut last_err = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                std::thread::sleep(self.config.backoff);
            }
            let mut req = self.client.post(&self.config.base_url).json(&body);
            if let Some(key) = &self.api_key {
                req = req.header("Authorization", format!("Bearer {key}"));
            }
            match req.send() {
                Ok(resp) if resp.status().is_success() => {
                    let value: Value =
                        resp.json().map_err(|e| PlannerError::Transport(e.to_string()))?;
                    let text = value
                        .pointer("/choices/0/message/content")
                        .and_then(Value::as_str)
                        .ok_or_else(|| {
                            PlannerError::Transport(
                                "response missing choices[0].message.content".into(),
                            )
                        })?
                        .to_string();
                    return Ok(Completion {
                        text,
                        prompt_tokens: value.pointer("/usage/prompt_tokens").and_then(Value::as_u64),
                        completion_tokens: value
                            .pointer("/usage/completion_tokens")
                            .and_then(Value::as_u64),
                    });
                }
                Ok(resp) => last_err = format!("endpoint returned HTTP {}", resp.status()),
                Err(e) => last_err = e.to_string(),
            }
        }
        Err(PlannerError::Transport(last_err))
    }
}
