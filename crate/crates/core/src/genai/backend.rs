//! OpenAI-compatible chat-completions backend.

use std::time::Duration;

use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::prompt::ImagePart;
use super::GenaiError;
use crate::sync::Semaphore;
use crate::ui_model::TokenUsage;

pub const DEFAULT_API_KEY_ENV: &str = "ALTGEN_API_KEY";
pub const FINGERPRINT_HEADER: &str = "x-altgen-fingerprint";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            initial_backoff_ms: 500,
            max_backoff_ms: 8_000,
        }
    }
}

impl RetryPolicy {
    pub fn backoff(&self, attempt: u32) -> Duration {
        let ms = self
            .initial_backoff_ms
            .saturating_mul(1u64 << attempt.min(20))
            .min(self.max_backoff_ms);
        Duration::from_millis(ms)
    }
}

/// USD per one million tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PriceTable {
    pub prompt_per_million: Decimal,
    pub completion_per_million: Decimal,
    pub training_per_million: Decimal,
}

impl Default for PriceTable {
    fn default() -> Self {
        // gpt-4o-2024-08-06 list prices
        Self {
            prompt_per_million: Decimal::new(250, 2),
            completion_per_million: Decimal::new(1000, 2),
            training_per_million: Decimal::new(2500, 2),
        }
    }
}

impl PriceTable {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("prompt_per_million", self.prompt_per_million),
            ("completion_per_million", self.completion_per_million),
            ("training_per_million", self.training_per_million),
        ] {
            if v.is_sign_negative() && !v.is_zero() {
                return Err(format!("price {name} must be >= 0"));
            }
        }
        Ok(())
    }

    pub fn cost(&self, usage: TokenUsage) -> Decimal {
        let million = Decimal::from(1_000_000u64);
        (Decimal::from(usage.prompt_tokens) * self.prompt_per_million
            + Decimal::from(usage.completion_tokens) * self.completion_per_million)
            / million
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    /// Full chat-completions URL.
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub max_output_tokens: u32,
    pub temperature: f64,
    pub timeout_secs: u64,
    pub retry: RetryPolicy,
    pub prices: PriceTable,
    pub max_in_flight: usize,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1/chat/completions".to_owned(),
            model: "gpt-4o-2024-08-06".to_owned(),
            api_key_env: DEFAULT_API_KEY_ENV.to_owned(),
            max_output_tokens: 32,
            temperature: 0.0,
            timeout_secs: 60,
            retry: RetryPolicy::default(),
            prices: PriceTable::default(),
            max_in_flight: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ContentPart {
    Text(String),
    Image(ImagePart),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatMessage {
    pub role: String,
    pub content: Vec<ContentPart>,
}

impl ChatMessage {
    pub fn user(text: impl Into<String>, image: Option<ImagePart>) -> Self {
        let mut content = vec![ContentPart::Text(text.into())];
        content.extend(image.map(ContentPart::Image));
        Self {
            role: "user".to_owned(),
            content,
        }
    }

    pub fn assistant(text: impl Into<String>) -> Self {
        Self {
            role: "assistant".to_owned(),
            content: vec![ContentPart::Text(text.into())],
        }
    }

    /// Chat-protocol JSON: plain string content for text-only messages,
    /// a typed part list once an image is attached.
    pub fn to_json(&self) -> Value {
        let content = match self.content.as_slice() {
            [ContentPart::Text(t)] => Value::String(t.clone()),
            parts => Value::Array(
                parts
                    .iter()
                    .map(|p| match p {
                        ContentPart::Text(t) => json!({ "type": "text", "text": t }),
                        ContentPart::Image(img) => json!({ "type": "image_url", "image_url": { "url": img.data_url() } }),
                    })
                    .collect(),
            ),
        };
        json!({ "role": self.role, "content": content })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub max_tokens: u32,
    pub temperature: f64,
    /// Sent as a header so fixture servers can match on it.
    pub fingerprint: Option<String>,
}

impl ChatRequest {
    pub fn to_json(&self) -> Value {
        json!({
            "model": self.model,
            "messages": self.messages.iter().map(ChatMessage::to_json).collect::<Vec<_>>(),
            "max_tokens": self.max_tokens,
            "temperature": self.temperature,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatResponse {
    pub content: String,
    pub usage: TokenUsage,
}

pub trait ChatBackend: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GenaiError>;
}

/// Extract the first choice's text and the usage block from a response body.
pub fn parse_chat_response(body: &Value) -> Result<ChatResponse, GenaiError> {
    let content = body
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| GenaiError::Protocol("response has no choices[0].message.content".into()))?
        .to_owned();
    let usage = TokenUsage {
        prompt_tokens: body.pointer("/usage/prompt_tokens").and_then(Value::as_u64).unwrap_or(0),
        completion_tokens: body.pointer("/usage/completion_tokens").and_then(Value::as_u64).unwrap_or(0),
    };
    Ok(ChatResponse { content, usage })
}

pub struct HttpBackend {
    endpoint: String,
    api_key: Option<String>,
    retry: RetryPolicy,
    client: reqwest::blocking::Client,
    permits: Semaphore,
}

enum AttemptError {
    Retryable(String),
    Fatal(String),
}

impl HttpBackend {
    pub fn new(config: &BackendConfig) -> Result<Self, GenaiError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| GenaiError::Protocol(e.to_string()))?;
        Ok(Self {
            endpoint: config.endpoint.clone(),
            api_key: std::env::var(&config.api_key_env).ok().filter(|k| !k.is_empty()),
            retry: config.retry.clone(),
            client,
            permits: Semaphore::new(config.max_in_flight),
        })
    }

    fn attempt(&self, request: &ChatRequest) -> Result<ChatResponse, AttemptError> {
        let mut builder = self.client.post(&self.endpoint).json(&request.to_json());
        if let Some(key) = &self.api_key {
            builder = builder.bearer_auth(key);
        }
        if let Some(fp) = &request.fingerprint {
            builder = builder.header(FINGERPRINT_HEADER, fp);
        }
        let resp = builder.send().map_err(|e| AttemptError::Retryable(e.to_string()))?;
        let status = resp.status();
        let body = resp.text().map_err(|e| AttemptError::Retryable(e.to_string()))?;
        if status.is_server_error() || status.as_u16() == 429 || status.as_u16() == 408 {
            return Err(AttemptError::Retryable(format!("HTTP {status}: {}", truncate(&body))));
        }
        if !status.is_success() {
            return Err(AttemptError::Fatal(format!("HTTP {status}: {}", truncate(&body))));
        }
        let json: Value = serde_json::from_str(&body).map_err(|e| AttemptError::Fatal(format!("invalid JSON: {e}")))?;
        parse_chat_response(&json).map_err(|e| AttemptError::Fatal(e.to_string()))
    }
}

fn truncate(s: &str) -> String {
    s.chars().take(200).collect()
}

impl ChatBackend for HttpBackend {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, GenaiError> {
        let _permit = self.permits.acquire();
        let mut log = Vec::new();
        let attempts = self.retry.max_attempts.max(1);
        for attempt in 0..attempts {
            match self.attempt(request) {
                Ok(resp) => return Ok(resp),
                Err(AttemptError::Fatal(msg)) => {
                    log.push(format!("attempt {}: {msg}", attempt + 1));
                    break;
                }
                Err(AttemptError::Retryable(msg)) => {
                    log.push(format!("attempt {}: {msg}", attempt + 1));
                    if attempt + 1 < attempts {
                        std::thread::sleep(self.retry.backoff(attempt));
                    }
                }
            }
        }
        Err(GenaiError::Backend { attempts: log })
    }
}
