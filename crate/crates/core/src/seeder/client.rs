//! Minimal OpenAI-style chat-completion client.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::SeederError;

pub const API_KEY_VAR: &str = "GELP_API_KEY";

#[derive(Clone, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub endpoint_url: String,
    pub model_name: String,
    pub temperature: f64,
    #[serde(skip)]
    pub api_key: Option<String>,
    pub timeout: Duration,
    pub max_attempts: u32,
    pub initial_backoff: Duration,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        EndpointConfig {
            endpoint_url: "https://api.openai.com/v1/chat/completions".into(),
            model_name: "gpt-3.5-turbo".into(),
            temperature: 0.7,
            api_key: None,
            timeout: Duration::from_secs(60),
            max_attempts: 5,
            initial_backoff: Duration::from_millis(500),
        }
    }
}

impl EndpointConfig {
    /// Fills `api_key` from the environment.
    pub fn with_env_key(mut self) -> Self {
        self.api_key = std::env::var(API_KEY_VAR).ok().filter(|k| !k.is_empty());
        self
    }
}

impl std::fmt::Debug for EndpointConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EndpointConfig")
            .field("endpoint_url", &self.endpoint_url)
            .field("model_name", &self.model_name)
            .field("temperature", &self.temperature)
            .field("api_key", &self.api_key.as_ref().map(|_| "<redacted>"))
            .field("timeout", &self.timeout)
            .field("max_attempts", &self.max_attempts)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub attempts: u32,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: String,
}

enum Failure {
    Transient(String),
    Fatal(SeederError),
}

fn redact(text: &str, key: &str) -> String {
    if key.is_empty() {
        text.to_owned()
    } else {
        text.replace(key, "<redacted>")
    }
}

/// Sends `prompt` as a single user message and returns the assistant text.
/// Transient failures (429, 5xx, timeouts, connection errors) are retried with
/// exponential backoff up to `max_attempts`.
pub async fn fetch_candidates(
    cfg: &EndpointConfig,
    prompt: &str,
) -> Result<Completion, SeederError> {
    let key = cfg
        .api_key
        .as_deref()
        .ok_or_else(|| SeederError::Config(format!("{API_KEY_VAR} is not set")))?;
    let client = reqwest::Client::builder()
        .timeout(cfg.timeout)
        .build()
        .map_err(|e| SeederError::Config(e.to_string()))?;
    let body = json!({
        "model": cfg.model_name,
        "temperature": cfg.temperature,
        "messages": [{"role": "user", "content": prompt}],
    });
    let max = cfg.max_attempts.max(1);
    let mut backoff = cfg.initial_backoff;
    let mut last = String::new();
    for attempt in 1..=max {
        log::info!(
            "POST {} model={} attempt={attempt}/{max} prompt_bytes={}",
            cfg.endpoint_url,
            cfg.model_name,
            prompt.len()
        );
        match send(&client, cfg, key, &body).await {
            Ok(text) => {
                log::info!(
                    "completion received after {attempt} attempt(s), {} bytes",
                    text.len()
                );
                return Ok(Completion {
                    text,
                    attempts: attempt,
                });
            }
            Err(Failure::Fatal(e)) => return Err(e),
            Err(Failure::Transient(msg)) => {
                let msg = redact(&msg, key);
                log::warn!("attempt {attempt} failed: {msg}");
                last = msg;
                if attempt < max {
                    tokio::time::sleep(backoff).await;
                    backoff *= 2;
                }
            }
        }
    }
    Err(SeederError::RetriesExhausted {
        attempts: max,
        last,
    })
}

async fn send(
    client: &reqwest::Client,
    cfg: &EndpointConfig,
    key: &str,
    body: &serde_json::Value,
) -> Result<String, Failure> {
    let resp = client
        .post(&cfg.endpoint_url)
        .bearer_auth(key)
        .json(body)
        .send()
        .await
        .map_err(|e| {
            if e.is_timeout() || e.is_connect() || e.is_request() {
                Failure::Transient(e.to_string())
            } else {
                Failure::Fatal(SeederError::Http(redact(&e.to_string(), key)))
            }
        })?;
    let status = resp.status();
    if status == reqwest::StatusCode::UNAUTHORIZED || status == reqwest::StatusCode::FORBIDDEN {
        return Err(Failure::Fatal(SeederError::Auth(status.as_u16())));
    }
    if status == reqwest::StatusCode::TOO_MANY_REQUESTS || status.is_server_error() {
        return Err(Failure::Transient(format!("status {status}")));
    }
    if !status.is_success() {
        return Err(Failure::Fatal(SeederError::Http(format!(
            "status {status}"
        ))));
    }
    let bytes = resp
        .bytes()
        .await
        .map_err(|e| Failure::Transient(e.to_string()))?;
    let parsed: ChatResponse = serde_json::from_slice(&bytes)
        .map_err(|e| Failure::Fatal(SeederError::MalformedResponse(e.to_string())))?;
    parsed
        .choices
        .into_iter()
        .next()
        .map(|c| c.message.content)
        .ok_or_else(|| Failure::Fatal(SeederError::MalformedResponse("no choices".into())))
}
