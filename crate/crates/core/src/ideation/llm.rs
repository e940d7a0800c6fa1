use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub text: String,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LlmError {
    #[error("no replay fixture for prompt {hash} in {dir}")]
    UnknownPrompt { hash: String, dir: String },
    #[error("fixture {path}: {message}")]
    Fixture { path: String, message: String },
    #[error("llm endpoint: {0}")]
    Http(String),
}

pub trait LlmClient: Send + Sync {
    fn id(&self) -> &str;
    fn complete(&self, model: &str, prompt: &str, temperature: f64) -> Result<Completion, LlmError>;
}

impl<C: LlmClient + ?Sized> LlmClient for Box<C> {
    fn id(&self) -> &str {
        (**self).id()
    }
    fn complete(&self, model: &str, prompt: &str, temperature: f64) -> Result<Completion, LlmError> {
        (**self).complete(model, prompt, temperature)
    }
}

/// Roughly four characters per token.
pub fn estimate_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}

/// Hex SHA-256 of the rendered prompt; the replay fixture key.
pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

pub(crate) fn estimated(prompt: &str, text: String) -> Completion {
    Completion {
        prompt_tokens: estimate_tokens(prompt),
        completion_tokens: estimate_tokens(&text),
        text,
    }
}

/// Serves canned responses from `<dir>/<prompt-hash>.txt`.
#[derive(Debug, Clone)]
pub struct ReplayClient {
    dir: PathBuf,
}

impl ReplayClient {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn fixture_path(&self, prompt: &str) -> PathBuf {
        self.dir.join(format!("{}.txt", prompt_hash(prompt)))
    }
}

impl LlmClient for ReplayClient {
    fn id(&self) -> &str {
        "replay"
    }

    fn complete(&self, _model: &str, prompt: &str, _temperature: f64) -> Result<Completion, LlmError> {
        let path = self.fixture_path(prompt);
        match std::fs::read_to_string(&path) {
            Ok(text) => Ok(estimated(prompt, text)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(LlmError::UnknownPrompt {
                hash: prompt_hash(prompt),
                dir: self.dir.display().to_string(),
            }),
            Err(e) => Err(LlmError::Fixture {
                path: path.display().to_string(),
                message: e.to_string(),
            }),
        }
    }
}

/// Forwards to another client and saves each response as a replay fixture.
pub struct RecordingClient<C> {
    inner: C,
    dir: PathBuf,
}

impl<C: LlmClient> RecordingClient<C> {
    pub fn new(inner: C, dir: &Path) -> Result<Self, LlmError> {
        std::fs::create_dir_all(dir).map_err(|e| LlmError::Fixture {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(Self {
            inner,
            dir: dir.to_path_buf(),
        })
    }
}

impl<C: LlmClient> LlmClient for RecordingClient<C> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn complete(&self, model: &str, prompt: &str, temperature: f64) -> Result<Completion, LlmError> {
        let c = self.inner.complete(model, prompt, temperature)?;
        let path = self.dir.join(format!("{}.txt", prompt_hash(prompt)));
        std::fs::write(&path, &c.text).map_err(|e| LlmError::Fixture {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Ok(c)
    }
}

/// OpenAI-compatible `POST {base_url}/chat/completions`.
#[derive(Debug, Clone)]
pub struct HttpChatClient {
    pub base_url: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
}

impl HttpChatClient {
    pub fn new(base_url: &str, api_key: Option<String>) -> Self {
        Self {
            base_url: base_url.trim_end_matches('/').to_string(),
            api_key,
            timeout: Duration::from_secs(300),
        }
    }
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<ChatChoice>,
    usage: Option<ChatUsage>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatMessage,
}

#[derive(Deserialize)]
struct ChatMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct ChatUsage {
    prompt_tokens: u64,
    completion_tokens: u64,
}

impl LlmClient for HttpChatClient {
    fn id(&self) -> &str {
        "http"
    }

    fn complete(&self, model: &str, prompt: &str, temperature: f64) -> Result<Completion, LlmError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(self.timeout))
            .build()
            .into();
        let mut req = agent.post(&format!("{}/chat/completions", self.base_url));
        if let Some(key) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {key}"));
        }
        let body = serde_json::json!({
            "model": model,
            "temperature": temperature,
            "messages": [{ "role": "user", "content": prompt }],
        });
        let mut resp = req.send_json(&body).map_err(|e| LlmError::Http(e.to_string()))?;
        let parsed: ChatResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| LlmError::Http(e.to_string()))?;
        let text = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .unwrap_or_default();
        Ok(match parsed.usage {
            Some(u) => Completion {
                text,
                prompt_tokens: u.prompt_tokens,
                completion_tokens: u.completion_tokens,
            },
            None => estimated(prompt, text),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Echo;
    impl LlmClient for Echo {
        fn id(&self) -> &str {
            "echo"
        }
        fn complete(&self, _: &str, prompt: &str, _: f64) -> Result<Completion, LlmError> {
            Ok(estimated(prompt, prompt.to_uppercase()))
        }
    }

    #[test]
    fn token_estimate() {
        assert_eq!(estimate_tokens(""), 0);
        assert_eq!(estimate_tokens("abcd"), 1);
        assert_eq!(estimate_tokens("abcde"), 2);
    }

    #[test]
    fn record_then_replay() {
        let dir = tempfile::tempdir().unwrap();
        let rec = RecordingClient::new(Echo, dir.path()).unwrap();
        let live = rec.complete("m", "hello there", 1.0).unwrap();
        let replay = ReplayClient::new(dir.path());
        assert_eq!(replay.complete("m", "hello there", 1.0).unwrap(), live);
        assert!(dir.path().join(format!("{}.txt", prompt_hash("hello there"))).exists());
    }

    #[test]
    fn replay_rejects_unknown_prompt() {
        let dir = tempfile::tempdir().unwrap();
        let err = ReplayClient::new(dir.path()).complete("m", "never seen", 1.0).unwrap_err();
        assert!(matches!(err, LlmError::UnknownPrompt { .. }));
    }
}
