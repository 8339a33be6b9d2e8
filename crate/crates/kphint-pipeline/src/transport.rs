//! Chat-completion transports: live HTTP, transcript recording, and replay.
//!
//! Every exchange carries a `tag` identifying the problem, configuration,
//! run, and sample (or pipeline stage) it belongs to. Tags key the
//! transcript files and never appear in the wire request, so a replayed
//! session is matched by position in the workload rather than by request
//! bytes.

use crate::config::EndpointConfig;
use crate::error::{PipelineError, PipelineResult};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::collections::VecDeque;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;
use std::time::Duration;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

/// One chat-completion request in the generic OpenAI-compatible shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
}

impl ChatRequest {
    /// Single-user-message request under the endpoint's decoding settings.
    pub fn user(config: &EndpointConfig, prompt: impl Into<String>) -> Self {
        ChatRequest {
            model: config.model_name.clone(),
            messages: vec![ChatMessage {
                role: "user".into(),
                content: prompt.into(),
            }],
            temperature: config.temperature,
            top_p: config.top_p,
            max_tokens: config.max_tokens,
        }
    }
}

/// One recorded exchange. The request is stored for auditability; replay
/// matches on the tag alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub tag: String,
    pub request: ChatRequest,
    pub response: String,
}

pub trait ChatTransport: Sync {
    /// Sends one request and returns the assistant's reply text.
    fn send(&self, tag: &str, request: &ChatRequest) -> PipelineResult<String>;
}

fn transport_err(tag: &str, message: impl Into<String>) -> PipelineError {
    PipelineError::Transport {
        tag: tag.to_string(),
        message: message.into(),
    }
}

/// Retries transient transport failures with exponential backoff. Errors
/// other than transport failures propagate immediately.
pub fn send_with_retry(
    transport: &dyn ChatTransport,
    config: &EndpointConfig,
    tag: &str,
    request: &ChatRequest,
) -> PipelineResult<String> {
    const BASE_BACKOFF_MS: u64 = 50;
    let mut attempt = 0u32;
    loop {
        match transport.send(tag, request) {
            Err(PipelineError::Transport { message, .. }) if attempt < config.max_retries => {
                std::thread::sleep(Duration::from_millis(BASE_BACKOFF_MS << attempt));
                attempt += 1;
                let _ = message;
            }
            other => return other,
        }
    }
}

/// Live transport POSTing to `{base_url}/chat/completions` with the key
/// from the configured environment variable as a bearer credential.
pub struct HttpTransport {
    agent: ureq::Agent,
    url: String,
    api_key: Option<String>,
}

impl HttpTransport {
    pub fn new(config: &EndpointConfig) -> PipelineResult<Self> {
        config.validate()?;
        let api_key = if config.api_key_env_var.is_empty() {
            None
        } else {
            match std::env::var(&config.api_key_env_var) {
                Ok(key) => Some(key),
                Err(_) => {
                    return Err(PipelineError::Env {
                        var: config.api_key_env_var.clone(),
                    })
                }
            }
        };
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(config.request_timeout_secs)))
            .build()
            .into();
        Ok(HttpTransport {
            agent,
            url: format!("{}/chat/completions", config.base_url.trim_end_matches('/')),
            api_key,
        })
    }
}

impl ChatTransport for HttpTransport {
    fn send(&self, tag: &str, request: &ChatRequest) -> PipelineResult<String> {
        let mut builder = self.agent.post(&self.url);
        if let Some(key) = &self.api_key {
            builder = builder.header("Authorization", &format!("Bearer {key}"));
        }
        let mut response = builder
            .send_json(request)
            .map_err(|e| transport_err(tag, e.to_string()))?;
        let value: serde_json::Value = response
            .body_mut()
            .read_json()
            .map_err(|e| transport_err(tag, format!("unreadable response body: {e}")))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| transport_err(tag, "response has no choices[0].message.content"))
    }
}

/// Wraps another transport and appends every successful exchange to a
/// line-delimited transcript file.
pub struct RecordingTransport<T> {
    inner: T,
    file: Mutex<File>,
}

impl<T: ChatTransport> RecordingTransport<T> {
    pub fn create(path: &Path, inner: T) -> PipelineResult<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(RecordingTransport {
            inner,
            file: Mutex::new(file),
        })
    }
}

impl<T: ChatTransport> ChatTransport for RecordingTransport<T> {
    fn send(&self, tag: &str, request: &ChatRequest) -> PipelineResult<String> {
        let response = self.inner.send(tag, request)?;
        let record = TranscriptRecord {
            tag: tag.to_string(),
            request: request.clone(),
            response: response.clone(),
        };
        let mut file = self.file.lock().unwrap();
        writeln!(file, "{}", serde_json::to_string(&record)?)?;
        file.flush()?;
        Ok(response)
    }
}

/// Serves recorded replies by tag, in recorded order per tag. Unrecorded
/// tags go to the fallback transport when one is configured and fail
/// otherwise, so a replayed session can continue live where the recording
/// stopped.
pub struct ReplayTransport {
    replies: Mutex<HashMap<String, VecDeque<String>>>,
    fallback: Option<Box<dyn ChatTransport>>,
}

impl ReplayTransport {
    pub fn strict(path: &Path) -> PipelineResult<Self> {
        Self::load(path, None)
    }

    pub fn with_fallback(path: &Path, fallback: Box<dyn ChatTransport>) -> PipelineResult<Self> {
        Self::load(path, Some(fallback))
    }

    fn load(path: &Path, fallback: Option<Box<dyn ChatTransport>>) -> PipelineResult<Self> {
        let mut replies: HashMap<String, VecDeque<String>> = HashMap::new();
        let reader = BufReader::new(File::open(path)?);
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let record: TranscriptRecord = serde_json::from_str(&line)?;
            replies.entry(record.tag).or_default().push_back(record.response);
        }
        Ok(ReplayTransport {
            replies: Mutex::new(replies),
            fallback,
        })
    }
}

impl ChatTransport for ReplayTransport {
    fn send(&self, tag: &str, request: &ChatRequest) -> PipelineResult<String> {
        let recorded = {
            let mut replies = self.replies.lock().unwrap();
            replies.get_mut(tag).and_then(VecDeque::pop_front)
        };
        match recorded {
            Some(response) => Ok(response),
            None => match &self.fallback {
                Some(inner) => inner.send(tag, request),
                None => Err(transport_err(tag, "no recorded reply for this tag")),
            },
        }
    }
}

/// Test and offline transport scripted per tag.
#[derive(Default)]
pub struct ScriptedTransport {
    replies: Mutex<HashMap<String, VecDeque<String>>>,
}

impl ScriptedTransport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&self, tag: &str, reply: impl Into<String>) {
        self.replies
            .lock()
            .unwrap()
            .entry(tag.to_string())
            .or_default()
            .push_back(reply.into());
    }

    /// Remaining unserved replies, for asserting a script was consumed.
    pub fn remaining(&self) -> usize {
        self.replies.lock().unwrap().values().map(VecDeque::len).sum()
    }
}

impl ChatTransport for ScriptedTransport {
    fn send(&self, tag: &str, _request: &ChatRequest) -> PipelineResult<String> {
        self.replies
            .lock()
            .unwrap()
            .get_mut(tag)
            .and_then(VecDeque::pop_front)
            .ok_or_else(|| transport_err(tag, "no scripted reply for this tag"))
    }
}
