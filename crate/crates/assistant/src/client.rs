use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use langbar_core::ToolCall;
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::wire::{ChatMessage, ChatRequest, ChatResponse, WireToolCall};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("endpoint returned {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("script: {0}")]
    Script(String),
}

/// Request counter and per-request latencies.
#[derive(Debug, Default)]
pub struct CallLog {
    count: AtomicUsize,
    latencies: Mutex<Vec<Duration>>,
}

impl CallLog {
    pub fn record(&self, latency: Duration) {
        self.count.fetch_add(1, Ordering::SeqCst);
        self.latencies.lock().push(latency);
    }

    pub fn count(&self) -> usize {
        self.count.load(Ordering::SeqCst)
    }

    pub fn latencies(&self) -> Vec<Duration> {
        self.latencies.lock().clone()
    }
}

/// A chat-with-tools model endpoint.
pub trait ModelClient: Send + Sync {
    /// Performs one request without bookkeeping.
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ModelError>;

    fn log(&self) -> &CallLog;

    /// [`Self::send`], timed and counted.
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ModelError> {
        let start = Instant::now();
        let out = self.send(request);
        self.log().record(start.elapsed());
        out
    }
}

/// One canned model reply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScriptedReply {
    Call(ToolCall),
    Calls(Vec<ToolCall>),
    Text(String),
    /// Simulates a transport failure.
    Fail(String),
}

impl ScriptedReply {
    fn into_response(self) -> Result<ChatResponse, ModelError> {
        let calls = |calls: Vec<ToolCall>| {
            calls
                .iter()
                .enumerate()
                .map(|(i, c)| WireToolCall::from_call(format!("call_{i}"), c))
                .collect()
        };
        match self {
            ScriptedReply::Call(c) => Ok(ChatResponse::from_message(ChatMessage::tool_calls(calls(vec![c])))),
            ScriptedReply::Calls(cs) => Ok(ChatResponse::from_message(ChatMessage::tool_calls(calls(cs)))),
            ScriptedReply::Text(t) => Ok(ChatResponse::from_message(ChatMessage::assistant(t))),
            ScriptedReply::Fail(e) => Err(ModelError::Transport(e)),
        }
    }
}

type ReplyFn = Box<dyn Fn(&ChatRequest) -> ScriptedReply + Send + Sync>;

enum Script {
    Sequence(Mutex<VecDeque<ScriptedReply>>),
    Keyed(HashMap<String, ScriptedReply>),
    Function(ReplyFn),
}

/// Deterministic stand-in for a model. Records every request it sees.
pub struct ScriptedClient {
    script: Script,
    log: CallLog,
    requests: Mutex<Vec<ChatRequest>>,
}

impl ScriptedClient {
    fn with(script: Script) -> Self {
        Self {
            script,
            log: CallLog::default(),
            requests: Mutex::new(Vec::new()),
        }
    }

    /// Replies in order; fails once the script is used up.
    pub fn sequence(replies: impl IntoIterator<Item = ScriptedReply>) -> Self {
        Self::with(Script::Sequence(Mutex::new(replies.into_iter().collect())))
    }

    /// Replies by the text of the last user message.
    pub fn keyed(replies: impl IntoIterator<Item = (String, ScriptedReply)>) -> Self {
        Self::with(Script::Keyed(replies.into_iter().collect()))
    }

    pub fn from_fn<F>(f: F) -> Self
    where
        F: Fn(&ChatRequest) -> ScriptedReply + Send + Sync + 'static,
    {
        Self::with(Script::Function(Box::new(f)))
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.requests.lock().clone()
    }
}

impl ModelClient for ScriptedClient {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ModelError> {
        self.requests.lock().push(request.clone());
        let reply = match &self.script {
            Script::Sequence(q) => q
                .lock()
                .pop_front()
                .ok_or_else(|| ModelError::Script("script exhausted".into()))?,
            Script::Keyed(map) => {
                let key = request.last_user_text().unwrap_or_default();
                map.get(key)
                    .cloned()
                    .ok_or_else(|| ModelError::Script(format!("no reply for `{key}`")))?
            }
            Script::Function(f) => f(request),
        };
        reply.into_response()
    }

    fn log(&self) -> &CallLog {
        &self.log
    }
}

/// Client for an HTTP chat-completions endpoint.
pub struct HttpClient {
    endpoint: String,
    api_key: Option<String>,
    http: reqwest::blocking::Client,
    log: CallLog,
}

impl HttpClient {
    /// `endpoint` is the full URL of the completions resource.
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Result<Self, ModelError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| ModelError::Transport(e.to_string()))?;
        Ok(Self {
            endpoint: endpoint.into(),
            api_key: None,
            http,
            log: CallLog::default(),
        })
    }

    pub fn with_api_key(mut self, key: impl Into<String>) -> Self {
        self.api_key = Some(key.into());
        self
    }
}

impl ModelClient for HttpClient {
    fn send(&self, request: &ChatRequest) -> Result<ChatResponse, ModelError> {
        let mut req = self.http.post(&self.endpoint).json(request);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| ModelError::Transport(e.to_string()))?;
        let status = resp.status();
        let body = resp.text().map_err(|e| ModelError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(ModelError::Status {
                status: status.as_u16(),
                body,
            });
        }
        serde_json::from_str(&body).map_err(|e| ModelError::Malformed(e.to_string()))
    }

    fn log(&self) -> &CallLog {
        &self.log
    }
}
