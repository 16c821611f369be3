use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::{IngestError, Prompt};

/// Environment variable holding the bearer token for the LLM endpoint.
pub const API_KEY_ENV: &str = "LLM_API_KEY";

const MAX_ATTEMPTS: u32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LlmMode {
    Live,
    Replay,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
    /// Number of independent samples N per action.
    pub instances: u32,
    pub mode: LlmMode,
    pub replay_store: Option<PathBuf>,
    /// Upper bound on in-flight requests.
    pub concurrency: usize,
    /// First retry delay; doubles per attempt.
    pub backoff_ms: u64,
}

impl Default for LlmConfig {
    fn default() -> Self {
        LlmConfig {
            endpoint: "http://127.0.0.1:8000/v1/chat/completions".into(),
            model: "glm-4-0520".into(),
            temperature: 0.3,
            top_p: 0.3,
            max_tokens: 1024,
            instances: 10,
            mode: LlmMode::Replay,
            replay_store: None,
            concurrency: 4,
            backoff_ms: 500,
        }
    }
}

impl LlmConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        let bad = |m: &str| Err(IngestError::Config(m.to_string()));
        if self.instances == 0 {
            return bad("llm.instances must be at least 1");
        }
        if !(0.0..=2.0).contains(&self.temperature) {
            return bad("llm.temperature must lie in [0, 2]");
        }
        if !(self.top_p > 0.0 && self.top_p <= 1.0) {
            return bad("llm.top_p must lie in (0, 1]");
        }
        if self.max_tokens == 0 {
            return bad("llm.max_tokens must be positive");
        }
        if self.concurrency == 0 {
            return bad("llm.concurrency must be positive");
        }
        if self.mode == LlmMode::Replay && self.replay_store.is_none() {
            return bad("replay mode requires llm.replay_store");
        }
        Ok(())
    }
}

pub fn digest_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayRecord {
    pub digest: String,
    pub action: String,
    pub instance: u32,
    pub response: String,
}

/// Directory of `{digest}.json` records keyed by prompt text and instance.
#[derive(Debug)]
pub struct ReplayStore {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

impl ReplayStore {
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(ReplayStore {
            dir,
            write_lock: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(prompt: &Prompt, instance: u32) -> String {
        let mut text = prompt.text();
        text.push_str(&format!("\n#instance={instance}"));
        digest_hex(text.as_bytes())
    }

    pub fn get(&self, digest: &str) -> Result<Option<ReplayRecord>, IngestError> {
        let path = self.dir.join(format!("{digest}.json"));
        match std::fs::read_to_string(&path) {
            Ok(s) => Ok(Some(serde_json::from_str(&s)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    pub fn put(&self, rec: &ReplayRecord) -> Result<(), IngestError> {
        let _guard = self.write_lock.lock().unwrap_or_else(|e| e.into_inner());
        let path = self.dir.join(format!("{}.json", rec.digest));
        let tmp = self.dir.join(format!(".{}.tmp", rec.digest));
        std::fs::write(&tmp, serde_json::to_string_pretty(rec)? + "\n")?;
        std::fs::rename(tmp, path)?;
        Ok(())
    }

    pub fn len(&self) -> std::io::Result<usize> {
        Ok(std::fs::read_dir(&self.dir)?
            .filter_map(Result::ok)
            .filter(|e| e.path().extension().is_some_and(|x| x == "json"))
            .count())
    }

    pub fn is_empty(&self) -> std::io::Result<bool> {
        self.len().map(|n| n == 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransportError {
    /// Connection-level failure; retried.
    Network(String),
    Status(u16),
    Malformed(String),
}

/// Sends one chat-completions request body and returns the message content.
pub trait ChatTransport: Send + Sync {
    fn complete(&self, body: &Value) -> Result<String, TransportError>;
}

pub struct HttpTransport {
    agent: ureq::Agent,
    endpoint: String,
    api_key: Option<String>,
}

impl HttpTransport {
    pub fn new(endpoint: impl Into<String>, api_key: Option<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(120)))
            .http_status_as_error(false)
            .build()
            .into();
        HttpTransport {
            agent,
            endpoint: endpoint.into(),
            api_key,
        }
    }

    pub fn from_env(endpoint: impl Into<String>) -> Self {
        Self::new(endpoint, std::env::var(API_KEY_ENV).ok())
    }
}

impl ChatTransport for HttpTransport {
    fn complete(&self, body: &Value) -> Result<String, TransportError> {
        let mut req = self.agent.post(&self.endpoint);
        if let Some(k) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {k}"));
        }
        let mut resp = req
            .send_json(body)
            .map_err(|e| TransportError::Network(e.to_string()))?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(TransportError::Status(status));
        }
        let v: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| TransportError::Malformed(e.to_string()))?;
        v["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| TransportError::Malformed("no choices[0].message.content".into()))
    }
}

pub struct LlmClient {
    cfg: LlmConfig,
    store: Option<ReplayStore>,
    transport: Option<Box<dyn ChatTransport>>,
}

impl LlmClient {
    pub fn replay(cfg: LlmConfig) -> Result<Self, IngestError> {
        let dir = cfg
            .replay_store
            .clone()
            .ok_or_else(|| IngestError::Config("replay mode requires llm.replay_store".into()))?;
        Ok(LlmClient {
            store: Some(ReplayStore::open(dir)?),
            cfg,
            transport: None,
        })
    }

    /// Live client; responses are recorded when a replay store is configured.
    pub fn live(cfg: LlmConfig, transport: Box<dyn ChatTransport>) -> Result<Self, IngestError> {
        let store = match &cfg.replay_store {
            Some(d) => Some(ReplayStore::open(d)?),
            None => None,
        };
        Ok(LlmClient {
            cfg,
            store,
            transport: Some(transport),
        })
    }

    pub fn from_config(cfg: LlmConfig) -> Result<Self, IngestError> {
        match cfg.mode {
            LlmMode::Replay => Self::replay(cfg),
            LlmMode::Live => {
                let t = HttpTransport::from_env(cfg.endpoint.clone());
                Self::live(cfg, Box::new(t))
            }
        }
    }

    pub fn config(&self) -> &LlmConfig {
        &self.cfg
    }

    pub fn request_body(&self, prompt: &Prompt, instance: u32) -> Value {
        json!({
            "model": self.cfg.model,
            "messages": prompt.messages,
            "temperature": self.cfg.temperature,
            "top_p": self.cfg.top_p,
            "max_tokens": self.cfg.max_tokens,
            "seed": instance,
        })
    }

    pub fn request(&self, prompt: &Prompt, instance: u32) -> Result<String, IngestError> {
        let digest = ReplayStore::key(prompt, instance);
        if let Some(store) = &self.store {
            if let Some(rec) = store.get(&digest)? {
                return Ok(rec.response);
            }
        }
        let Some(transport) = &self.transport else {
            return Err(IngestError::MissingReplay { digest, instance });
        };
        let body = self.request_body(prompt, instance);
        let mut last = String::new();
        for attempt in 0..MAX_ATTEMPTS {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(self.cfg.backoff_ms << (attempt - 1)));
            }
            match transport.complete(&body) {
                Ok(text) => {
                    if let Some(store) = &self.store {
                        store.put(&ReplayRecord {
                            digest,
                            action: prompt.action.clone(),
                            instance,
                            response: text.clone(),
                        })?;
                    }
                    return Ok(text);
                }
                Err(TransportError::Network(e)) => last = e,
                Err(TransportError::Status(s)) if s == 429 || s >= 500 => {
                    last = format!("HTTP {s}")
                }
                Err(TransportError::Status(s)) => return Err(IngestError::HttpStatus(s)),
                Err(TransportError::Malformed(m)) => return Err(IngestError::MalformedReply(m)),
            }
        }
        Err(IngestError::TransportExhausted {
            attempts: MAX_ATTEMPTS,
            last,
        })
    }
}

/// One-shot request using a client built from `cfg`.
pub fn request_schema(prompt: &Prompt, cfg: &LlmConfig, instance: u32) -> Result<String, IngestError> {
    LlmClient::from_config(cfg.clone())?.request(prompt, instance)
}
