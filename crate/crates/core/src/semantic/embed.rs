use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::SemanticError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    pub values: Vec<f64>,
    pub provider_id: String,
}

impl EmbeddingVector {
    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64, SemanticError> {
    if u.dimension() != v.dimension() {
        return Err(SemanticError::DimensionMismatch(u.dimension(), v.dimension()));
    }
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(SemanticError::ZeroVector);
    }
    let dot: f64 = u.values.iter().zip(&v.values).map(|(a, b)| a * b).sum();
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// A sentence encoder E(·). Implementations must tolerate concurrent calls.
pub trait EmbeddingProvider: Send + Sync {
    fn id(&self) -> String;

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, SemanticError>;

    fn embed(&self, text: &str) -> Result<EmbeddingVector, SemanticError> {
        let mut v = self.embed_batch(&[text.to_string()])?;
        v.pop().ok_or(SemanticError::ZeroVector)
    }
}

/// Hashed character-trigram and token counts, L2-normalized. Deterministic,
/// offline, and only lexically meaningful.
#[derive(Clone, Debug)]
pub struct LocalBaseline {
    pub dimension: usize,
    pub seed: u64,
}

pub const LOCAL_DIMENSION: usize = 1024;
const LOCAL_SEED: u64 = 0x5eed_cafe_f00d_0001;

impl Default for LocalBaseline {
    fn default() -> Self {
        LocalBaseline {
            dimension: LOCAL_DIMENSION,
            seed: LOCAL_SEED,
        }
    }
}

fn fnv1a(seed: u64, tag: u8, bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed;
    for &b in std::iter::once(&tag).chain(bytes) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl LocalBaseline {
    fn vector(&self, text: &str) -> Result<Vec<f64>, SemanticError> {
        let lower = text.to_lowercase();
        let mut v = vec![0.0; self.dimension];
        let mut bump = |tag: u8, s: &str| {
            let i = (fnv1a(self.seed, tag, s.as_bytes()) % self.dimension as u64) as usize;
            v[i] += 1.0;
        };
        let chars: Vec<char> = lower.split_whitespace().collect::<Vec<_>>().join(" ").chars().collect();
        for w in chars.windows(3) {
            bump(b'c', &w.iter().collect::<String>());
        }
        let trim: &[char] = &['?', '.', ',', ':', ';', '\'', '"', '`', '*', '[', ']', '!'];
        for tok in lower.split(|c: char| c.is_whitespace() || c == '(' || c == ')') {
            let tok = tok.trim_matches(trim);
            if tok.is_empty() {
                continue;
            }
            bump(b't', tok);
            if tok.contains('-') {
                for part in tok.split('-').filter(|p| !p.is_empty()) {
                    bump(b't', part);
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SemanticError::ZeroVector);
        }
        v.iter_mut().for_each(|x| *x /= norm);
        Ok(v)
    }
}

impl EmbeddingProvider for LocalBaseline {
    fn id(&self) -> String {
        format!("local-baseline/{}/{:x}", self.dimension, self.seed)
    }

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, SemanticError> {
        let id = self.id();
        texts
            .iter()
            .map(|t| {
                Ok(EmbeddingVector {
                    values: self.vector(t)?,
                    provider_id: id.clone(),
                })
            })
            .collect()
    }
}

struct Gate {
    in_flight: Mutex<usize>,
    cv: Condvar,
    limit: usize,
}

impl Gate {
    fn enter(&self) {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        while *n >= self.limit {
            n = self.cv.wait(n).unwrap_or_else(|e| e.into_inner());
        }
        *n += 1;
    }

    fn leave(&self) {
        let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.cv.notify_one();
    }
}

/// Client for an embeddings endpoint speaking
/// `{"model", "input": [..]} -> {"data": [{"embedding": [..]}]}`.
/// Vectors are cached by SHA-256 of the text for the lifetime of the client.
pub struct RemoteHttp {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    agent: ureq::Agent,
    cache: Mutex<HashMap<[u8; 32], Vec<f64>>>,
    requests: AtomicUsize,
    gate: Gate,
}

impl RemoteHttp {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>, api_key: Option<String>, max_in_flight: usize) -> Self {
        RemoteHttp {
            endpoint: endpoint.into(),
            model: model.into(),
            api_key,
            agent: ureq::Agent::config_builder()
                .timeout_global(Some(Duration::from_secs(120)))
                .http_status_as_error(false)
                .build()
                .into(),
            cache: Mutex::new(HashMap::new()),
            requests: AtomicUsize::new(0),
            gate: Gate {
                in_flight: Mutex::new(0),
                cv: Condvar::new(),
                limit: max_in_flight.max(1),
            },
        }
    }

    /// Number of HTTP requests issued so far.
    pub fn request_count(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    fn post(&self, input: &[&str]) -> Result<Vec<Vec<f64>>, SemanticError> {
        self.gate.enter();
        let result = self.post_inner(input);
        self.gate.leave();
        result
    }

    fn post_inner(&self, input: &[&str]) -> Result<Vec<Vec<f64>>, SemanticError> {
        self.requests.fetch_add(1, Ordering::SeqCst);
        let mut req = self.agent.post(&self.endpoint);
        if let Some(k) = &self.api_key {
            req = req.header("Authorization", &format!("Bearer {k}"));
        }
        let mut resp = req
            .send_json(json!({ "model": self.model, "input": input }))
            .map_err(|e| SemanticError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            return Err(SemanticError::Transport(format!("HTTP {status}")));
        }
        let v: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| SemanticError::Transport(e.to_string()))?;
        let data = v["data"]
            .as_array()
            .ok_or_else(|| SemanticError::Transport("reply lacks `data`".into()))?;
        if data.len() != input.len() {
            return Err(SemanticError::Transport(format!(
                "asked for {} embeddings, got {}",
                input.len(),
                data.len()
            )));
        }
        data.iter()
            .map(|d| {
                d["embedding"]
                    .as_array()
                    .and_then(|xs| xs.iter().map(Value::as_f64).collect::<Option<Vec<f64>>>())
                    .ok_or_else(|| SemanticError::Transport("malformed `embedding`".into()))
            })
            .collect()
    }
}

impl EmbeddingProvider for RemoteHttp {
    fn id(&self) -> String {
        format!("remote-http/{}", self.model)
    }

    fn embed_batch(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, SemanticError> {
        let keys: Vec<[u8; 32]> = texts.iter().map(|t| Sha256::digest(t.as_bytes()).into()).collect();
        let missing: Vec<usize> = {
            let cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
            let mut seen = std::collections::HashSet::new();
            (0..texts.len())
                .filter(|&i| !cache.contains_key(&keys[i]) && seen.insert(keys[i]))
                .collect()
        };
        if !missing.is_empty() {
            let input: Vec<&str> = missing.iter().map(|&i| texts[i].as_str()).collect();
            let got = self.post(&input)?;
            let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
            for (&i, v) in missing.iter().zip(got) {
                cache.insert(keys[i], v);
            }
        }
        let cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        let id = self.id();
        keys.iter()
            .map(|k| {
                let values = cache[k].clone();
                if values.iter().all(|x| *x == 0.0) {
                    return Err(SemanticError::ZeroVector);
                }
                Ok(EmbeddingVector {
                    values,
                    provider_id: id.clone(),
                })
            })
            .collect()
    }
}
