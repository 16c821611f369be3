use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::ingest::{digest_hex, Granularity, LlmConfig};
use crate::planner::SearchLimits;
use crate::semantic::CalibrationMode;

/// Environment variable for the remote embedding endpoint's bearer token.
pub const EMBEDDING_KEY_ENV: &str = "EMBEDDING_API_KEY";

/// Input and output locations. Relative paths resolve against the directory
/// of the config file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub domain: Option<PathBuf>,
    pub problem: Option<PathBuf>,
    pub nl_spec: Option<PathBuf>,
    /// JSON list of `{human, ai}` in-context examples.
    pub few_shot: Option<PathBuf>,
    /// Candidate store; `<output_dir>/candidates.jsonl` when unset.
    pub candidates: Option<PathBuf>,
    /// Filtered library; `<output_dir>/library.json` when unset.
    pub library: Option<PathBuf>,
    pub calibration: Option<PathBuf>,
    pub mutexes: Option<PathBuf>,
    /// Training-domain directories for the negatives stage.
    pub training: Vec<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    LocalBaseline,
    RemoteHttp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    pub provider: ProviderKind,
    pub endpoint: String,
    pub model: String,
    pub max_in_flight: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            provider: ProviderKind::LocalBaseline,
            endpoint: "http://127.0.0.1:8100/v1/embeddings".into(),
            model: "all-roberta-large-v1".into(),
            max_in_flight: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CpConfig {
    pub enabled: bool,
    pub epsilon: f64,
    pub mode: CalibrationMode,
}

impl Default for CpConfig {
    fn default() -> Self {
        CpConfig {
            enabled: true,
            epsilon: 0.2,
            mode: CalibrationMode::CoverageCorrect,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NegativesConfig {
    /// [easy, semi-hard, hard].
    pub weights: [f64; 3],
    pub count: usize,
    /// Reachable-state cap when mutexes have to be detected.
    pub state_bound: usize,
}

impl Default for NegativesConfig {
    fn default() -> Self {
        NegativesConfig {
            weights: [0.2, 0.3, 0.5],
            count: 10_000,
            state_bound: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    pub granularity: Granularity,
    pub llm: LlmConfig,
    pub embedding: EmbeddingConfig,
    pub cp: CpConfig,
    pub search: SearchLimits,
    /// Worker threads for the sweep.
    pub parallelism: usize,
    pub seed: u64,
    pub negatives: NegativesConfig,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            paths: Paths {
                output_dir: "out".into(),
                ..Paths::default()
            },
            granularity: Granularity::Detailed,
            llm: LlmConfig::default(),
            embedding: EmbeddingConfig::default(),
            cp: CpConfig::default(),
            search: SearchLimits::default(),
            parallelism: 4,
            seed: 0,
            negatives: NegativesConfig::default(),
            base_dir: PathBuf::from("."),
        }
    }
}

fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Applies `--a.b.c value` / `--a.b.c=value` pairs. Values are read as JSON
/// when they parse, as strings otherwise. Unknown names are rejected.
pub fn apply_overrides(mut v: Value, args: &[String]) -> Result<Value, PipelineError> {
    let template = serde_json::to_value(PipelineConfig::default())?;
    let mut i = 0;
    while i < args.len() {
        let flag = args[i]
            .strip_prefix("--")
            .ok_or_else(|| PipelineError::Config(format!("expected --name, got `{}`", args[i])))?;
        let (name, raw) = match flag.split_once('=') {
            Some((n, r)) => (n.to_string(), r.to_string()),
            None => {
                i += 1;
                let r = args
                    .get(i)
                    .ok_or_else(|| PipelineError::Config(format!("--{flag} needs a value")))?;
                (flag.to_string(), r.clone())
            }
        };
        i += 1;
        let keys: Vec<&str> = name.split('.').collect();
        let mut t = &template;
        for k in &keys {
            t = t
                .get(k)
                .ok_or_else(|| PipelineError::Config(format!("unknown setting `{name}`")))?;
        }
        let mut slot = &mut v;
        for k in &keys {
            if !slot.is_object() {
                *slot = Value::Object(Default::default());
            }
            slot = slot
                .as_object_mut()
                .expect("object")
                .entry(k.to_string())
                .or_insert(Value::Null);
        }
        *slot = parse_value(&raw);
    }
    Ok(v)
}

impl PipelineConfig {
    /// Reads `path`, applies overrides and validates.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_value(apply_overrides(v, overrides)?, base)
    }

    pub fn from_value(v: Value, base_dir: PathBuf) -> Result<Self, PipelineError> {
        let mut cfg: PipelineConfig =
            serde_json::from_value(v).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.base_dir = base_dir;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.llm.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.parallelism == 0 {
            return Err(PipelineError::Config("parallelism must be at least 1".into()));
        }
        if !(self.cp.epsilon > 0.0 && self.cp.epsilon < 1.0) {
            return Err(PipelineError::Config("cp.epsilon must lie in (0, 1)".into()));
        }
        if self.embedding.max_in_flight == 0 {
            return Err(PipelineError::Config("embedding.max_in_flight must be positive".into()));
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn require(&self, p: &Option<PathBuf>, name: &str) -> Result<PathBuf, PipelineError> {
        let p = p
            .as_ref()
            .ok_or_else(|| PipelineError::Config(format!("paths.{name} is not set")))?;
        let r = self.resolve(p);
        if !r.exists() {
            return Err(PipelineError::Config(format!("paths.{name}: {} does not exist", r.display())));
        }
        Ok(r)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.paths.output_dir)
    }

    pub fn candidates_path(&self) -> PathBuf {
        self.paths
            .candidates
            .as_ref()
            .map_or_else(|| self.output_dir().join("candidates.jsonl"), |p| self.resolve(p))
    }

    pub fn library_path(&self) -> PathBuf {
        self.paths
            .library
            .as_ref()
            .map_or_else(|| self.output_dir().join("library.json"), |p| self.resolve(p))
    }

    /// SHA-256 of the config as written, output directory excluded, so the
    /// same run written to two places carries the same digest.
    pub fn digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(paths) = v.get_mut("paths").and_then(Value::as_object_mut) {
            paths.remove("output_dir");
        }
        digest_hex(canonical(&v).as_bytes())
    }

    /// Seed for one pipeline stage: the first eight bytes of
    /// SHA-256(seed as little-endian bytes ‖ label).
    pub fn stage_seed(&self, label: &str) -> u64 {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update(label.as_bytes());
        let d = h.finalize();
        u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
    }
}

/// JSON with object keys sorted at every level.
fn canonical(v: &Value) -> String {
    match v {
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            let body: Vec<String> = keys
                .into_iter()
                .map(|k| format!("{}:{}", Value::String(k.clone()), canonical(&m[k])))
                .collect();
            format!("{{{}}}", body.join(","))
        }
        Value::Array(a) => format!("[{}]", a.iter().map(canonical).collect::<Vec<_>>().join(",")),
        other => other.to_string(),
    }
}
