//! Candidate acquisition: prompt rendering, LLM requests (live or replayed),
//! response parsing and the per-action schema library.

mod library;
mod llm;
mod prompt;
mod response;

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{render_predicate_list, Domain, PddlError};

pub use library::{
    build_library, read_candidates, write_candidates, Bucket, CandidateSchema, SchemaLibrary,
};
pub use llm::{
    digest_hex, request_schema, ChatTransport, HttpTransport, LlmClient, LlmConfig, LlmMode,
    ReplayRecord, ReplayStore,
};
pub use prompt::{render_prompt, ChatMessage, FewShotExample, Prompt, SYSTEM_PROMPT};
pub use response::{format_response, parse_llm_response};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("MISSING_SECTION: {0}")]
    MissingSection(&'static str),
    #[error("UNREPAIRABLE: {0}")]
    Unrepairable(String),
    #[error("missing replay record {digest} (instance {instance})")]
    MissingReplay { digest: String, instance: u32 },
    #[error("TRANSPORT_EXHAUSTED after {attempts} attempts: {last}")]
    TransportExhausted { attempts: u32, last: String },
    #[error("HTTP status {0}")]
    HttpStatus(u16),
    #[error("malformed reply: {0}")]
    MalformedReply(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Detailed,
    Ambiguous,
}

impl Granularity {
    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::Detailed => "detailed",
            Granularity::Ambiguous => "ambiguous",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionDescriptions {
    #[serde(default)]
    pub detailed: Option<String>,
    #[serde(default)]
    pub ambiguous: Option<String>,
}

impl ActionDescriptions {
    /// Falls back to the other granularity when one variant is absent.
    pub fn at(&self, g: Granularity) -> &str {
        let (first, second) = match g {
            Granularity::Detailed => (&self.detailed, &self.ambiguous),
            Granularity::Ambiguous => (&self.ambiguous, &self.detailed),
        };
        first.as_deref().or(second.as_deref()).unwrap_or_default()
    }
}

/// On-disk form of a natural-language domain description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NlFile {
    pub domain: String,
    pub domain_description: String,
    pub actions: BTreeMap<String, ActionDescriptions>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaturalLanguageSpec {
    pub domain_name: String,
    pub domain_description: String,
    pub actions: BTreeMap<String, ActionDescriptions>,
    /// Numbered predicate list with `;;` docs, rendered from the reference.
    pub predicate_list: String,
    pub granularity: Granularity,
}

impl NaturalLanguageSpec {
    pub fn new(nl: NlFile, reference: &Domain, granularity: Granularity) -> Result<Self, IngestError> {
        for a in &reference.actions {
            match nl.actions.get(&a.name) {
                Some(d) if d.detailed.is_some() || d.ambiguous.is_some() => {}
                _ => {
                    return Err(IngestError::Config(format!(
                        "no description for action `{}`",
                        a.name
                    )))
                }
            }
        }
        Ok(NaturalLanguageSpec {
            domain_name: nl.domain,
            domain_description: nl.domain_description,
            actions: nl.actions,
            predicate_list: render_predicate_list(reference),
            granularity,
        })
    }

    pub fn load(path: &Path, reference: &Domain, granularity: Granularity) -> Result<Self, IngestError> {
        let nl: NlFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        Self::new(nl, reference, granularity)
    }

    /// The description 𝒵(α) of `action` at the configured granularity.
    pub fn description(&self, action: &str) -> Option<&str> {
        self.actions.get(action).map(|d| d.at(self.granularity))
    }
}
