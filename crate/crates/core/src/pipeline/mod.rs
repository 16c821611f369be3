//! The three-step pipeline plus the auxiliary stages. Stages exchange data
//! only through files under the output directory.

mod config;
mod stages;

use thiserror::Error;

use crate::ensemble::EnsembleError;
use crate::ingest::IngestError;
use crate::negatives::NegativeError;
use crate::pddl::PddlError;
use crate::semantic::SemanticError;

pub use config::{
    apply_overrides, CpConfig, EmbeddingConfig, NegativesConfig, Paths, PipelineConfig, ProviderKind,
    EMBEDDING_KEY_ENV,
};
pub use stages::{
    calibrate_stage, filter_stage, generate_stage, load_library, negatives_stage, plan_rank_stage,
    run_pipeline, write_run_metadata, LibraryFile, PlanRankOutcome, ThresholdFile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_PLAN: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_UPSTREAM: i32 = 4;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("input: {0}")]
    Input(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Semantic(#[from] SemanticError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Negative(#[from] NegativeError),
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl PipelineError {
    /// 3 for bad configuration or inputs, 4 for I/O and transport.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) | PipelineError::Input(_) | PipelineError::Pddl(_) => EXIT_CONFIG,
            PipelineError::Ingest(e) => match e {
                IngestError::Config(_) | IngestError::UnknownAction(_) | IngestError::Pddl(_) => EXIT_CONFIG,
                _ => EXIT_UPSTREAM,
            },
            PipelineError::Semantic(e) => match e {
                SemanticError::Calibration(_)
                | SemanticError::ProviderMismatch { .. }
                | SemanticError::MissingDescription(_) => EXIT_CONFIG,
                _ => EXIT_UPSTREAM,
            },
            PipelineError::Negative(e) => match e {
                NegativeError::Io(_) | NegativeError::Json(_) => EXIT_UPSTREAM,
                _ => EXIT_CONFIG,
            },
            PipelineError::Ensemble(EnsembleError::EmptyBucket(_)) => EXIT_NO_PLAN,
            PipelineError::Ensemble(EnsembleError::TooManySets(_)) => EXIT_CONFIG,
            PipelineError::Ensemble(_) | PipelineError::Io(_) | PipelineError::Json(_) => EXIT_UPSTREAM,
        }
    }
}
