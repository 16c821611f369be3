//! Semantic coherence filtering: sentence embeddings, cosine similarity and
//! a conformal threshold over the schema library.

mod calibrate;
mod embed;

use std::collections::HashMap;

use thiserror::Error;

use crate::ingest::{NaturalLanguageSpec, SchemaLibrary};

pub use calibrate::{
    calibrate, load_calibration, quantile_threshold, score_records, CalibrationMode,
    CalibrationRecord, CalibrationSet, Threshold,
};
pub use embed::{cosine, EmbeddingProvider, EmbeddingVector, LocalBaseline, RemoteHttp, LOCAL_DIMENSION};

#[derive(Debug, Error)]
pub enum SemanticError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero-norm embedding")]
    ZeroVector,
    #[error("embedding transport: {0}")]
    Transport(String),
    #[error("calibration: {0}")]
    Calibration(String),
    #[error("threshold was calibrated with `{threshold}` but scoring uses `{provider}`")]
    ProviderMismatch { threshold: String, provider: String },
    #[error("no description for action `{0}`")]
    MissingDescription(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Sets each parsed candidate's similarity to
/// cosine(E(description of its action), E(canonical schema text)).
pub fn score_library(
    lib: &SchemaLibrary,
    spec: &NaturalLanguageSpec,
    provider: &dyn EmbeddingProvider,
) -> Result<SchemaLibrary, SemanticError> {
    let mut texts: Vec<String> = Vec::new();
    let mut slot: HashMap<String, usize> = HashMap::new();
    let mut intern = |t: &str, texts: &mut Vec<String>| -> usize {
        *slot.entry(t.to_string()).or_insert_with(|| {
            texts.push(t.to_string());
            texts.len() - 1
        })
    };
    let mut pairs = Vec::new();
    for (bi, b) in lib.buckets.iter().enumerate() {
        let desc = spec
            .description(&b.action)
            .ok_or_else(|| SemanticError::MissingDescription(b.action.clone()))?;
        let d = intern(desc, &mut texts);
        for (ci, c) in b.candidates.iter().enumerate() {
            if c.schema.is_some() {
                pairs.push((bi, ci, d, intern(&c.schema_pddl, &mut texts)));
            }
        }
    }
    let vecs = provider.embed_batch(&texts)?;
    let mut out = lib.clone();
    for (bi, ci, d, s) in pairs {
        out.buckets[bi].candidates[ci].similarity = Some(cosine(&vecs[d], &vecs[s])?);
    }
    Ok(out)
}

/// Scores `lib` and marks candidates with similarity below q̂ as filtered.
/// On any provider error the input library is left as it was.
pub fn filter_library(
    lib: &SchemaLibrary,
    spec: &NaturalLanguageSpec,
    th: &Threshold,
    provider: &dyn EmbeddingProvider,
) -> Result<SchemaLibrary, SemanticError> {
    if th.provider_id != provider.id() {
        return Err(SemanticError::ProviderMismatch {
            threshold: th.provider_id.clone(),
            provider: provider.id(),
        });
    }
    let mut out = score_library(lib, spec, provider)?;
    for c in out.buckets.iter_mut().flat_map(|b| b.candidates.iter_mut()) {
        if let Some(s) = c.similarity {
            if s < th.q_hat {
                c.filtered_out = true;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> EmbeddingVector {
        EmbeddingVector {
            values: xs.to_vec(),
            provider_id: "t".into(),
        }
    }

    #[test]
    fn cosine_cases() {
        assert!((cosine(&v(&[1.0, 2.0]), &v(&[1.0, 2.0])).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        assert!((cosine(&v(&[1.0, 1.0]), &v(&[1.0, 0.0])).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-8);
        assert!(matches!(cosine(&v(&[1.0]), &v(&[1.0, 0.0])), Err(SemanticError::DimensionMismatch(1, 2))));
        assert!(matches!(cosine(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])), Err(SemanticError::ZeroVector)));
    }

    #[test]
    fn local_baseline_is_deterministic_and_fixed_size() {
        let p = LocalBaseline::default();
        let a = p.embed("pick up the book").unwrap();
        assert_eq!(a, p.embed("pick up the book").unwrap());
        assert_eq!(a.dimension(), 1024);
        assert_eq!(p.embed("x").unwrap().dimension(), 1024);
        assert!(matches!(p.embed("   "), Err(SemanticError::ZeroVector)));
    }

    #[test]
    fn shared_predicate_tokens_score_higher() {
        let p = LocalBaseline::default();
        let desc = p.embed("the book is on the table and accessible").unwrap();
        let near = p.embed("(and (on-table ?x) (accessible ?x))").unwrap();
        let far = p.embed("(and (connected ?from ?to) (at-hero ?from))").unwrap();
        assert!(cosine(&desc, &near).unwrap() > cosine(&desc, &far).unwrap());
    }
}
