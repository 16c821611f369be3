use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{cosine, EmbeddingProvider, SemanticError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalibrationMode {
    /// Quantile rule exactly as printed in the reference algorithm.
    PaperVerbatim,
    /// Split conformal prediction on nonconformity 1 − e.
    CoverageCorrect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub description: String,
    pub schema_pddl: String,
    #[serde(default)]
    pub similarity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSet {
    pub records: Vec<CalibrationRecord>,
    pub epsilon: f64,
    pub mode: CalibrationMode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub q_hat: f64,
    pub epsilon: f64,
    pub mode: CalibrationMode,
    pub provider_id: String,
    pub n: usize,
}

/// `ceil` that ignores floating-point dust just above an integer.
fn ceil_tol(x: f64) -> f64 {
    (x - 1e-9).ceil()
}

fn check(n: usize, epsilon: f64) -> Result<(), SemanticError> {
    if n < 2 {
        return Err(SemanticError::Calibration(format!("need at least 2 records, got {n}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(SemanticError::Calibration(format!("epsilon {epsilon} outside (0, 1)")));
    }
    Ok(())
}

/// Threshold q̂ from true-pair similarity scores.
///
/// Paper-verbatim: level ⌈(n−1)(1−ε)⌉/n, value at ⌊level·(n−1)⌋ of the
/// ascending scores. Coverage-correct: level ⌈(n+1)(1−ε)⌉/n over r = 1 − e
/// with the higher neighbour, q̂ = 1 − r̂; a level above 1 yields q̂ = −1.
pub fn quantile_threshold(scores: &[f64], epsilon: f64, mode: CalibrationMode) -> Result<f64, SemanticError> {
    let n = scores.len();
    check(n, epsilon)?;
    if let Some(bad) = scores.iter().find(|s| !(-1.0..=1.0).contains(*s)) {
        return Err(SemanticError::Calibration(format!("similarity {bad} outside [-1, 1]")));
    }
    let nf = n as f64;
    match mode {
        CalibrationMode::PaperVerbatim => {
            let mut s = scores.to_vec();
            s.sort_by(f64::total_cmp);
            let level = ceil_tol((nf - 1.0) * (1.0 - epsilon)) / nf;
            let idx = ((level * (nf - 1.0)) + 1e-9).floor() as usize;
            Ok(s[idx.min(n - 1)])
        }
        CalibrationMode::CoverageCorrect => {
            // ascending r = 1 − e is descending e; indexing e directly
            // returns an exact calibration score
            let mut e = scores.to_vec();
            e.sort_by(|a, b| b.total_cmp(a));
            let level = ceil_tol((nf + 1.0) * (1.0 - epsilon)) / nf;
            if level > 1.0 + 1e-12 {
                return Ok(-1.0);
            }
            let idx = ceil_tol(level * (nf - 1.0)) as usize;
            Ok(e[idx.min(n - 1)])
        }
    }
}

pub fn calibrate(cal: &CalibrationSet, provider_id: &str) -> Result<Threshold, SemanticError> {
    let scores: Vec<f64> = cal
        .records
        .iter()
        .map(|r| r.similarity.ok_or_else(|| SemanticError::Calibration("unscored record".into())))
        .collect::<Result<_, _>>()?;
    Ok(Threshold {
        q_hat: quantile_threshold(&scores, cal.epsilon, cal.mode)?,
        epsilon: cal.epsilon,
        mode: cal.mode,
        provider_id: provider_id.to_string(),
        n: scores.len(),
    })
}

/// Loads `{description, schema_pddl}` lines.
pub fn load_calibration(path: &Path) -> Result<Vec<CalibrationRecord>, SemanticError> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for line in f.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// Fills in each record's similarity with `provider`.
pub fn score_records(records: &mut [CalibrationRecord], provider: &dyn EmbeddingProvider) -> Result<(), SemanticError> {
    let texts: Vec<String> = records
        .iter()
        .flat_map(|r| [r.description.clone(), r.schema_pddl.clone()])
        .collect();
    let vecs = provider.embed_batch(&texts)?;
    for (r, pair) in records.iter_mut().zip(vecs.chunks(2)) {
        r.similarity = Some(cosine(&pair[0], &pair[1])?);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: [f64; 4] = [0.5, 0.6, 0.7, 0.8];

    #[test]
    fn worked_examples() {
        assert_eq!(quantile_threshold(&S, 0.2, CalibrationMode::PaperVerbatim).unwrap(), 0.7);
        let q = quantile_threshold(&S, 0.2, CalibrationMode::CoverageCorrect).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn level_above_one_keeps_everything() {
        let q = quantile_threshold(&[0.3, 0.9, 0.5], 0.2, CalibrationMode::CoverageCorrect).unwrap();
        assert_eq!(q, -1.0);
    }

    #[test]
    fn rejects_tiny_sets_and_bad_epsilon() {
        assert!(quantile_threshold(&[0.5], 0.2, CalibrationMode::CoverageCorrect).is_err());
        assert!(quantile_threshold(&S, 1.0, CalibrationMode::PaperVerbatim).is_err());
        assert!(quantile_threshold(&S, 0.0, CalibrationMode::PaperVerbatim).is_err());
    }
}
