//! Scores the bundled calibration pairs with the local embedder and derives
//! the threshold under both quantile rules for a few error rates.
//!
//!     cargo run --example calibrate_threshold

use std::path::Path;

use schema_ensemble::semantic::{
    calibrate, load_calibration, score_records, CalibrationMode, CalibrationSet, EmbeddingProvider, LocalBaseline,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/calibration.jsonl");
    let provider = LocalBaseline::default();
    let mut records = load_calibration(&path)?;
    score_records(&mut records, &provider)?;
    let mut scores: Vec<f64> = records.iter().filter_map(|r| r.similarity).collect();
    scores.sort_by(f64::total_cmp);
    println!("{} true pairs, similarity {:.3} .. {:.3}", scores.len(), scores[0], scores[scores.len() - 1]);
    println!("{:>6} {:>16} {:>14}", "eps", "coverage-correct", "paper-verbatim");
    for epsilon in [0.05, 0.1, 0.2, 0.3] {
        let q = |mode| calibrate(&CalibrationSet { records: records.clone(), epsilon, mode }, &provider.id()).map(|t| t.q_hat);
        println!(
            "{epsilon:>6} {:>16.4} {:>14.4}",
            q(CalibrationMode::CoverageCorrect)?,
            q(CalibrationMode::PaperVerbatim)?
        );
    }
    Ok(())
}
