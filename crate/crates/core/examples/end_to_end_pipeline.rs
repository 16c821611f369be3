//! Runs generate, filter, plan-rank and negatives for one config and prints
//! the report row and the top-ranked plan.
//!
//!     cargo run --release --example end_to_end_pipeline -- [config.json] [--key value ...]

use std::path::PathBuf;

use schema_ensemble::ensemble::CSV_HEADERS;
use schema_ensemble::pipeline::{negatives_stage, run_pipeline, write_run_metadata, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).peekable();
    let path = match args.peek() {
        Some(a) if !a.starts_with("--") => PathBuf::from(args.next().unwrap_or_default()),
        _ => PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/configs/libraryworld-detailed.json"),
    };
    let overrides: Vec<String> = args.collect();
    let cfg = PipelineConfig::load(&path, &overrides)?;
    let out = run_pipeline(&cfg)?;
    let triplets = negatives_stage(&cfg)?;
    write_run_metadata(&cfg, "example")?;
    println!("{}\n{}", CSV_HEADERS.join(","), out.report.csv_row().join(","));
    if !out.empty_buckets.is_empty() {
        println!("empty buckets: {:?}", out.empty_buckets);
    }
    if let Some(top) = out.ranked.first() {
        println!("\ntop plan (rank sum {:.4}, set {}):\n{}", top.rank_sum, top.set_id, top.plan);
    }
    println!("{} triplets, artifacts in {}", triplets.len(), cfg.output_dir().display());
    Ok(())
}
