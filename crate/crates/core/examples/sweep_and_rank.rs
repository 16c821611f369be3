//! Sweeps every bundled corpus with and without the conformal filter and
//! prints the report rows side by side, including the solved ratio.
//!
//!     cargo run --release --example sweep_and_rank

use std::path::Path;

use schema_ensemble::ensemble::CSV_HEADERS;
use schema_ensemble::pipeline::{filter_stage, generate_stage, plan_rank_stage, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/configs");
    let mut tags: Vec<String> = std::fs::read_dir(&configs)?
        .filter_map(|e| e.ok()?.path().file_stem()?.to_str().map(String::from))
        .collect();
    tags.sort();
    println!("{},Solved Ratio", CSV_HEADERS.join(","));
    let (mut pooled_on, mut pooled_off) = ((0u64, 0u64), (0u64, 0u64));
    for tag in &tags {
        for cp in ["true", "false"] {
            let out_dir = std::env::temp_dir().join(format!("schema-ensemble-sweep/{tag}-{cp}"));
            let overrides = [
                "--cp.enabled".to_string(),
                cp.to_string(),
                "--paths.output_dir".to_string(),
                out_dir.display().to_string(),
            ];
            let cfg = PipelineConfig::load(&configs.join(format!("{tag}.json")), &overrides)?;
            generate_stage(&cfg)?;
            filter_stage(&cfg)?;
            let r = plan_rank_stage(&cfg)?.report;
            let ratio = r.solved_combinations as f64 / r.total_combinations.max(1) as f64;
            let pooled = if cp == "true" { &mut pooled_on } else { &mut pooled_off };
            pooled.0 += r.solved_combinations;
            pooled.1 += r.total_combinations;
            println!("{},{ratio:.3}", r.csv_row().join(","));
        }
    }
    println!(
        "\npooled solved ratio: {}/{} with the filter, {}/{} without",
        pooled_on.0, pooled_on.1, pooled_off.0, pooled_off.1
    );
    Ok(())
}
