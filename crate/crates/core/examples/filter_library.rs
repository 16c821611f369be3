//! Generates (replay) and filters one corpus, then prints per-action bucket
//! sizes before and after the threshold.
//!
//!     cargo run --example filter_library -- [fixtures/configs/minecraft-ambiguous.json]

use std::path::PathBuf;

use schema_ensemble::pipeline::{generate_stage, filter_stage, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/configs/minecraft-ambiguous.json")
    });
    let cfg = PipelineConfig::load(&path, &[])?;
    generate_stage(&cfg)?;
    let f = filter_stage(&cfg)?;
    match &f.threshold {
        Some(t) => println!("threshold {:.4} ({:?}, eps {}, n {})", t.q_hat, t.mode, t.epsilon, t.n),
        None => println!("threshold disabled"),
    }
    println!("{:<22} {:>6} {:>6} {:>6}", "action", "cands", "viable", "kept");
    for b in &f.library.buckets {
        let viable = b.candidates.iter().filter(|c| c.viable).count();
        println!("{:<22} {:>6} {:>6} {:>6}", b.action, b.candidates.len(), viable, b.selectable().count());
    }
    println!("combinations after filtering: {}", f.combinations);
    Ok(())
}
