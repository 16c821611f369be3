//! Runs the generate step in replay mode and summarizes what came back per
//! action: how many replies parsed and how many were viable.
//!
//!     cargo run --example replay_ingest -- [fixtures/configs/dungeon-ambiguous.json]

use std::collections::BTreeMap;
use std::path::PathBuf;

use schema_ensemble::pipeline::{generate_stage, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/configs/dungeon-ambiguous.json")
    });
    let cfg = PipelineConfig::load(&path, &[])?;
    let cands = generate_stage(&cfg)?;
    let mut per: BTreeMap<(u32, String), (usize, usize, usize)> = BTreeMap::new();
    for c in &cands {
        let e = per.entry((c.action_index, c.action.clone())).or_default();
        e.0 += 1;
        e.1 += c.schema.is_some() as usize;
        e.2 += c.viable as usize;
    }
    println!("{:<22} {:>7} {:>7} {:>7}", "action", "replies", "parsed", "viable");
    for ((_, a), (n, parsed, viable)) in per {
        println!("{a:<22} {n:>7} {parsed:>7} {viable:>7}");
    }
    if let Some(bad) = cands.iter().find(|c| !c.viable) {
        println!("\nfirst rejected reply ({} #{}): {:?}", bad.action, bad.instance, bad.diagnostics.first());
    }
    println!("\nwrote {}", cfg.candidates_path().display());
    Ok(())
}
