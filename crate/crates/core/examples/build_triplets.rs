//! Builds a small triplet dataset from the training domains and prints the
//! mix of negative types plus one example of each.
//!
//!     cargo run --example build_triplets -- [count] [seed]

use std::collections::BTreeMap;
use std::path::Path;

use schema_ensemble::ingest::{Granularity, NaturalLanguageSpec};
use schema_ensemble::negatives::{build_triplets, MutexTable, TrainingDomain};
use schema_ensemble::pddl::parse_domain;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let count: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let seed: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(0);
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/training");
    let mut corpus = Vec::new();
    for t in ["newspapers", "blocksworld", "gripper", "ferry", "logistics"] {
        let dir = root.join(t);
        let domain = parse_domain(&std::fs::read_to_string(dir.join("domain.pddl"))?)?;
        let spec = NaturalLanguageSpec::load(&dir.join("nl.json"), &domain, Granularity::Detailed)?;
        corpus.push(TrainingDomain { spec, domain, mutexes: MutexTable::load(&dir.join("mutexes.json"))? });
    }
    let samples = build_triplets(&corpus, [0.2, 0.3, 0.5], count, seed)?;
    let mut mix: BTreeMap<String, usize> = BTreeMap::new();
    for s in &samples {
        let key = match s.manipulation {
            Some(k) => format!("{:?}/{k:?}", s.negative_type),
            None => format!("{:?}", s.negative_type),
        };
        *mix.entry(key).or_default() += 1;
    }
    for (k, n) in &mix {
        println!("{k:<20} {n}");
    }
    if let Some(s) = samples.iter().find(|s| s.manipulation.is_some()) {
        println!("\nanchor:   {}\npositive:\n{}\nnegative:\n{}", s.anchor, s.positive, s.negative);
    }
    Ok(())
}
