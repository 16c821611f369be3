//! Renders the chat prompt sent to the model for one action, with the
//! bundled few-shot examples.
//!
//!     cargo run --example render_prompt -- [action] [detailed|ambiguous]

use std::path::Path;

use schema_ensemble::ingest::{render_prompt, FewShotExample, Granularity, NaturalLanguageSpec};
use schema_ensemble::pddl::parse_domain;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let dir = root.join("domains/libraryworld");
    let action = std::env::args().nth(1).unwrap_or_else(|| "place-on-shelf".into());
    let g = match std::env::args().nth(2).as_deref() {
        Some("ambiguous") => Granularity::Ambiguous,
        _ => Granularity::Detailed,
    };
    let d = parse_domain(&std::fs::read_to_string(dir.join("domain.pddl"))?)?;
    let spec = NaturalLanguageSpec::load(&dir.join("nl.json"), &d, g)?;
    let examples: Vec<FewShotExample> =
        serde_json::from_str(&std::fs::read_to_string(root.join("prompts/newspapers.json"))?)?;
    let prompt = render_prompt(&spec, &action, &examples)?;
    for m in &prompt.messages {
        println!("===== {} =====\n{}\n", m.role, m.content);
    }
    Ok(())
}
