//! Applies each of the four single-literal corruptions to every Libraryworld
//! action and prints how many distinct hard negatives each one can produce.
//!
//!     cargo run --example manipulate_schemas -- [seed]

use std::path::Path;

use schema_ensemble::negatives::{eligible_edits, manipulate, ManipulationKind, MutexTable};
use schema_ensemble::pddl::parse_domain;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/domains/libraryworld");
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let d = parse_domain(&std::fs::read_to_string(dir.join("domain.pddl"))?)?;
    let mutexes = MutexTable::load(&dir.join("mutexes.json"))?;
    for a in &d.actions {
        println!("{}", a.canonical_text());
        for kind in ManipulationKind::ALL {
            let options = eligible_edits(a, kind, &mutexes, &d).len();
            match manipulate(a, kind, seed, &mutexes, &d) {
                Ok(m) => println!("  {kind:?} ({options} options):\n{}", indent(&m.canonical_text())),
                Err(e) => println!("  {kind:?}: {e}"),
            }
        }
        println!();
    }
    Ok(())
}

fn indent(s: &str) -> String {
    s.lines().map(|l| format!("    {l}")).collect::<Vec<_>>().join("\n")
}
