//! Finds predicate pairs that never hold together on one object in any state
//! reachable from a fixture problem, and compares them with the bundled table.
//!
//!     cargo run --example detect_mutexes -- [libraryworld|dungeon|minecraft]

use std::path::Path;

use schema_ensemble::negatives::{detect_mutexes, MutexTable};
use schema_ensemble::pddl::{parse_domain, parse_problem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "libraryworld".into());
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/domains").join(&name);
    let d = parse_domain(&std::fs::read_to_string(dir.join("domain.pddl"))?)?;
    let p = parse_problem(&std::fs::read_to_string(dir.join("problem.pddl"))?)?;
    let found = detect_mutexes(&d, &p, 100_000)?;
    let bundled = MutexTable::load(&dir.join("mutexes.json"))?;
    println!("detected: {}", found.to_json());
    println!("bundled:  {}", bundled.to_json());
    Ok(())
}
