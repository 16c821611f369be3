//! Solves the Libraryworld problem, a Sussman-anomaly variant where the goal
//! order must be interleaved, and validates the plan.
//!
//!     cargo run --example sussman_anomaly

use std::path::Path;

use schema_ensemble::pddl::{parse_domain, parse_problem};
use schema_ensemble::planner::{check_solvable, ground, validate_plan, SearchLimits, Solvability};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/domains/libraryworld");
    let d = parse_domain(&std::fs::read_to_string(dir.join("domain.pddl"))?)?;
    let p = parse_problem(&std::fs::read_to_string(dir.join("problem.pddl"))?)?;
    let t = std::time::Instant::now();
    match check_solvable(&d, &p, &SearchLimits::default()) {
        Solvability::Solvable(plan) => {
            println!("{}", plan.to_text());
            println!(
                "{} steps in {:.1} ms, valid: {}",
                plan.len(),
                t.elapsed().as_secs_f64() * 1e3,
                validate_plan(&ground(&d, &p)?, &plan)
            );
        }
        other => println!("{other:?}"),
    }
    Ok(())
}
