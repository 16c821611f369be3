//! Parses a fixture domain and problem, prints the canonical form and checks
//! every reference schema against the domain.
//!
//!     cargo run --example parse_domain -- [domain.pddl problem.pddl]

use std::path::PathBuf;

use schema_ensemble::pddl::{parse_domain, parse_problem, print_domain, validate_schema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/domains/libraryworld");
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (dp, pp) = match args.as_slice() {
        [d, p] => (PathBuf::from(d), PathBuf::from(p)),
        _ => (dir.join("domain.pddl"), dir.join("problem.pddl")),
    };
    let d = parse_domain(&std::fs::read_to_string(dp)?)?;
    let p = parse_problem(&std::fs::read_to_string(pp)?)?;
    print!("{}", print_domain(&d));
    println!(
        "\n{} types, {} predicates, {} actions; problem {} has {} objects, {} init atoms, {} goal literals",
        d.types.len(),
        d.predicates.len(),
        d.actions.len(),
        p.name,
        p.objects.len(),
        p.init.len(),
        p.goal.len()
    );
    for a in &d.actions {
        let diags = validate_schema(a, &d);
        println!("{:<20} {}", a.name, if diags.is_empty() { "ok".to_string() } else { format!("{diags:?}") });
    }
    Ok(())
}
