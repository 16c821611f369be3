//! Repairs a sloppy model-written condition and validates the resulting
//! schema, printing each diagnostic with its position.
//!
//!     cargo run --example repair_and_validate

use std::path::Path;

use schema_ensemble::pddl::{parse_action, parse_condition, parse_domain, print_condition, repair_syntax, validate_schema};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/domains/libraryworld");
    let d = parse_domain(&std::fs::read_to_string(dir.join("domain.pddl"))?)?;
    let declared: Vec<String> = d.predicates.iter().map(|p| p.name.clone()).collect();

    let messy = "```pddl\n(AND (On_Table ?b) (Hands_Free)\n```";
    let fixed = repair_syntax(messy, Some(&declared))?;
    println!("input:    {messy:?}\nrepaired: {}", print_condition(&parse_condition(&fixed)?));

    let schema = parse_action(
        "(:action take-from-table :parameters (?b - book)
           :precondition (and (on-table ?b) (hands-free ?b) (glowing ?b))
           :effect (and (holding ?c) (not (on-table ?b))))",
    )?;
    for diag in validate_schema(&schema, &d) {
        println!("{}:{} {:?} {}", diag.line, diag.column, diag.code, diag.message);
    }
    Ok(())
}
