//! Plans the Dungeon problem with both search strategies and compares
//! plan length and effort.
//!
//!     cargo run --example dungeon_plan

use std::path::Path;

use schema_ensemble::pddl::{parse_domain, parse_problem};
use schema_ensemble::planner::{ground, relaxed_reachable, search_plan, SearchLimits, SearchOutcome, Strategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/domains/dungeon");
    let d = parse_domain(&std::fs::read_to_string(dir.join("domain.pddl"))?)?;
    let p = parse_problem(&std::fs::read_to_string(dir.join("problem.pddl"))?)?;
    let task = ground(&d, &p)?;
    println!("{} ground actions, relaxed reachable: {}", task.actions.len(), relaxed_reachable(&task));
    for strategy in [Strategy::Bfs, Strategy::GbfsHadd] {
        let t = std::time::Instant::now();
        let lim = SearchLimits { strategy, ..SearchLimits::default() };
        match search_plan(&task, &lim) {
            SearchOutcome::Plan(plan) => {
                println!("\n{strategy:?}: {} steps, {:.1} ms", plan.len(), t.elapsed().as_secs_f64() * 1e3);
                println!("{}", plan.to_text());
            }
            other => println!("\n{strategy:?}: {other:?}"),
        }
    }
    Ok(())
}
