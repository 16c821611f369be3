//! Compares the closed-form chance that at least one schema set is solvable
//! with the exact per-bucket formula and a seeded simulation.
//!
//!     cargo run --release --example success_probability

use schema_ensemble::analysis::{analyze, SolvabilityModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let headline = analyze(&SolvabilityModel::new(0.05, 5, 25).with_exponent(5f64.powi(10)), None, 0)?;
    println!("p=0.05, M=5, K=5^10: {:.2}%\n", headline.paper_model * 100.0);
    println!("{:>5} {:>2} {:>3} {:>10} {:>10} {:>10} {:>8}", "p", "M", "N", "paper", "bucket", "sim", "stderr");
    for p in [0.05, 0.1, 0.3] {
        for m in [2, 3, 5] {
            for n in [2, 5, 10] {
                let r = analyze(&SolvabilityModel::new(p, m, n), Some(20_000), 1)?;
                println!(
                    "{p:>5} {m:>2} {n:>3} {:>10.6} {:>10.6} {:>10.6} {:>8.5}",
                    r.paper_model,
                    r.exact_bucket,
                    r.monte_carlo.unwrap_or(f64::NAN),
                    r.stderr.unwrap_or(f64::NAN)
                );
            }
        }
    }
    Ok(())
}
