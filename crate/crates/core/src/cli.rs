//! Command-line front end. Every subcommand returns a process exit code.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::analysis::{analyze, SolvabilityModel};
use crate::pddl::{parse_domain, parse_problem};
use crate::pipeline::{
    calibrate_stage, filter_stage, generate_stage, negatives_stage, plan_rank_stage, write_run_metadata,
    PipelineConfig, PipelineError, EXIT_CONFIG, EXIT_NO_PLAN, EXIT_OK,
};
use crate::planner::{ground, validate_plan, Plan};

#[derive(Parser, Debug)]
#[command(name = "schema-ensemble", version, about = "Ensemble PDDL schema acquisition, filtering and planning")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Debug)]
struct Staged {
    /// Pipeline config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Setting overrides: `--cp.epsilon 0.1`, `--llm.mode=live`, ...
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, num_args = 0..)]
    overrides: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample N candidate schemas per action from the LLM (or replay store).
    Generate(Staged),
    /// Score candidates and apply the conformal threshold.
    Filter(Staged),
    /// Sweep every schema set, rank plans and write the reports.
    PlanRank(Staged),
    /// Build the triplet dataset for encoder finetuning.
    Negatives(Staged),
    /// Compute the conformal threshold from the calibration set only.
    Calibrate(Staged),
    /// Success probability of the ensemble under the i.i.d. model.
    Analyze {
        #[arg(long)]
        p: f64,
        #[arg(long = "M")]
        m: u32,
        #[arg(long = "N")]
        n: u32,
        /// Combination exponent; N^M when omitted.
        #[arg(long = "K")]
        k: Option<f64>,
        /// Monte Carlo trials (≥ 100); skipped when omitted.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a plan file against a domain and problem.
    ValidatePlan {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        plan: PathBuf,
    },
}

fn fail(e: PipelineError) -> i32 {
    eprintln!("error: {e}");
    e.exit_code()
}

fn staged(s: &Staged, name: &str, f: impl FnOnce(&PipelineConfig) -> Result<i32, PipelineError>) -> i32 {
    let cfg = match PipelineConfig::load(&s.config, &s.overrides) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let code = match f(&cfg) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Err(e) = write_run_metadata(&cfg, name) {
        return fail(e);
    }
    code
}

fn print(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match &cli.cmd {
        Command::Generate(s) => staged(s, "generate", |cfg| {
            let c = generate_stage(cfg)?;
            let viable = c.iter().filter(|c| c.viable).count();
            print(&json!({
                "candidates": c.len(),
                "viable": viable,
                "store": cfg.candidates_path(),
            }));
            Ok(EXIT_OK)
        }),
        Command::Calibrate(s) => staged(s, "calibrate", |cfg| {
            print(&serde_json::to_value(calibrate_stage(cfg)?)?);
            Ok(EXIT_OK)
        }),
        Command::Filter(s) => staged(s, "filter", |cfg| {
            let f = filter_stage(cfg)?;
            print(&json!({
                "cp_applied": f.cp_applied,
                "q_hat": f.threshold.as_ref().map(|t| t.q_hat),
                "viable_counts": f.viable_counts,
                "combinations": f.combinations.to_string(),
            }));
            Ok(EXIT_OK)
        }),
        Command::PlanRank(s) => staged(s, "plan-rank", |cfg| {
            let o = plan_rank_stage(cfg)?;
            print(&json!({
                "report": o.report,
                "empty_buckets": o.empty_buckets,
                "top_plan": o.ranked.first(),
            }));
            if !o.empty_buckets.is_empty() {
                eprintln!("EMPTY_BUCKET: no selectable candidate for {}", o.empty_buckets.join(", "));
            }
            Ok(if o.solved() { EXIT_OK } else { EXIT_NO_PLAN })
        }),
        Command::Negatives(s) => staged(s, "negatives", |cfg| {
            let t = negatives_stage(cfg)?;
            print(&json!({ "triplets": t.len(), "path": cfg.output_dir().join("triplets.jsonl") }));
            Ok(EXIT_OK)
        }),
        Command::Analyze { p, m, n, k, trials, seed, out } => {
            let mut model = SolvabilityModel::new(*p, *m, *n);
            model.k = *k;
            match analyze(&model, *trials, *seed) {
                Ok(r) => {
                    let v = serde_json::to_value(&r).expect("json");
                    if let Some(path) = out {
                        if let Err(e) = std::fs::write(path, format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))) {
                            return fail(e.into());
                        }
                    }
                    print(&v);
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_CONFIG
                }
            }
        }
        Command::ValidatePlan { domain, problem, plan } => validate(domain, problem, plan),
    }
}

fn validate(domain: &PathBuf, problem: &PathBuf, plan: &PathBuf) -> i32 {
    let load = || -> Result<(crate::planner::GroundTask, Plan), PipelineError> {
        let rd = |p: &PathBuf| {
            std::fs::read_to_string(p).map_err(|e| PipelineError::Input(format!("{}: {e}", p.display())))
        };
        let d = parse_domain(&rd(domain)?)?;
        let p = parse_problem(&rd(problem)?)?;
        let task = ground(&d, &p).map_err(|e| PipelineError::Input(e.to_string()))?;
        let plan = Plan::from_text(&rd(plan)?).ok_or_else(|| PipelineError::Input("malformed plan file".into()))?;
        Ok((task, plan))
    };
    match load() {
        Ok((task, plan)) => {
            let ok = validate_plan(&task, &plan);
            print(&plan.to_json(ok));
            if ok {
                EXIT_OK
            } else {
                EXIT_NO_PLAN
            }
        }
        Err(e) => fail(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_pass_through_clap() {
        let cli = Cli::try_parse_from([
            "x", "filter", "--config", "c.json", "--cp.epsilon", "0.1", "--llm.mode=live",
        ])
        .unwrap();
        match cli.cmd {
            Command::Filter(s) => assert_eq!(s.overrides, vec!["--cp.epsilon", "0.1", "--llm.mode=live"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_config_exits_three() {
        assert_eq!(run(["x", "generate", "--config", "/nonexistent/cfg.json"]), EXIT_CONFIG);
    }
}
