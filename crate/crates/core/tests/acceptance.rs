//! Acceptance checks. Prints one PASS/FAIL line per criterion with the
//! measured value and the pinned tolerance, and exits non-zero on any FAIL.

mod common;

use std::path::Path;
use std::time::Instant;

use common::{cp_coverage, fixture, generated_tasks, oracle, random_library, seeded_manipulations, variants, Oracle, ScoreDist};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schema_ensemble::analysis::{
    analytic_success_probability, exact_bucket_probability, monte_carlo_success, SolvabilityModel,
};
use schema_ensemble::ensemble::{enumerate_sets, rank_plans, report, sweep, ReportContext};
use schema_ensemble::ingest::{Bucket, CandidateSchema, Granularity, SchemaLibrary};
use schema_ensemble::negatives::{manipulate, manipulate_at, ManipulationKind, MutexProvenance, MutexTable, Side, Target};
use schema_ensemble::pddl::{parse_action, parse_domain, print_condition, validate_schema};
use schema_ensemble::pipeline::{negatives_stage, run_pipeline, PipelineConfig};
use schema_ensemble::planner::{ground, relaxed_reachable, search_plan, validate_plan, Plan, SearchLimits, SearchOutcome};
use schema_ensemble::semantic::{calibrate, CalibrationMode, CalibrationRecord, CalibrationSet};

const CAP: usize = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn reference_library(name: &str) -> SchemaLibrary {
    let (d, _) = fixture(name);
    SchemaLibrary {
        domain: d.name.clone(),
        buckets: d
            .actions
            .iter()
            .enumerate()
            .map(|(i, a)| Bucket {
                action: a.name.clone(),
                candidates: vec![CandidateSchema::from_schema(a.clone(), i as u32 + 1, 1)],
            })
            .collect(),
    }
}

fn sussman() -> Outcome {
    let (d, p) = fixture("libraryworld");
    let lib = reference_library("libraryworld");
    let t = Instant::now();
    let results = sweep(&lib, &d, &p, &SearchLimits::default(), 1).unwrap();
    let ranked = rank_plans(&results);
    let secs = t.elapsed().as_secs_f64();
    let Some(top) = ranked.first() else {
        return outcome(false, "no plan");
    };
    let plan = Plan::from_text(&top.plan).unwrap();
    let first_stack = plan.steps.iter().position(|s| s.action == "place-on-shelf");
    let unstack = plan.steps.iter().position(|s| s.action == "remove-from-shelf" && s.args == ["book3", "book1"]);
    let order_ok = matches!((unstack, first_stack), (Some(u), Some(s)) if u < s);
    let valid = validate_plan(&ground(&d, &p).unwrap(), &plan);
    outcome(
        plan.len() == 5 && order_ok && valid && secs < 1.0,
        format!("length {} (want 5), unstack-first {order_ok}, valid {valid}, {secs:.3}s (< 1s)", plan.len()),
    )
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let tasks = generated_tasks(24, 11);
    let mut agree = 0;
    let mut too_big = 0;
    for (_, d, p) in &tasks {
        let expect = oracle(d, p, CAP);
        let got = search_plan(&ground(d, p).unwrap(), &SearchLimits::default());
        match (&expect, &got) {
            (Oracle::Solvable(n), SearchOutcome::Plan(plan)) if plan.len() == *n => agree += 1,
            (Oracle::Unsolvable, SearchOutcome::Unsolvable) => agree += 1,
            (Oracle::TooBig, _) => too_big += 1,
            _ => {}
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(
        agree == tasks.len() && too_big == 0 && tasks.len() >= 20 && secs < 60.0,
        format!("{agree}/{} tasks agree (want 100%), {too_big} over the state cap, {secs:.1}s (< 60s)", tasks.len()),
    )
}

/// `count` fixture domains with roughly half their actions replaced by a
/// seeded single-literal corruption.
fn corrupted_sets(count: usize) -> Vec<(schema_ensemble::pddl::Domain, schema_ensemble::pddl::ProblemInstance)> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let name = common::DOMAINS[seed as usize % 3];
        seed += 1;
        let (d, p) = fixture(name);
        let m = MutexTable::load(&common::fixtures().join("domains").join(name).join("mutexes.json")).unwrap();
        let acts: Vec<_> = d
            .actions
            .iter()
            .map(|a| {
                if rng.random_bool(0.5) {
                    let kind = ManipulationKind::ALL[rng.random_range(0..4)];
                    manipulate(a, kind, rng.random(), &m, &d).unwrap_or_else(|_| a.clone())
                } else {
                    a.clone()
                }
            })
            .collect();
        if acts == d.actions {
            continue;
        }
        out.push((d.with_actions(acts), p));
    }
    out
}

fn relaxed_admissibility() -> Outcome {
    let mut cases: Vec<_> = generated_tasks(24, 11).into_iter().map(|(_, d, p)| (d, p)).collect();
    cases.extend(corrupted_sets(100));
    let mut pruned = 0;
    let mut violations = 0;
    for (d, p) in &cases {
        let Ok(task) = ground(d, p) else { continue };
        if !relaxed_reachable(&task) {
            pruned += 1;
            if !matches!(oracle(d, p, CAP), Oracle::Unsolvable) {
                violations += 1;
            }
        }
    }
    outcome(
        violations == 0,
        format!("{violations} violations over {} tasks ({pruned} relaxed-unreachable)", cases.len()),
    )
}

fn cp_coverage_check() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, dist) in ScoreDist::ALL.into_iter().enumerate() {
        let cov = cp_coverage(dist, 100, 1000, 1000, 0.2, CalibrationMode::CoverageCorrect, 100 + i as u64);
        let verb = cp_coverage(dist, 100, 1000, 1000, 0.2, CalibrationMode::PaperVerbatim, 100 + i as u64);
        pass &= cov >= 0.77;
        parts.push(format!("{dist:?} {cov:.4} (verbatim {verb:.4}, not gated)"));
    }
    outcome(pass, format!("{} (want >= 0.77)", parts.join(", ")))
}

fn quantile_hand_cases() -> Outcome {
    let records: Vec<CalibrationRecord> = [0.5, 0.6, 0.7, 0.8]
        .iter()
        .map(|&s| CalibrationRecord { description: String::new(), schema_pddl: String::new(), similarity: Some(s) })
        .collect();
    let q = |mode| {
        calibrate(&CalibrationSet { records: records.clone(), epsilon: 0.2, mode }, "p").unwrap().q_hat
    };
    let (v, c) = (q(CalibrationMode::PaperVerbatim), q(CalibrationMode::CoverageCorrect));
    outcome(v == 0.7 && c == 0.5, format!("verbatim {v} (want 0.7), coverage-correct {c} (want 0.5), exact"))
}

fn combination_laws() -> Outcome {
    let lim = SearchLimits::default();
    let ctx = ReportContext {
        domain: "random".into(),
        granularity: Granularity::Detailed,
        instances: 1,
        cp_applied: false,
        cp_threshold: None,
    };
    let mut count_ok = 0;
    let mut report_ok = 0;
    let mut swept = 0;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let name = common::DOMAINS[seed as usize % 3];
        let max = if name == "dungeon" { 2 } else { 3 };
        let (lib, d, p) = random_library(name, max, 0.15, &mut rng);
        let want: u128 = lib.viable_counts().iter().map(|&m| m as u128).product();
        match enumerate_sets(&lib) {
            Ok(it) => {
                if it.total() as u128 == want && it.count() as u128 == want {
                    count_ok += 1;
                }
            }
            Err(schema_ensemble::ensemble::EnsembleError::EmptyBucket(_)) if want == 0 => count_ok += 1,
            _ => {}
        }
        if want > 0 {
            swept += 1;
            let r = report(&sweep(&lib, &d, &p, &lim, 4).unwrap(), &ctx);
            if r.total_combinations as u128 == want
                && r.solved_combinations <= r.total_combinations
                && r.distinct_plans <= r.solved_combinations
            {
                report_ok += 1;
            }
        }
    }
    let mut pow_ok = true;
    for name in common::DOMAINS {
        let (d, _) = fixture(name);
        let m = MutexTable::load(&common::fixtures().join("domains").join(name).join("mutexes.json")).unwrap();
        let n = 2usize;
        let lib = SchemaLibrary {
            domain: d.name.clone(),
            buckets: (0..d.actions.len())
                .map(|i| {
                    let mut c = variants(&d, i, &m);
                    c.truncate(n);
                    Bucket { action: d.actions[i].name.clone(), candidates: c }
                })
                .collect(),
        };
        pow_ok &= enumerate_sets(&lib).unwrap().total() == (n as u64).pow(d.actions.len() as u32);
    }
    outcome(
        count_ok == 50 && report_ok == swept && pow_ok,
        format!("count = product on {count_ok}/50, N^M {pow_ok}, report laws on {report_ok}/{swept} sweeps"),
    )
}

fn manipulation_fidelity() -> Outcome {
    let d = parse_domain(
        "(define (domain toy) (:types obj)
           (:predicates (at ?x ?y - obj) (clear ?x - obj) (on ?x ?y - obj) (on-table ?x - obj) (holding ?x - obj)))",
    )
    .unwrap();
    let none = MutexTable::empty(MutexProvenance::Config);
    let hold = MutexTable::from_pairs([("on-table", "holding")], MutexProvenance::Config).unwrap();
    let act = |s: &str| parse_action(s).unwrap();
    let swap = manipulate_at(
        &act("(:action m :parameters (?x ?y ?z - obj) :precondition (at ?x ?y) :effect (not (at ?x ?z)))"),
        ManipulationKind::Swap,
        Target::Swap { pre: 0, eff: 0 },
        &none,
        &d,
    )
    .unwrap();
    let neg = manipulate_at(
        &act("(:action m :parameters (?x - obj) :precondition (clear ?x) :effect (holding ?x))"),
        ManipulationKind::Negation,
        Target::At(Side::Pre, 0),
        &none,
        &d,
    )
    .unwrap();
    let rem = manipulate_at(
        &act("(:action m :parameters (?x ?y - obj) :precondition (and (on ?x ?y) (clear ?x)) :effect (holding ?x))"),
        ManipulationKind::Removal,
        Target::At(Side::Pre, 1),
        &none,
        &d,
    )
    .unwrap();
    let add = manipulate_at(
        &act("(:action m :parameters (?x - obj) :precondition (holding ?x) :effect (on-table ?x))"),
        ManipulationKind::Addition,
        Target::At(Side::Eff, 0),
        &hold,
        &d,
    )
    .unwrap();
    let table = [
        (print_condition(&swap.preconditions), "(not (at ?x ?z))"),
        (print_condition(&swap.effects), "(at ?x ?y)"),
        (print_condition(&neg.preconditions), "(not (clear ?x))"),
        (print_condition(&rem.preconditions), "(on ?x ?y)"),
        (print_condition(&add.effects), "(and (on-table ?x) (holding ?x))"),
    ];
    let exact = table.iter().filter(|(got, want)| got == want).count();
    let done = seeded_manipulations(1000);
    let well_formed = done.iter().filter(|(_, bad, d)| validate_schema(bad, d).is_empty()).count();
    let changed = done.iter().filter(|(a, bad, _)| a.canonical_text() != bad.canonical_text()).count();
    outcome(
        exact == table.len() && done.len() == 1000 && well_formed == 1000 && changed == 1000,
        format!(
            "worked examples {exact}/{} byte-exact, seeded: {well_formed}/{} well-formed, {changed}/{} changed",
            table.len(),
            done.len(),
            done.len()
        ),
    )
}

fn success_probability() -> Outcome {
    let headline = SolvabilityModel::new(0.05, 5, 25).with_exponent(5f64.powi(10));
    let analytic = analytic_success_probability(&headline).unwrap();
    let analytic_ok = (analytic * 100.0 - 95.2).abs() <= 0.1;

    let mut mc_ok = true;
    let mut worst = 0.0f64;
    for (p, m, n) in [(0.3, 3, 5), (0.1, 2, 10), (0.05, 5, 10)] {
        let model = SolvabilityModel::new(p, m, n);
        let exact = exact_bucket_probability(&model).unwrap();
        let est = monte_carlo_success(&model, 100_000, 17).unwrap();
        let z = (est.estimate - exact).abs() / est.stderr.max(1e-12);
        worst = worst.max(z);
        mc_ok &= z <= 3.0;
    }

    let mut grid_ok = true;
    for p in [0.05, 0.1, 0.3] {
        for m in [2, 3, 5] {
            for n in [2, 5, 10] {
                let model = SolvabilityModel::new(p, m, n);
                grid_ok &= analytic_success_probability(&model).unwrap() + 1e-12 >= exact_bucket_probability(&model).unwrap();
            }
        }
    }
    outcome(
        analytic_ok && mc_ok && grid_ok,
        format!(
            "analytic {:.3}% (want 95.2 +/- 0.1), Monte Carlo worst |z| {worst:.2} (want <= 3), closed form >= bucket on grid {grid_ok}",
            analytic * 100.0
        ),
    )
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file() && p.file_name().unwrap() != "run_metadata.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

fn determinism() -> (Outcome, String) {
    let run = |extra: &[&str]| {
        let tmp = tempfile::tempdir().unwrap();
        let mut args = vec!["--paths.output_dir".to_string(), tmp.path().display().to_string()];
        args.extend(extra.iter().map(|s| s.to_string()));
        let cfg = PipelineConfig::load(&common::config_path("libraryworld-detailed"), &args).unwrap();
        let out = run_pipeline(&cfg).unwrap();
        negatives_stage(&cfg).unwrap();
        (snapshot(tmp.path()), out.report)
    };
    let (a, with_cp) = run(&[]);
    let (b, _) = run(&[]);
    let (_, without_cp) = run(&["--cp.enabled", "false"]);
    let differing: Vec<&str> = a.iter().zip(&b).filter(|(x, y)| x != y).map(|(x, _)| x.0.as_str()).collect();
    let same = a.len() == b.len() && differing.is_empty();
    let ratio = |r: &schema_ensemble::ensemble::SweepReport| r.solved_combinations as f64 / r.total_combinations.max(1) as f64;
    let info = format!(
        "libraryworld detailed solved ratio: {}/{} = {:.3} with the threshold, {}/{} = {:.3} without",
        with_cp.solved_combinations,
        with_cp.total_combinations,
        ratio(&with_cp),
        without_cp.solved_combinations,
        without_cp.total_combinations,
        ratio(&without_cp)
    );
    (
        outcome(same, format!("{} artifacts compared, differing: {differing:?}", a.len())),
        info,
    )
}

fn main() {
    // `cargo test` passes harness flags such as --list; honour a listing
    // request and otherwise run everything.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let mut failed = 0;
    let mut line = |name: &str, o: Outcome| {
        if !o.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    };
    line("sussman-anomaly", sussman());
    line("planner-oracle-equivalence", oracle_equivalence());
    line("relaxed-reachability-admissibility", relaxed_admissibility());
    line("cp-coverage", cp_coverage_check());
    line("quantile-hand-cases", quantile_hand_cases());
    line("combination-laws", combination_laws());
    line("manipulation-fidelity", manipulation_fidelity());
    line("success-probability-analysis", success_probability());
    let (det, info) = determinism();
    line("pipeline-determinism", det);
    println!("INFO filter-ratio: {info}");
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
