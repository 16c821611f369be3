//! Regenerates the bundled corpus under `fixtures/`: few-shot prompts, the
//! calibration set, synthesized LLM replies in replay stores, and one
//! pipeline config per (domain, granularity).
//!
//! No live model is involved. Each reply is the reference schema, optionally
//! corrupted (a seeded single-literal manipulation, an undeclared predicate
//! or a missing Effects section) and wrapped in one of several formatting
//! styles. Ambiguous descriptions get a higher corruption rate.
//!
//!     cargo run --example record_fixture_corpus

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schema_ensemble::ingest::{
    digest_hex, format_response, render_prompt, FewShotExample, Granularity, NaturalLanguageSpec,
    ReplayRecord, ReplayStore,
};
use schema_ensemble::negatives::{manipulate, ManipulationKind, MutexTable};
use schema_ensemble::pddl::{parse_domain, ActionSchema, Domain, Literal, Term};
use serde_json::json;

const INSTANCES: u32 = 10;
const TEST_DOMAINS: [&str; 3] = ["libraryworld", "dungeon", "minecraft"];
const TRAINING: [&str; 5] = ["newspapers", "blocksworld", "gripper", "ferry", "logistics"];

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn load(dir: &Path, g: Granularity) -> (Domain, NaturalLanguageSpec) {
    let d = parse_domain(&fs::read_to_string(dir.join("domain.pddl")).unwrap()).unwrap();
    let spec = NaturalLanguageSpec::load(&dir.join("nl.json"), &d, g).unwrap();
    (d, spec)
}

fn explanation(spec: &NaturalLanguageSpec, action: &str) -> String {
    format!(
        "The \"{action}\" action follows the description: {} The parameters name the objects involved, the preconditions state what must hold beforehand and the effects state what changes.",
        spec.description(action).unwrap_or_default().trim()
    )
}

fn few_shot() -> Vec<FewShotExample> {
    let (d, spec) = load(&fixtures().join("training/newspapers"), Granularity::Detailed);
    ["pick-up", "move"]
        .iter()
        .map(|&a| FewShotExample {
            human: render_prompt(&spec, a, &[]).unwrap().human_turn().to_string(),
            ai: format_response(d.action(a).unwrap(), &explanation(&spec, a)),
        })
        .collect()
}

fn rename_vars(a: &ActionSchema) -> ActionSchema {
    let fresh = |v: &str| format!("{v}-{}", v.len());
    let lit = |l: &Literal| Literal {
        args: l
            .args
            .iter()
            .map(|t| match t {
                Term::Var(v) => Term::Var(fresh(v)),
                c => c.clone(),
            })
            .collect(),
        ..l.clone()
    };
    ActionSchema {
        name: a.name.clone(),
        parameters: a
            .parameters
            .iter()
            .map(|p| schema_ensemble::pddl::TypedName::new(fresh(&p.name), p.ty.clone()))
            .collect(),
        preconditions: a.preconditions.iter().map(lit).collect(),
        effects: a.effects.iter().map(lit).collect(),
    }
}

/// One formatting style out of four, chosen by `style`.
fn dress(text: String, style: u32) -> String {
    match style {
        // bare headers, no fences
        1 => text
            .replace("**Response:**", "Response:")
            .replace("**Explanation:**", "Explanation:")
            .lines()
            .filter(|l| !l.starts_with("```"))
            .collect::<Vec<_>>()
            .join("\n"),
        // trailing chatter after a rule
        2 => format!("{text}\n---\nLet me know if the schema needs adjusting."),
        // pddl-tagged fences and snake_case predicate names
        3 => text.replace("```\n", "```pddl\n").replace("on-table", "on_table"),
        _ => text,
    }
}

fn synthesize(
    rng: &mut ChaCha8Rng,
    a: &ActionSchema,
    d: &Domain,
    mutexes: &MutexTable,
    spec: &NaturalLanguageSpec,
    corrupt_rate: f64,
) -> String {
    let mut schema = a.clone();
    let mut drop_effects = false;
    if rng.random_bool(corrupt_rate) {
        let roll: f64 = rng.random();
        if roll < 0.75 {
            let seed = rng.next_u64();
            let start = rng.random_range(0..ManipulationKind::ALL.len());
            if let Some(m) = (0..ManipulationKind::ALL.len())
                .map(|k| ManipulationKind::ALL[(start + k) % ManipulationKind::ALL.len()])
                .find_map(|k| manipulate(a, k, seed, mutexes, d).ok())
            {
                schema = m;
            }
        } else if roll < 0.9 {
            let var = a.parameters.first().map(|p| Term::Var(p.name.clone()));
            schema.preconditions.push(Literal::positive("ready", var.into_iter().collect()));
        } else {
            drop_effects = true;
        }
    } else if rng.random_bool(0.1) {
        schema = rename_vars(a);
    }
    let mut text = format_response(&schema, &explanation(spec, &a.name));
    if drop_effects {
        text = text.split("\nEffects:").next().unwrap_or_default().to_string();
    }
    dress(text, rng.random_range(0..4))
}

fn record(name: &str, g: Granularity, examples: &[FewShotExample]) -> PathBuf {
    let dir = fixtures().join("domains").join(name);
    let (d, spec) = load(&dir, g);
    let mutexes = MutexTable::load(&dir.join("mutexes.json")).unwrap();
    let store_dir = fixtures().join("replay").join(format!("{name}-{}", g.as_str()));
    if store_dir.exists() {
        fs::remove_dir_all(&store_dir).unwrap();
    }
    let store = ReplayStore::open(&store_dir).unwrap();
    let tag = digest_hex(format!("{name}/{}", g.as_str()).as_bytes());
    let mut rng = ChaCha8Rng::seed_from_u64(u64::from_str_radix(&tag[..16], 16).unwrap());
    let rate = match g {
        Granularity::Detailed => 0.25,
        Granularity::Ambiguous => 0.45,
    };
    for a in &d.actions {
        let prompt = render_prompt(&spec, &a.name, examples).unwrap();
        for i in 1..=INSTANCES {
            store
                .put(&ReplayRecord {
                    digest: ReplayStore::key(&prompt, i),
                    action: a.name.clone(),
                    instance: i,
                    response: synthesize(&mut rng, a, &d, &mutexes, &spec, rate),
                })
                .unwrap();
        }
    }
    store_dir
}

fn write_config(name: &str, g: Granularity) {
    let tag = format!("{name}-{}", g.as_str());
    let cfg = json!({
        "paths": {
            "domain": format!("../domains/{name}/domain.pddl"),
            "problem": format!("../domains/{name}/problem.pddl"),
            "nl_spec": format!("../domains/{name}/nl.json"),
            "few_shot": "../prompts/newspapers.json",
            "calibration": "../calibration.jsonl",
            "mutexes": format!("../domains/{name}/mutexes.json"),
            "training": TRAINING.iter().map(|t| format!("../training/{t}")).collect::<Vec<_>>(),
            "output_dir": format!("../../target/fixture-runs/{tag}"),
        },
        "granularity": g,
        "llm": { "instances": INSTANCES, "mode": "replay", "replay_store": format!("../replay/{tag}") },
        "cp": { "enabled": true, "epsilon": 0.2, "mode": "coverage-correct" },
        "parallelism": 4,
        "seed": 7,
    });
    let path = fixtures().join("configs").join(format!("{tag}.json"));
    fs::create_dir_all(path.parent().unwrap()).unwrap();
    fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap() + "\n").unwrap();
}

fn calibration() -> usize {
    let mut lines = Vec::new();
    for t in TRAINING {
        for g in [Granularity::Detailed, Granularity::Ambiguous] {
            let (d, spec) = load(&fixtures().join("training").join(t), g);
            for a in &d.actions {
                lines.push(
                    json!({ "description": spec.description(&a.name).unwrap(), "schema_pddl": a.canonical_text() })
                        .to_string(),
                );
            }
        }
    }
    fs::write(fixtures().join("calibration.jsonl"), lines.join("\n") + "\n").unwrap();
    lines.len()
}

fn main() {
    let examples = few_shot();
    let prompts = fixtures().join("prompts/newspapers.json");
    fs::create_dir_all(prompts.parent().unwrap()).unwrap();
    fs::write(&prompts, serde_json::to_string_pretty(&examples).unwrap() + "\n").unwrap();
    println!("few-shot examples: {}", examples.len());
    println!("calibration records: {}", calibration());
    for name in TEST_DOMAINS {
        for g in [Granularity::Detailed, Granularity::Ambiguous] {
            let dir = record(name, g, &examples);
            write_config(name, g);
            println!("{name}/{}: {} replies in {}", g.as_str(), fs::read_dir(&dir).unwrap().count(), dir.display());
        }
    }
}
