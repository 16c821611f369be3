//! Shared helpers: fixture loading, an independent brute-force planner, a
//! random task generator and a minimal HTTP stub.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schema_ensemble::ingest::{Bucket, CandidateSchema, SchemaLibrary};
use schema_ensemble::negatives::{eligible_edits, ManipulationKind, MutexTable};
use schema_ensemble::pddl::{parse_domain, parse_problem, Domain, Literal, ProblemInstance, Term, TypedName};
use serde_json::Value;

pub const DOMAINS: [&str; 3] = ["libraryworld", "dungeon", "minecraft"];

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

pub fn fixture(name: &str) -> (Domain, ProblemInstance) {
    let dir = fixtures().join("domains").join(name);
    (
        parse_domain(&std::fs::read_to_string(dir.join("domain.pddl")).unwrap()).unwrap(),
        parse_problem(&std::fs::read_to_string(dir.join("problem.pddl")).unwrap()).unwrap(),
    )
}

pub fn config_path(tag: &str) -> PathBuf {
    fixtures().join("configs").join(format!("{tag}.json"))
}

// ---- brute-force oracle over sets of atom strings ----

pub type State = BTreeSet<String>;

struct Step {
    pre_pos: Vec<String>,
    pre_neg: Vec<String>,
    add: Vec<String>,
    del: Vec<String>,
}

fn atom(l: &Literal, bind: &HashMap<&str, &str>) -> Option<String> {
    let mut s = format!("({}", l.predicate);
    for t in &l.args {
        let v = match t {
            Term::Var(v) => *bind.get(v.as_str())?,
            Term::Const(c) => c.as_str(),
        };
        s.push(' ');
        s.push_str(&v.to_lowercase());
    }
    s.push(')');
    Some(s)
}

fn objects(d: &Domain, p: &ProblemInstance) -> Vec<TypedName> {
    d.constants.iter().chain(&p.objects).cloned().collect()
}

fn steps(d: &Domain, p: &ProblemInstance) -> Option<Vec<Step>> {
    let objs = objects(d, p);
    let mut out = Vec::new();
    for a in &d.actions {
        let pools: Vec<Vec<&str>> = a
            .parameters
            .iter()
            .map(|par| {
                objs.iter()
                    .filter(|o| par.ty == "object" || o.ty == par.ty)
                    .map(|o| o.name.as_str())
                    .collect()
            })
            .collect();
        let total: usize = pools.iter().map(Vec::len).product();
        for n in 0..total {
            let mut rest = n;
            let mut pick = vec![""; pools.len()];
            for k in (0..pools.len()).rev() {
                pick[k] = pools[k][rest % pools[k].len()];
                rest /= pools[k].len();
            }
            let bind: HashMap<&str, &str> =
                a.parameters.iter().zip(&pick).map(|(par, o)| (par.name.as_str(), *o)).collect();
            let grab = |ls: &[Literal], neg: bool| -> Option<Vec<String>> {
                ls.iter().filter(|l| l.negated == neg).map(|l| atom(l, &bind)).collect()
            };
            out.push(Step {
                pre_pos: grab(&a.preconditions, false)?,
                pre_neg: grab(&a.preconditions, true)?,
                add: grab(&a.effects, false)?,
                del: grab(&a.effects, true)?,
            });
        }
    }
    Some(out)
}

fn successors<'a>(s: &'a State, steps: &'a [Step]) -> impl Iterator<Item = State> + 'a {
    steps.iter().filter_map(move |st| {
        if st.pre_pos.iter().all(|a| s.contains(a)) && st.pre_neg.iter().all(|a| !s.contains(a)) {
            let mut n = s.clone();
            for d in &st.del {
                n.remove(d);
            }
            for a in &st.add {
                n.insert(a.clone());
            }
            Some(n)
        } else {
            None
        }
    })
}

pub fn init_state(p: &ProblemInstance) -> State {
    p.init.iter().map(|a| a.to_string().to_lowercase()).collect()
}

#[derive(Debug, PartialEq, Eq)]
pub enum Oracle {
    /// Optimal plan length.
    Solvable(usize),
    Unsolvable,
    /// More than the state cap was reachable.
    TooBig,
}

/// Exhaustive breadth-first search from `init`.
pub fn oracle(d: &Domain, p: &ProblemInstance, cap: usize) -> Oracle {
    let Some(steps) = steps(d, p) else {
        return Oracle::Unsolvable;
    };
    let goal_pos: Vec<String> = p.goal.iter().filter(|g| !g.negated).map(|g| g.atom.to_string().to_lowercase()).collect();
    let goal_neg: Vec<String> = p.goal.iter().filter(|g| g.negated).map(|g| g.atom.to_string().to_lowercase()).collect();
    let is_goal = |s: &State| goal_pos.iter().all(|a| s.contains(a)) && goal_neg.iter().all(|a| !s.contains(a));
    let start = init_state(p);
    let mut seen: HashSet<State> = HashSet::from([start.clone()]);
    let mut q = VecDeque::from([(start, 0usize)]);
    while let Some((s, depth)) = q.pop_front() {
        if is_goal(&s) {
            return Oracle::Solvable(depth);
        }
        for n in successors(&s, &steps) {
            if seen.insert(n.clone()) {
                if seen.len() > cap {
                    return Oracle::TooBig;
                }
                q.push_back((n, depth + 1));
            }
        }
    }
    Oracle::Unsolvable
}

/// Random reachable state `walk` steps from the fixture init.
fn random_walk(d: &Domain, p: &ProblemInstance, walk: usize, rng: &mut ChaCha8Rng) -> State {
    let steps = steps(d, p).unwrap();
    let mut s = init_state(p);
    for _ in 0..walk {
        let next: Vec<State> = successors(&s, &steps).collect();
        match next.choose(rng) {
            Some(n) => s = n.clone(),
            None => break,
        }
    }
    s
}

/// Small task variants of the fixture problems: the init is a random walk
/// from the fixture init and the goal is a few atoms that are either taken
/// from a second walk (usually solvable) or drawn at random (often not).
pub fn generated_tasks(count: usize, seed: u64) -> Vec<(String, Domain, ProblemInstance)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for i in 0..count {
        let name = DOMAINS[i % DOMAINS.len()];
        let (d, base) = fixture(name);
        let init = random_walk(&d, &base, rng.random_range(0..4), &mut rng);
        let init_text: String = init.iter().map(|a| format!(" {a}")).collect();
        let mut p = parse_problem(&problem_text(&d, &base, &init_text, "")).unwrap();
        let source: Vec<String> = if rng.random_bool(0.7) {
            random_walk(&d, &p, rng.random_range(1..6), &mut rng).into_iter().collect()
        } else {
            all_atoms(&d, &p)
        };
        let k = rng.random_range(1..=2.min(source.len()));
        let goal: Vec<&String> = source.choose_multiple(&mut rng, k).collect();
        let goal_text: String = goal.iter().map(|a| format!(" {a}")).collect();
        p = parse_problem(&problem_text(&d, &base, &init_text, &goal_text)).unwrap();
        out.push((format!("{name}#{i}"), d, p));
    }
    out
}

fn problem_text(d: &Domain, p: &ProblemInstance, init: &str, goal: &str) -> String {
    let objs: String = p.objects.iter().map(|o| format!(" {} - {}", o.name, o.ty)).collect();
    format!(
        "(define (problem gen) (:domain {}) (:objects{objs}) (:init{init}) (:goal (and{goal})))",
        d.name
    )
}

fn all_atoms(d: &Domain, p: &ProblemInstance) -> Vec<String> {
    let objs = objects(d, p);
    let mut out = Vec::new();
    for pr in &d.predicates {
        let pools: Vec<Vec<&str>> = pr
            .parameters
            .iter()
            .map(|par| {
                objs.iter()
                    .filter(|o| par.ty == "object" || o.ty == par.ty)
                    .map(|o| o.name.as_str())
                    .collect()
            })
            .collect();
        let mut acc: Vec<Vec<&str>> = vec![vec![]];
        for pool in &pools {
            acc = acc
                .into_iter()
                .flat_map(|pre| pool.iter().map(move |o| [pre.clone(), vec![*o]].concat()))
                .collect();
        }
        for args in acc {
            let mut s = format!("({}", pr.name);
            for a in args {
                s.push(' ');
                s.push_str(&a.to_lowercase());
            }
            s.push(')');
            out.push(s);
        }
    }
    out
}

// ---- HTTP stub ----

pub type Handler = dyn Fn(&str, &Value) -> (u16, Value) + Send + Sync;

/// Serves `handler` on an ephemeral port until the process exits. Returns the
/// base URL, e.g. `http://127.0.0.1:41234`.
pub fn serve(handler: Arc<Handler>) -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { continue };
            let handler = handler.clone();
            std::thread::spawn(move || {
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut line = String::new();
                if reader.read_line(&mut line).is_err() {
                    return;
                }
                let path = line.split_whitespace().nth(1).unwrap_or("/").to_string();
                let mut len = 0usize;
                loop {
                    let mut h = String::new();
                    if reader.read_line(&mut h).unwrap_or(0) == 0 || h.trim().is_empty() {
                        break;
                    }
                    if let Some((k, v)) = h.split_once(':') {
                        if k.eq_ignore_ascii_case("content-length") {
                            len = v.trim().parse().unwrap_or(0);
                        }
                    }
                }
                let mut body = vec![0u8; len];
                let _ = reader.read_exact(&mut body);
                let req: Value = serde_json::from_slice(&body).unwrap_or(Value::Null);
                let (status, reply) = handler(&path, &req);
                let text = reply.to_string();
                let _ = write!(
                    stream,
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{text}",
                    text.len()
                );
            });
        }
    });
    format!("http://{addr}")
}

// ---- conformal coverage ----

#[derive(Clone, Copy, Debug)]
pub enum ScoreDist {
    Uniform,
    Beta52,
    Bimodal,
}

impl ScoreDist {
    pub const ALL: [ScoreDist; 3] = [ScoreDist::Uniform, ScoreDist::Beta52, ScoreDist::Bimodal];

    /// One true-pair similarity in [−1, 1].
    pub fn draw(self, rng: &mut ChaCha8Rng) -> f64 {
        use rand_distr::{Beta, Distribution, Normal};
        match self {
            ScoreDist::Uniform => rng.random_range(-1.0..=1.0),
            ScoreDist::Beta52 => Beta::new(5.0, 2.0).unwrap().sample(rng),
            ScoreDist::Bimodal => {
                let mu: f64 = if rng.random_bool(0.5) { 0.2 } else { 0.8 };
                Normal::new(mu, 0.08).unwrap().sample(rng).clamp(-1.0, 1.0)
            }
        }
    }
}

/// Mean fraction of fresh true pairs kept (similarity ≥ q̂) over
/// `resamples` independent calibration draws of size `n`.
pub fn cp_coverage(
    dist: ScoreDist,
    n: usize,
    eval: usize,
    resamples: usize,
    epsilon: f64,
    mode: schema_ensemble::semantic::CalibrationMode,
    seed: u64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..resamples {
        let cal: Vec<f64> = (0..n).map(|_| dist.draw(&mut rng)).collect();
        let q = schema_ensemble::semantic::quantile_threshold(&cal, epsilon, mode).unwrap();
        let kept = (0..eval).filter(|_| dist.draw(&mut rng) >= q).count();
        total += kept as f64 / eval as f64;
    }
    total / resamples as f64
}

// ---- random schema libraries ----

/// Reference schema plus all of its distinct well-formed single-literal
/// corruptions, as candidates for one action.
pub fn variants(d: &Domain, action: usize, mutexes: &MutexTable) -> Vec<CandidateSchema> {
    let a = &d.actions[action];
    let mut out = vec![a.clone()];
    for kind in ManipulationKind::ALL {
        for v in eligible_edits(a, kind, mutexes, d) {
            if !out.contains(&v) {
                out.push(v);
            }
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(i, s)| CandidateSchema::from_schema(s, action as u32 + 1, i as u32 + 1))
        .collect()
}

/// A library over fixture `name` with up to `max` candidates per bucket, a
/// random similarity on each, and each candidate independently made
/// unselectable with probability `drop`.
pub fn random_library(name: &str, max: usize, drop: f64, rng: &mut ChaCha8Rng) -> (SchemaLibrary, Domain, ProblemInstance) {
    let (d, p) = fixture(name);
    let mutexes = MutexTable::load(&fixtures().join("domains").join(name).join("mutexes.json")).unwrap();
    let buckets = (0..d.actions.len())
        .map(|i| {
            let mut pool = variants(&d, i, &mutexes);
            let k = rng.random_range(1..=max.min(pool.len()));
            pool.truncate(k);
            for c in &mut pool {
                c.similarity = Some(rng.random_range(-1.0..=1.0));
                if rng.random_bool(drop) {
                    if rng.random_bool(0.5) {
                        c.filtered_out = true;
                    } else {
                        c.viable = false;
                    }
                }
            }
            Bucket { action: d.actions[i].name.clone(), candidates: pool }
        })
        .collect();
    (SchemaLibrary { domain: d.name.clone(), buckets }, d, p)
}

/// The first `count` seeded manipulations that fire over the fixture test
/// and training schemas, as (original, corrupted, domain).
pub fn seeded_manipulations(count: usize) -> Vec<(schema_ensemble::pddl::ActionSchema, schema_ensemble::pddl::ActionSchema, Domain)> {
    let mut pool = Vec::new();
    for name in DOMAINS {
        let dir = fixtures().join("domains").join(name);
        pool.push((fixture(name).0, MutexTable::load(&dir.join("mutexes.json")).unwrap()));
    }
    for t in ["newspapers", "blocksworld", "gripper", "ferry", "logistics"] {
        let dir = fixtures().join("training").join(t);
        let d = parse_domain(&std::fs::read_to_string(dir.join("domain.pddl")).unwrap()).unwrap();
        pool.push((d, MutexTable::load(&dir.join("mutexes.json")).unwrap()));
    }
    let mut out = Vec::new();
    for seed in 0.. {
        if out.len() == count {
            break;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, m) = &pool[rng.random_range(0..pool.len())];
        let a = &d.actions[rng.random_range(0..d.actions.len())];
        let kind = ManipulationKind::ALL[rng.random_range(0..4)];
        if let Ok(bad) = schema_ensemble::negatives::manipulate(a, kind, seed, m, d) {
            out.push((a.clone(), bad, d.clone()));
        }
    }
    out
}
