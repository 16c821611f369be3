use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{enumerate_sets, EnsembleError, SchemaSet};
use crate::ingest::SchemaLibrary;
use crate::pddl::{Domain, ProblemInstance};
use crate::planner::{check_solvable, Plan, SearchLimits, Solvability};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepStatus {
    Solvable,
    Unsolvable,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub set_id: u64,
    pub status: SweepStatus,
    pub plan: Option<Plan>,
    pub similarities: Vec<f64>,
    pub rank_sum: f64,
    pub rank_mean: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

const CHUNK: usize = 2048;

fn run_one(set: &SchemaSet<'_>, reference: &Domain, p: &ProblemInstance, lim: &SearchLimits) -> SweepResult {
    let similarities = set.similarities();
    let rank_sum: f64 = similarities.iter().sum();
    let rank_mean = if similarities.is_empty() {
        0.0
    } else {
        rank_sum / similarities.len() as f64
    };
    let (status, plan, diagnostic) = match check_solvable(&set.domain(reference), p, lim) {
        Solvability::Solvable(plan) => (SweepStatus::Solvable, Some(plan), None),
        Solvability::Unsolvable => (SweepStatus::Unsolvable, None, None),
        Solvability::Unknown(why) => (SweepStatus::Unknown, None, Some(why)),
    };
    SweepResult {
        set_id: set.set_id,
        status,
        plan,
        similarities,
        rank_sum,
        rank_mean,
        diagnostic,
    }
}

/// Checks every set on a pool of `parallelism` workers. Results come back in
/// input order whatever order the workers finish in.
pub fn sweep_sets<'a>(
    sets: impl Iterator<Item = SchemaSet<'a>>,
    reference: &Domain,
    p: &ProblemInstance,
    lim: &SearchLimits,
    parallelism: usize,
) -> Result<Vec<SweepResult>, EnsembleError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| EnsembleError::Pool(e.to_string()))?;
    let mut out = Vec::new();
    let mut sets = sets.peekable();
    while sets.peek().is_some() {
        let chunk: Vec<SchemaSet<'a>> = sets.by_ref().take(CHUNK).collect();
        let done: Vec<SweepResult> = pool.install(|| chunk.par_iter().map(|s| run_one(s, reference, p, lim)).collect());
        out.extend(done);
    }
    Ok(out)
}

pub fn sweep(
    lib: &SchemaLibrary,
    reference: &Domain,
    p: &ProblemInstance,
    lim: &SearchLimits,
    parallelism: usize,
) -> Result<Vec<SweepResult>, EnsembleError> {
    sweep_sets(enumerate_sets(lib)?, reference, p, lim, parallelism)
}
