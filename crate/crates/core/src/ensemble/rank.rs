use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EnsembleError, SweepResult, SweepStatus};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedPlan {
    /// 1-based.
    pub rank: usize,
    pub set_id: u64,
    pub rank_sum: f64,
    pub rank_mean: f64,
    pub plan: String,
    #[serde(skip)]
    pub length: usize,
}

fn order(a: &RankedPlan, b: &RankedPlan) -> Ordering {
    b.rank_sum
        .total_cmp(&a.rank_sum)
        .then(a.length.cmp(&b.length))
        .then_with(|| a.plan.cmp(&b.plan))
        .then(a.set_id.cmp(&b.set_id))
}

/// Solvable results, best first: higher rank-sum, then shorter plan, then
/// plan text, then set id.
pub fn rank_plans(results: &[SweepResult]) -> Vec<RankedPlan> {
    let mut ranked: Vec<RankedPlan> = results
        .iter()
        .filter(|r| r.status == SweepStatus::Solvable)
        .filter_map(|r| {
            let plan = r.plan.as_ref()?;
            Some(RankedPlan {
                rank: 0,
                set_id: r.set_id,
                rank_sum: r.rank_sum,
                rank_mean: r.rank_mean,
                plan: plan.to_text(),
                length: plan.len(),
            })
        })
        .collect();
    ranked.sort_by(order);
    for (i, r) in ranked.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    ranked
}

/// Ranked plans grouped by plan text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanGroup {
    pub plan: String,
    pub length: usize,
    /// Highest-ranked set producing this plan.
    pub best: RankedPlan,
    pub set_ids: Vec<u64>,
}

/// Groups in order of their best member's rank.
pub fn dedupe_plans(ranked: &[RankedPlan]) -> Vec<PlanGroup> {
    let mut groups: Vec<PlanGroup> = Vec::new();
    let mut at: HashMap<&str, usize> = HashMap::new();
    for r in ranked {
        match at.get(r.plan.as_str()) {
            Some(&g) => groups[g].set_ids.push(r.set_id),
            None => {
                at.insert(&r.plan, groups.len());
                groups.push(PlanGroup {
                    plan: r.plan.clone(),
                    length: r.length,
                    best: r.clone(),
                    set_ids: vec![r.set_id],
                });
            }
        }
    }
    groups
}

#[derive(Serialize)]
struct Line<'a> {
    #[serde(flatten)]
    plan: &'a RankedPlan,
    config_digest: &'a str,
}

pub fn write_ranked(path: &Path, ranked: &[RankedPlan], config_digest: &str) -> Result<(), EnsembleError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for r in ranked {
        serde_json::to_writer(&mut w, &Line {
            plan: r,
            config_digest,
        })?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}
