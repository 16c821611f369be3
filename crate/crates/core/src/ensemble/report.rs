use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{dedupe_plans, rank_plans, EnsembleError, SweepResult, SweepStatus};
use crate::ingest::Granularity;

pub const CSV_HEADERS: [&str; 9] = [
    "Domain Name",
    "Desc Granularity",
    "LLM instance #",
    "Total Combinations",
    "Solved Combinations",
    "Distinct Plan #",
    "Avg. Plan Length",
    "Applied CP Threshold",
    "CP Threshold Value",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportContext {
    pub domain: String,
    pub granularity: Granularity,
    pub instances: u32,
    pub cp_applied: bool,
    pub cp_threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub domain_name: String,
    pub granularity: Granularity,
    pub llm_instances: u32,
    pub total_combinations: u64,
    pub solved_combinations: u64,
    pub distinct_plans: u64,
    /// Mean length over distinct plans; none when nothing was solved.
    pub avg_plan_length: Option<f64>,
    pub applied_cp_threshold: bool,
    pub cp_threshold_value: Option<f64>,
}

pub fn report(results: &[SweepResult], ctx: &ReportContext) -> SweepReport {
    let groups = dedupe_plans(&rank_plans(results));
    let avg = (!groups.is_empty())
        .then(|| groups.iter().map(|g| g.length as f64).sum::<f64>() / groups.len() as f64);
    SweepReport {
        domain_name: ctx.domain.clone(),
        granularity: ctx.granularity,
        llm_instances: ctx.instances,
        total_combinations: results.len() as u64,
        solved_combinations: results.iter().filter(|r| r.status == SweepStatus::Solvable).count() as u64,
        distinct_plans: groups.len() as u64,
        avg_plan_length: avg,
        applied_cp_threshold: ctx.cp_applied,
        cp_threshold_value: if ctx.cp_applied { ctx.cp_threshold } else { None },
    }
}

/// Rounded half away from zero with trailing zeros dropped: 5.00 → "5",
/// 2.625 → "2.63".
fn trimmed(x: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    let x = (x * scale).round() / scale;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl SweepReport {
    pub fn csv_row(&self) -> [String; 9] {
        let na = || "N/A".to_string();
        let solved = self.solved_combinations > 0;
        [
            self.domain_name.clone(),
            self.granularity.as_str().to_string(),
            self.llm_instances.to_string(),
            self.total_combinations.to_string(),
            self.solved_combinations.to_string(),
            if solved { self.distinct_plans.to_string() } else { na() },
            self.avg_plan_length.filter(|_| solved).map_or_else(na, |a| trimmed(a, 2)),
            if self.applied_cp_threshold { "True" } else { "False" }.to_string(),
            self.cp_threshold_value.map_or_else(na, |q| trimmed(q, 3)),
        ]
    }
}

pub fn write_report_csv(path: &Path, rows: &[SweepReport]) -> Result<(), EnsembleError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_HEADERS)?;
    for r in rows {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}
