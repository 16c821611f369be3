//! Grounding, delete-relaxed reachability, forward search and plan
//! validation over the STRIPS subset.
//!
//! States are bitsets over a lexicographically ordered atom universe, so every
//! search result is reproducible byte for byte.

mod ground;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{Domain, GroundAtom, ProblemInstance};

pub use ground::{ground, ground_with_stats, GroundingStats, DEFAULT_GROUNDING_BOUND};
pub use search::{relaxed_reachable, search_plan, validate_plan, SearchOutcome};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("undeclared type `{0}`")]
    UnknownType(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("arity mismatch in `{0}`")]
    Arity(String),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("grounding exceeds {bound} instantiations")]
    GroundingBound { bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundAction {
    pub name: String,
    pub args: Vec<String>,
    pub pre_pos: Vec<u32>,
    pub pre_neg: Vec<u32>,
    pub add: Vec<u32>,
    pub del: Vec<u32>,
}

impl GroundAction {
    pub fn step(&self) -> PlanStep {
        PlanStep {
            action: self.name.clone(),
            args: self.args.clone(),
        }
    }
}

/// A grounded task. Atom ids index `atoms`, which is sorted by printed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTask {
    pub atoms: Vec<GroundAtom>,
    pub init: Vec<u32>,
    pub goal_pos: Vec<u32>,
    pub goal_neg: Vec<u32>,
    pub actions: Vec<GroundAction>,
}

impl GroundTask {
    pub fn find_action(&self, step: &PlanStep) -> Option<&GroundAction> {
        self.actions
            .iter()
            .find(|a| a.name == step.action && a.args == step.args)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Bfs,
    GbfsHadd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchLimits {
    pub max_expanded_states: usize,
    pub max_plan_length: usize,
    pub strategy: Strategy,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_expanded_states: 200_000,
            max_plan_length: 64,
            strategy: Strategy::Bfs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlanStep {
    pub action: String,
    pub args: Vec<String>,
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.action)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
}

impl Plan {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// One `(action obj ...)` per line, lowercased with single spaces.
    pub fn to_text(&self) -> String {
        self.steps
            .iter()
            .map(|s| s.to_string().to_lowercase())
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn from_text(text: &str) -> Option<Plan> {
        let mut steps = Vec::new();
        for line in text.lines() {
            let line = line.split(';').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let inner = line.strip_prefix('(')?.strip_suffix(')')?;
            let mut toks = inner.split_whitespace().map(str::to_lowercase);
            let action = toks.next()?;
            steps.push(PlanStep {
                action,
                args: toks.collect(),
            });
        }
        Some(Plan { steps })
    }

    pub fn to_json(&self, valid: bool) -> serde_json::Value {
        serde_json::json!({
            "steps": self.steps,
            "length": self.len(),
            "valid": valid,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Solvability {
    Solvable(Plan),
    Unsolvable,
    /// Limits were hit or the set could not be grounded.
    Unknown(String),
}

/// Two-stage check: relaxed reachability first, then complete search.
pub fn check_solvable(d: &Domain, p: &ProblemInstance, lim: &SearchLimits) -> Solvability {
    let task = match ground(d, p) {
        Ok(t) => t,
        Err(e) => return Solvability::Unknown(e.to_string()),
    };
    if !relaxed_reachable(&task) {
        return Solvability::Unsolvable;
    }
    match search_plan(&task, lim) {
        SearchOutcome::Plan(plan) => Solvability::Solvable(plan),
        SearchOutcome::Unsolvable => Solvability::Unsolvable,
        SearchOutcome::ResourcesExhausted => Solvability::Unknown("RESOURCES_EXHAUSTED".into()),
    }
}
