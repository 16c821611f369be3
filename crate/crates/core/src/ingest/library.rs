use std::collections::HashSet;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{parse_llm_response, IngestError};
use crate::pddl::{parse_action, validate_schema, ActionSchema, Diagnostic, Domain};

/// One generated schema α̂_ij with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateSchema {
    pub action: String,
    /// 1-based LLM instance i.
    pub instance: u32,
    /// 1-based position j of the action in the reference domain.
    pub action_index: u32,
    pub raw_response: String,
    /// Canonical schema text; empty when the response could not be parsed.
    pub schema_pddl: String,
    /// Passed validation against the reference predicates.
    pub viable: bool,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default)]
    pub similarity: Option<f64>,
    /// Removed by the conformal threshold.
    #[serde(default)]
    pub filtered_out: bool,
    #[serde(skip)]
    pub schema: Option<ActionSchema>,
}

impl CandidateSchema {
    /// Parses `raw` and validates the result against `reference`.
    pub fn from_response(
        action: &str,
        instance: u32,
        raw: &str,
        reference: &Domain,
    ) -> Result<Self, IngestError> {
        let action_index = reference
            .actions
            .iter()
            .position(|a| a.name == action)
            .ok_or_else(|| IngestError::UnknownAction(action.to_string()))?
            as u32
            + 1;
        let declared: Vec<String> = reference.predicates.iter().map(|p| p.name.clone()).collect();
        let mut c = CandidateSchema {
            action: action.to_string(),
            instance,
            action_index,
            raw_response: raw.to_string(),
            schema_pddl: String::new(),
            viable: false,
            diagnostics: Vec::new(),
            similarity: None,
            filtered_out: false,
            schema: None,
        };
        match parse_llm_response(raw, action, &declared) {
            Ok(schema) => {
                c.diagnostics = validate_schema(&schema, reference);
                c.viable = c.diagnostics.is_empty();
                c.schema_pddl = schema.canonical_text();
                c.schema = Some(schema);
            }
            Err(e) => c.diagnostics = vec![Diagnostic::parse_failure(e.to_string())],
        }
        Ok(c)
    }

    /// Wraps a known schema, e.g. a reference action, as an instance-1 candidate.
    pub fn from_schema(schema: ActionSchema, action_index: u32, instance: u32) -> Self {
        CandidateSchema {
            action: schema.name.clone(),
            instance,
            action_index,
            raw_response: String::new(),
            schema_pddl: schema.canonical_text(),
            viable: true,
            diagnostics: Vec::new(),
            similarity: None,
            filtered_out: false,
            schema: Some(schema),
        }
    }

    /// Viable and not removed by the threshold.
    pub fn selectable(&self) -> bool {
        self.viable && !self.filtered_out && self.schema.is_some()
    }

    fn dedup_key(&self) -> String {
        if self.schema.is_some() {
            self.schema_pddl.clone()
        } else {
            format!("raw:{}", self.raw_response)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub action: String,
    pub candidates: Vec<CandidateSchema>,
}

impl Bucket {
    pub fn selectable(&self) -> impl Iterator<Item = &CandidateSchema> {
        self.candidates.iter().filter(|c| c.selectable())
    }
}

/// Per-action buckets in reference action order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemaLibrary {
    pub domain: String,
    pub buckets: Vec<Bucket>,
}

impl SchemaLibrary {
    /// Number of actions M.
    pub fn action_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn bucket_sizes(&self) -> Vec<usize> {
        self.buckets.iter().map(|b| b.candidates.len()).collect()
    }

    /// Selectable counts m_i.
    pub fn viable_counts(&self) -> Vec<usize> {
        self.buckets.iter().map(|b| b.selectable().count()).collect()
    }

    pub fn raw_combinations(&self) -> u128 {
        self.bucket_sizes().iter().map(|&n| n as u128).product()
    }

    pub fn viable_combinations(&self) -> u128 {
        self.viable_counts().iter().map(|&n| n as u128).product()
    }

    pub fn candidates(&self) -> impl Iterator<Item = &CandidateSchema> {
        self.buckets.iter().flat_map(|b| &b.candidates)
    }
}

/// Groups candidates by action, collapsing identical canonical schemas onto
/// the lowest instance index, and recomputes viability.
pub fn build_library(
    candidates: Vec<CandidateSchema>,
    reference: &Domain,
) -> Result<SchemaLibrary, IngestError> {
    let mut buckets: Vec<Bucket> = reference
        .actions
        .iter()
        .map(|a| Bucket {
            action: a.name.clone(),
            candidates: Vec::new(),
        })
        .collect();
    let mut sorted = candidates;
    sorted.sort_by_key(|c| c.instance);
    let mut seen: Vec<HashSet<String>> = vec![HashSet::new(); buckets.len()];
    for mut c in sorted {
        let j = reference
            .actions
            .iter()
            .position(|a| a.name == c.action)
            .ok_or_else(|| IngestError::UnknownAction(c.action.clone()))?;
        if !seen[j].insert(c.dedup_key()) {
            continue;
        }
        c.action_index = j as u32 + 1;
        if let Some(s) = &c.schema {
            let diags = validate_schema(s, reference);
            c.viable = diags.is_empty();
            if !c.diagnostics.iter().any(|d| d.code == crate::pddl::DiagnosticCode::ParseFailure) {
                c.diagnostics = diags;
            }
        } else {
            c.viable = false;
        }
        buckets[j].candidates.push(c);
    }
    Ok(SchemaLibrary {
        domain: reference.name.clone(),
        buckets,
    })
}

#[derive(Serialize)]
struct Line<'a> {
    #[serde(flatten)]
    candidate: &'a CandidateSchema,
    config_digest: &'a str,
}

/// Writes one JSON object per candidate.
pub fn write_candidates(
    path: &Path,
    candidates: &[CandidateSchema],
    config_digest: &str,
) -> Result<(), IngestError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    for c in candidates {
        serde_json::to_writer(&mut w, &Line {
            candidate: c,
            config_digest,
        })?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_candidates(path: &Path) -> Result<Vec<CandidateSchema>, IngestError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for line in file.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut c: CandidateSchema = serde_json::from_str(&line)?;
        if !c.schema_pddl.is_empty() {
            c.schema = Some(parse_action(&c.schema_pddl)?);
        }
        out.push(c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::parse_domain;

    fn domain() -> Domain {
        parse_domain(
            "(define (domain d) (:types loc)
               (:predicates (at ?l - loc) (visited ?l - loc))
               (:action move :parameters (?a ?b - loc) :precondition (at ?a)
                  :effect (and (not (at ?a)) (at ?b)))
               (:action mark :parameters (?a - loc) :precondition (at ?a) :effect (visited ?a)))",
        )
        .unwrap()
    }

    #[test]
    fn duplicates_collapse_to_lowest_instance() {
        let d = domain();
        let m = d.action("move").unwrap().clone();
        let cands = vec![
            CandidateSchema::from_schema(m.clone(), 1, 4),
            CandidateSchema::from_schema(m, 1, 2),
            CandidateSchema::from_schema(d.action("mark").unwrap().clone(), 2, 1),
        ];
        let lib = build_library(cands, &d).unwrap();
        assert_eq!(lib.bucket_sizes(), vec![1, 1]);
        assert_eq!(lib.buckets[0].candidates[0].instance, 2);
    }

    #[test]
    fn equal_buckets_give_n_to_the_m() {
        let d = domain();
        let mut cands = Vec::new();
        for i in 1..=10u32 {
            for a in &d.actions {
                let mut s = a.clone();
                // distinct but valid: vary the parameter names
                for p in &mut s.parameters {
                    p.name = format!("{}{i}", p.name);
                }
                for l in s.preconditions.iter_mut().chain(s.effects.iter_mut()) {
                    for t in &mut l.args {
                        if let crate::pddl::Term::Var(v) = t {
                            *v = format!("{v}{i}");
                        }
                    }
                }
                cands.push(CandidateSchema::from_schema(s, 0, i));
            }
        }
        let lib = build_library(cands, &d).unwrap();
        assert_eq!(lib.raw_combinations(), 10u128.pow(2));
        assert_eq!(lib.viable_counts(), vec![10, 10]);
    }

    #[test]
    fn unknown_action_is_an_error() {
        let d = domain();
        let mut c = CandidateSchema::from_schema(d.actions[0].clone(), 1, 1);
        c.action = "fly".into();
        assert!(matches!(build_library(vec![c], &d), Err(IngestError::UnknownAction(_))));
    }

    #[test]
    fn jsonl_round_trip() {
        let d = domain();
        let c = CandidateSchema::from_schema(d.actions[0].clone(), 1, 1);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        write_candidates(&p, std::slice::from_ref(&c), "abc").unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("\"config_digest\":\"abc\""));
        assert_eq!(read_candidates(&p).unwrap(), vec![c]);
    }
}
