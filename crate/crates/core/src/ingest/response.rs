use std::sync::LazyLock;

use regex::Regex;

use super::IngestError;
use crate::pddl::{
    canonical_ident, parse_condition, print_literal, repair_syntax, ActionSchema, Literal,
    PddlError, TypedName, OBJECT_TYPE,
};

static RESPONSE_HEADER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?im)^\s*(?:\*\*)?response:?(?:\*\*)?:?\s*$").unwrap());
static PARAM_LINE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"^\s*(?:\d+[.)]|[-*])?\s*`?\?([A-Za-z][A-Za-z0-9_\-]*)`?\s*(?:-\s*`?([A-Za-z][A-Za-z0-9_\-]*))?")
        .unwrap()
});

fn header(line: &str, name: &str) -> bool {
    let t = line.replace('*', "");
    t.trim().trim_end_matches(':').trim().eq_ignore_ascii_case(name)
}

/// Lines of the section that starts at header `name`, up to the next header
/// in `stops` or a `---` rule.
fn section<'a>(lines: &[&'a str], name: &str, stops: &[&str]) -> Option<Vec<&'a str>> {
    let start = lines.iter().position(|l| header(l, name))?;
    Some(
        lines[start + 1..]
            .iter()
            .take_while(|l| l.trim() != "---" && !stops.iter().any(|s| header(l, s)))
            .copied()
            .collect(),
    )
}

/// Body of a block: the text between the first fence and the next one, or
/// the whole section when unfenced. An unterminated fence runs to the end.
fn fragment(lines: &[&str]) -> String {
    let fence = |l: &&str| l.trim_start().starts_with("```");
    let body: Vec<&str> = match lines.iter().position(fence) {
        Some(open) => lines[open + 1..].iter().take_while(|l| !fence(l)).copied().collect(),
        None => lines.to_vec(),
    };
    body.join("\n").trim().to_string()
}

fn condition(text: &str, declared: &[String]) -> Result<Vec<Literal>, IngestError> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let repaired = repair_syntax(text, Some(declared)).map_err(|e| match e {
        PddlError::Unrepairable(s) => IngestError::Unrepairable(s),
        other => IngestError::Pddl(other),
    })?;
    parse_condition(&repaired).map_err(|e| IngestError::Unrepairable(e.to_string()))
}

/// Extracts the schema from a structured reply: the numbered Parameters list
/// and the fenced Preconditions/Effects blocks under `**Response:**`.
pub fn parse_llm_response(
    text: &str,
    action: &str,
    declared: &[String],
) -> Result<ActionSchema, IngestError> {
    let m = RESPONSE_HEADER
        .find(text)
        .ok_or(IngestError::MissingSection("Response"))?;
    let body: Vec<&str> = text[m.end()..].lines().collect();

    let mut parameters: Vec<TypedName> = Vec::new();
    for line in section(&body, "parameters", &["preconditions", "effects"]).unwrap_or_default() {
        if let Some(c) = PARAM_LINE.captures(line) {
            let ty = c.get(2).map_or(OBJECT_TYPE.to_string(), |t| canonical_ident(t.as_str()));
            parameters.push(TypedName::new(canonical_ident(&c[1]), ty));
        }
    }

    let pre = section(&body, "preconditions", &["effects"]).unwrap_or_default();
    let eff = section(&body, "effects", &[]).ok_or(IngestError::MissingSection("Effects"))?;
    let eff_text = fragment(&eff);
    if eff_text.is_empty() {
        return Err(IngestError::MissingSection("Effects"));
    }
    Ok(ActionSchema {
        name: canonical_ident(action),
        parameters,
        preconditions: condition(&fragment(&pre), declared)?,
        effects: condition(&eff_text, declared)?,
    })
}

fn block(lits: &[Literal]) -> String {
    let mut s = String::from("```\n(and\n");
    for l in lits {
        s.push_str("    ");
        s.push_str(&print_literal(l));
        s.push('\n');
    }
    s.push_str(")\n```");
    s
}

/// Renders `a` in the reply format the prompt asks for.
pub fn format_response(a: &ActionSchema, explanation: &str) -> String {
    let params: Vec<String> = a
        .parameters
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{}. ?{} - {}: [the {} involved]", i + 1, p.name, p.ty, p.ty))
        .collect();
    format!(
        "**Explanation:**\n{}\n\n**Response:**\nParameters:\n{}\n\nPreconditions:\n{}\n\nEffects:\n{}\n",
        explanation.trim(),
        params.join("\n"),
        block(&a.preconditions),
        block(&a.effects)
    )
}
