use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{ActionSchema, Domain, Literal, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticCode {
    UnboundVariable,
    ArityMismatch,
    UndeclaredPredicate,
    UndeclaredType,
    DuplicateParameter,
    ContradictoryEffect,
    UnknownConstant,
    /// The raw response could not be turned into a schema at all.
    ParseFailure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl Diagnostic {
    fn at(code: DiagnosticCode, lit: Option<&Literal>, message: String) -> Self {
        let span = lit.map(|l| l.span).unwrap_or_default();
        Diagnostic {
            code,
            message,
            line: span.line,
            column: span.column,
        }
    }

    pub fn parse_failure(message: impl Into<String>) -> Self {
        Diagnostic {
            code: DiagnosticCode::ParseFailure,
            message: message.into(),
            line: 0,
            column: 0,
        }
    }
}

/// Checks `a` against the predicates, types and constants of `d`. An empty
/// result means the schema can be grounded against any problem of `d`.
pub fn validate_schema(a: &ActionSchema, d: &Domain) -> Vec<Diagnostic> {
    use DiagnosticCode::*;
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for p in &a.parameters {
        if !seen.insert(p.name.as_str()) {
            out.push(Diagnostic::at(
                DuplicateParameter,
                None,
                format!("parameter `?{}` declared twice", p.name),
            ));
        }
        if !d.has_type(&p.ty) {
            out.push(Diagnostic::at(
                UndeclaredType,
                None,
                format!("parameter `?{}` has undeclared type `{}`", p.name, p.ty),
            ));
        }
    }

    for lit in a.preconditions.iter().chain(&a.effects) {
        match d.predicate(&lit.predicate) {
            None => out.push(Diagnostic::at(
                UndeclaredPredicate,
                Some(lit),
                format!("predicate `{}` is not declared", lit.predicate),
            )),
            Some(sig) if sig.arity() != lit.args.len() => out.push(Diagnostic::at(
                ArityMismatch,
                Some(lit),
                format!(
                    "`{}` takes {} argument(s), got {}",
                    lit.predicate,
                    sig.arity(),
                    lit.args.len()
                ),
            )),
            Some(_) => {}
        }
        for t in &lit.args {
            match t {
                Term::Var(v) if a.parameter(v).is_none() => out.push(Diagnostic::at(
                    UnboundVariable,
                    Some(lit),
                    format!("variable `?{v}` in `{lit}` is not a parameter"),
                )),
                Term::Const(c) if !d.constants.iter().any(|k| &k.name == c) => {
                    out.push(Diagnostic::at(
                        UnknownConstant,
                        Some(lit),
                        format!("`{c}` in `{lit}` is neither a parameter nor a domain constant"),
                    ))
                }
                _ => {}
            }
        }
    }

    for (i, e) in a.effects.iter().enumerate() {
        if a.effects[i + 1..]
            .iter()
            .any(|o| o.same_atom(e) && o.negated != e.negated)
        {
            out.push(Diagnostic::at(
                ContradictoryEffect,
                Some(e),
                format!("effect asserts and deletes `{}`", e.predicate),
            ));
        }
    }
    out
}
