//! The STRIPS subset of PDDL used throughout the pipeline: `:strips`,
//! `:typing` (flat) and `:negative-preconditions`.
//!
//! Identifiers are case-insensitive and canonicalized to lowercase at parse
//! time. Preconditions and effects are conjunctions of possibly negated
//! literals, stored in declaration order with duplicates removed.

mod parse;
mod print;
mod repair;
mod sexpr;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use parse::{parse_action, parse_condition, parse_domain, parse_problem};
pub use print::{
    print_action, print_condition, print_domain, print_literal, print_problem, render_predicate_list,
};
pub use repair::{predicate_tokens, repair_syntax};
pub use validate::{validate_schema, Diagnostic, DiagnosticCode};

/// Implicit type of untyped parameters and objects.
pub const OBJECT_TYPE: &str = "object";

/// Source position of a parsed element. Positions never take part in
/// structural equality, so a reparsed printout compares equal to its source.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PddlError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported requirement `{0}`")]
    UnsupportedRequirement(String),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("undeclared type `{0}`")]
    UndeclaredType(String),
    #[error("init atom `{0}` is not ground")]
    NonGroundInit(String),
    #[error("unrepairable fragment: {0}")]
    Unrepairable(String),
}

impl PddlError {
    pub(crate) fn syntax(span: Span, message: impl Into<String>) -> Self {
        PddlError::Syntax {
            line: span.line,
            column: span.column,
            message: message.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Requirement {
    Strips,
    Typing,
    NegativePreconditions,
}

impl Requirement {
    pub fn from_keyword(kw: &str) -> Option<Self> {
        match kw {
            ":strips" => Some(Requirement::Strips),
            ":typing" => Some(Requirement::Typing),
            ":negative-preconditions" => Some(Requirement::NegativePreconditions),
            _ => None,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Requirement::Strips => ":strips",
            Requirement::Typing => ":typing",
            Requirement::NegativePreconditions => ":negative-preconditions",
        }
    }
}

/// An argument of a literal: a `?variable` or an object constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    /// Variable name without the leading `?`.
    Var(String),
    Const(String),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
        }
    }
}

/// A typed variable or object. For parameters `name` excludes the `?`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

impl TypedName {
    pub fn new(name: impl Into<String>, ty: impl Into<String>) -> Self {
        TypedName {
            name: name.into(),
            ty: ty.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredicateSignature {
    pub name: String,
    pub parameters: Vec<TypedName>,
    pub doc: Option<String>,
}

impl PredicateSignature {
    pub fn arity(&self) -> usize {
        self.parameters.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub predicate: String,
    pub args: Vec<Term>,
    pub negated: bool,
    #[serde(skip)]
    pub span: Span,
}

impl Literal {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>, negated: bool) -> Self {
        Literal {
            predicate: predicate.into(),
            args,
            negated,
            span: Span::default(),
        }
    }

    pub fn positive(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Literal::new(predicate, args, false)
    }

    pub fn negate(&self) -> Literal {
        Literal {
            negated: !self.negated,
            ..self.clone()
        }
    }

    /// Same atom, ignoring sign.
    pub fn same_atom(&self, other: &Literal) -> bool {
        self.predicate == other.predicate && self.args == other.args
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_literal(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: String,
    pub parameters: Vec<TypedName>,
    pub preconditions: Vec<Literal>,
    pub effects: Vec<Literal>,
}

impl ActionSchema {
    pub fn parameter(&self, var: &str) -> Option<&TypedName> {
        self.parameters.iter().find(|p| p.name == var)
    }

    /// Canonical printed text, the identity used for deduplication and as the
    /// encoder input.
    pub fn canonical_text(&self) -> String {
        print_action(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Domain {
    pub name: String,
    pub requirements: Vec<Requirement>,
    pub types: Vec<String>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateSignature>,
    pub actions: Vec<ActionSchema>,
}

impl Domain {
    pub fn predicate(&self, name: &str) -> Option<&PredicateSignature> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn action_names(&self) -> Vec<&str> {
        self.actions.iter().map(|a| a.name.as_str()).collect()
    }

    pub fn has_type(&self, ty: &str) -> bool {
        ty == OBJECT_TYPE || self.types.iter().any(|t| t == ty)
    }

    /// Same predicates and types with a different action list.
    pub fn with_actions(&self, actions: Vec<ActionSchema>) -> Domain {
        Domain {
            actions,
            ..self.clone()
        }
    }
}

/// A ground atom such as `(on-shelf book3 book1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<String>, args: Vec<String>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundLiteral {
    pub atom: GroundAtom,
    pub negated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub name: String,
    pub domain_name: String,
    pub objects: Vec<TypedName>,
    pub init: Vec<GroundAtom>,
    pub goal: Vec<GroundLiteral>,
}

impl ProblemInstance {
    pub fn objects_of_type<'a>(&'a self, ty: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.objects
            .iter()
            .filter(move |o| ty == OBJECT_TYPE || o.ty == ty)
            .map(|o| o.name.as_str())
    }
}

pub(crate) fn canonical_ident(s: &str) -> String {
    s.to_lowercase()
}
