use std::collections::{BTreeMap, HashSet};

use super::sexpr::{parse_source, SExpr, Source};
use super::{
    canonical_ident, ActionSchema, Domain, GroundAtom, GroundLiteral, Literal, PddlError,
    PredicateSignature, ProblemInstance, Requirement, Span, Term, TypedName, OBJECT_TYPE,
};

pub fn parse_domain(text: &str) -> Result<Domain, PddlError> {
    let src = parse_source(text)?;
    let body = define_body(&src, "domain")?;
    let (name, sections) = body;

    let mut domain = Domain {
        name,
        requirements: Vec::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        actions: Vec::new(),
    };

    for section in sections {
        let items = section
            .as_list()
            .ok_or_else(|| PddlError::syntax(section.span(), "expected a `(:section ...)`"))?;
        let head = keyword(items, section.span())?;
        match head.as_str() {
            ":requirements" => {
                for it in &items[1..] {
                    let kw = atom(it)?;
                    let req = Requirement::from_keyword(&kw)
                        .ok_or_else(|| PddlError::UnsupportedRequirement(kw.clone()))?;
                    if !domain.requirements.contains(&req) {
                        domain.requirements.push(req);
                    }
                }
            }
            ":types" => {
                for t in parse_typed_list(&items[1..], false)? {
                    if t.ty != OBJECT_TYPE {
                        return Err(PddlError::syntax(
                            items[0].span(),
                            format!("type hierarchies are not supported (`{} - {}`)", t.name, t.ty),
                        ));
                    }
                    if t.name == OBJECT_TYPE {
                        continue;
                    }
                    if domain.types.contains(&t.name) {
                        return Err(PddlError::Duplicate {
                            kind: "type",
                            name: t.name,
                        });
                    }
                    domain.types.push(t.name);
                }
            }
            ":constants" => {
                for c in parse_typed_list(&items[1..], false)? {
                    if domain.constants.iter().any(|x| x.name == c.name) {
                        return Err(PddlError::Duplicate {
                            kind: "constant",
                            name: c.name,
                        });
                    }
                    domain.constants.push(c);
                }
            }
            ":predicates" => {
                for p in &items[1..] {
                    let sig = parse_signature(p, &src)?;
                    if domain.predicate(&sig.name).is_some() {
                        return Err(PddlError::Duplicate {
                            kind: "predicate",
                            name: sig.name,
                        });
                    }
                    domain.predicates.push(sig);
                }
            }
            ":action" => {
                let action = parse_action_expr(section)?;
                if domain.action(&action.name).is_some() {
                    return Err(PddlError::Duplicate {
                        kind: "action",
                        name: action.name,
                    });
                }
                domain.actions.push(action);
            }
            other => {
                return Err(PddlError::syntax(
                    items[0].span(),
                    format!("unsupported domain section `{other}`"),
                ))
            }
        }
    }

    let used_types = domain
        .constants
        .iter()
        .chain(domain.predicates.iter().flat_map(|p| p.parameters.iter()))
        .chain(domain.actions.iter().flat_map(|a| a.parameters.iter()));
    for t in used_types {
        if !domain.has_type(&t.ty) {
            return Err(PddlError::UndeclaredType(t.ty.clone()));
        }
    }
    Ok(domain)
}

pub fn parse_problem(text: &str) -> Result<ProblemInstance, PddlError> {
    let src = parse_source(text)?;
    let (name, sections) = define_body(&src, "problem")?;
    let mut problem = ProblemInstance {
        name,
        domain_name: String::new(),
        objects: Vec::new(),
        init: Vec::new(),
        goal: Vec::new(),
    };
    for section in sections {
        let items = section
            .as_list()
            .ok_or_else(|| PddlError::syntax(section.span(), "expected a `(:section ...)`"))?;
        let head = keyword(items, section.span())?;
        match head.as_str() {
            ":domain" => {
                let n = items
                    .get(1)
                    .ok_or_else(|| PddlError::syntax(section.span(), "missing domain name"))?;
                problem.domain_name = canonical_ident(&atom(n)?);
            }
            ":objects" => {
                for o in parse_typed_list(&items[1..], false)? {
                    if problem.objects.iter().any(|x| x.name == o.name) {
                        return Err(PddlError::Duplicate {
                            kind: "object",
                            name: o.name,
                        });
                    }
                    problem.objects.push(o);
                }
            }
            ":init" => {
                for it in &items[1..] {
                    let lits = parse_condition_expr(it)?;
                    for lit in lits {
                        if lit.negated || lit.args.iter().any(Term::is_var) {
                            return Err(PddlError::NonGroundInit(lit.to_string()));
                        }
                        let atom = ground_atom(&lit);
                        if !problem.init.contains(&atom) {
                            problem.init.push(atom);
                        }
                    }
                }
            }
            ":goal" => {
                for it in &items[1..] {
                    for lit in parse_condition_expr(it)? {
                        if lit.args.iter().any(Term::is_var) {
                            return Err(PddlError::syntax(
                                lit.span,
                                format!("goal literal `{lit}` is not ground"),
                            ));
                        }
                        let g = GroundLiteral {
                            atom: ground_atom(&lit),
                            negated: lit.negated,
                        };
                        if !problem.goal.contains(&g) {
                            problem.goal.push(g);
                        }
                    }
                }
            }
            other => {
                return Err(PddlError::syntax(
                    items[0].span(),
                    format!("unsupported problem section `{other}`"),
                ))
            }
        }
    }
    Ok(problem)
}

/// Parses a standalone `(:action ...)` block.
pub fn parse_action(text: &str) -> Result<ActionSchema, PddlError> {
    let src = parse_source(text)?;
    match src.exprs.as_slice() {
        [one] => parse_action_expr(one),
        [] => Err(PddlError::syntax(Span::default(), "empty input")),
        [_, second, ..] => Err(PddlError::syntax(second.span(), "trailing input after action")),
    }
}

/// Parses a precondition/effect fragment: `(and ...)`, a single literal, or `()`.
pub fn parse_condition(text: &str) -> Result<Vec<Literal>, PddlError> {
    let src = parse_source(text)?;
    match src.exprs.as_slice() {
        [one] => parse_condition_expr(one),
        [] => Err(PddlError::syntax(Span::default(), "empty fragment")),
        [_, second, ..] => Err(PddlError::syntax(
            second.span(),
            "trailing input after condition",
        )),
    }
}

fn ground_atom(lit: &Literal) -> GroundAtom {
    GroundAtom::new(
        lit.predicate.clone(),
        lit.args.iter().map(|t| t.name().to_string()).collect(),
    )
}

fn define_body<'a>(src: &'a Source, kind: &str) -> Result<(String, &'a [SExpr]), PddlError> {
    let first = match src.exprs.as_slice() {
        [one] => one,
        [] => return Err(PddlError::syntax(Span::default(), "empty input")),
        [_, second, ..] => {
            return Err(PddlError::syntax(
                second.span(),
                "trailing input after `(define ...)`",
            ))
        }
    };
    let items = first
        .as_list()
        .ok_or_else(|| PddlError::syntax(first.span(), "expected `(define ...)`"))?;
    match items.first().and_then(SExpr::as_atom) {
        Some(d) if d.eq_ignore_ascii_case("define") => {}
        _ => return Err(PddlError::syntax(first.span(), "expected `(define ...)`")),
    }
    let header = items
        .get(1)
        .and_then(SExpr::as_list)
        .ok_or_else(|| PddlError::syntax(first.span(), format!("expected `({kind} <name>)`")))?;
    match header {
        [k, n] if k.as_atom().is_some_and(|k| k.eq_ignore_ascii_case(kind)) => {
            Ok((canonical_ident(&atom(n)?), &items[2..]))
        }
        _ => Err(PddlError::syntax(
            items[1].span(),
            format!("expected `({kind} <name>)`"),
        )),
    }
}

fn keyword(items: &[SExpr], span: Span) -> Result<String, PddlError> {
    items
        .first()
        .and_then(SExpr::as_atom)
        .map(canonical_ident)
        .ok_or_else(|| PddlError::syntax(span, "expected a keyword"))
}

fn atom(e: &SExpr) -> Result<String, PddlError> {
    e.as_atom()
        .map(canonical_ident)
        .ok_or_else(|| PddlError::syntax(e.span(), "expected a name, found a list"))
}

/// `?a ?b - t ?c` style lists. Untyped entries get [`OBJECT_TYPE`].
fn parse_typed_list(items: &[SExpr], vars: bool) -> Result<Vec<TypedName>, PddlError> {
    let mut out = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut iter = items.iter();
    while let Some(it) = iter.next() {
        let word = atom(it)?;
        if word == "-" {
            let ty = iter
                .next()
                .ok_or_else(|| PddlError::syntax(it.span(), "missing type after `-`"))?;
            let ty = atom(ty)?;
            if pending.is_empty() {
                return Err(PddlError::syntax(it.span(), "`-` without names"));
            }
            out.extend(pending.drain(..).map(|n| TypedName::new(n, ty.clone())));
            continue;
        }
        let name = if vars {
            word.strip_prefix('?')
                .filter(|v| !v.is_empty())
                .ok_or_else(|| PddlError::syntax(it.span(), format!("expected a variable, found `{word}`")))?
                .to_string()
        } else {
            word
        };
        pending.push(name);
    }
    out.extend(pending.into_iter().map(|n| TypedName::new(n, OBJECT_TYPE)));
    Ok(out)
}

fn parse_signature(e: &SExpr, src: &Source) -> Result<PredicateSignature, PddlError> {
    let items = e
        .as_list()
        .ok_or_else(|| PddlError::syntax(e.span(), "expected `(predicate ?args)`"))?;
    let name = items
        .first()
        .ok_or_else(|| PddlError::syntax(e.span(), "empty predicate declaration"))
        .and_then(atom)?;
    let parameters = parse_typed_list(&items[1..], true)?;
    check_unique_params(&parameters, e.span())?;
    let doc = src.comments.get(&e.end_span().line).cloned();
    Ok(PredicateSignature {
        name,
        parameters,
        doc,
    })
}

fn check_unique_params(params: &[TypedName], span: Span) -> Result<(), PddlError> {
    let mut seen = HashSet::new();
    for p in params {
        if !seen.insert(&p.name) {
            return Err(PddlError::syntax(
                span,
                format!("duplicate parameter `?{}`", p.name),
            ));
        }
    }
    Ok(())
}

pub(crate) fn parse_action_expr(e: &SExpr) -> Result<ActionSchema, PddlError> {
    let items = e
        .as_list()
        .ok_or_else(|| PddlError::syntax(e.span(), "expected `(:action ...)`"))?;
    match items.first().and_then(SExpr::as_atom) {
        Some(k) if k.eq_ignore_ascii_case(":action") => {}
        _ => return Err(PddlError::syntax(e.span(), "expected `(:action ...)`")),
    }
    let name = items
        .get(1)
        .ok_or_else(|| PddlError::syntax(e.span(), "missing action name"))
        .and_then(atom)?;
    let mut fields: BTreeMap<String, &SExpr> = BTreeMap::new();
    let mut rest = items[2..].iter();
    while let Some(k) = rest.next() {
        let key = atom(k)?;
        if !matches!(key.as_str(), ":parameters" | ":precondition" | ":effect") {
            return Err(PddlError::syntax(
                k.span(),
                format!("unsupported action field `{key}`"),
            ));
        }
        let v = rest
            .next()
            .ok_or_else(|| PddlError::syntax(k.span(), format!("missing value for `{key}`")))?;
        if fields.insert(key.clone(), v).is_some() {
            return Err(PddlError::syntax(k.span(), format!("repeated `{key}`")));
        }
    }
    let parameters = match fields.get(":parameters") {
        Some(p) => {
            let list = p
                .as_list()
                .ok_or_else(|| PddlError::syntax(p.span(), "expected a parameter list"))?;
            let params = parse_typed_list(list, true)?;
            check_unique_params(&params, p.span())?;
            params
        }
        None => Vec::new(),
    };
    let preconditions = match fields.get(":precondition") {
        Some(c) => parse_condition_expr(c)?,
        None => Vec::new(),
    };
    let effects = match fields.get(":effect") {
        Some(c) => parse_condition_expr(c)?,
        None => Vec::new(),
    };
    Ok(ActionSchema {
        name,
        parameters,
        preconditions,
        effects,
    })
}

pub(crate) fn parse_condition_expr(e: &SExpr) -> Result<Vec<Literal>, PddlError> {
    let mut out = Vec::new();
    collect_literals(e, &mut out)?;
    let mut deduped: Vec<Literal> = Vec::with_capacity(out.len());
    for lit in out {
        if !deduped.contains(&lit) {
            deduped.push(lit);
        }
    }
    Ok(deduped)
}

fn collect_literals(e: &SExpr, out: &mut Vec<Literal>) -> Result<(), PddlError> {
    let items = e.as_list().ok_or_else(|| {
        PddlError::syntax(e.span(), format!("expected a literal, found `{}`", e.as_atom().unwrap_or("")))
    })?;
    let Some(head) = items.first() else {
        return Ok(());
    };
    let head_name = atom(head)?;
    match head_name.as_str() {
        "and" => {
            for c in &items[1..] {
                collect_literals(c, out)?;
            }
            Ok(())
        }
        "not" => {
            let inner = match &items[1..] {
                [one] => one,
                _ => return Err(PddlError::syntax(e.span(), "`not` takes exactly one literal")),
            };
            let mut lit = parse_atomic(inner)?;
            lit.negated = true;
            lit.span = e.span();
            out.push(lit);
            Ok(())
        }
        "or" | "forall" | "exists" | "imply" | "when" | "=" => Err(PddlError::syntax(
            head.span(),
            format!("`{head_name}` is outside the supported STRIPS subset"),
        )),
        _ => {
            out.push(parse_atomic(e)?);
            Ok(())
        }
    }
}

fn parse_atomic(e: &SExpr) -> Result<Literal, PddlError> {
    let items = e
        .as_list()
        .ok_or_else(|| PddlError::syntax(e.span(), "expected `(predicate args...)`"))?;
    let head = items
        .first()
        .ok_or_else(|| PddlError::syntax(e.span(), "empty literal"))?;
    let predicate = atom(head)?;
    if predicate.starts_with(':') || predicate.starts_with('?') || predicate == "and" || predicate == "not" {
        return Err(PddlError::syntax(
            head.span(),
            format!("`{predicate}` is not a predicate name"),
        ));
    }
    let mut args = Vec::new();
    for a in &items[1..] {
        let w = atom(a)?;
        match w.strip_prefix('?') {
            Some("") => return Err(PddlError::syntax(a.span(), "empty variable name")),
            Some(v) => args.push(Term::Var(v.to_string())),
            None => args.push(Term::Const(w)),
        }
    }
    Ok(Literal {
        predicate,
        args,
        negated: false,
        span: e.span(),
    })
}
